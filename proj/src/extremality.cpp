#include "povm/extremality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace povm {

namespace {

struct Support {
    Operator basis;         ///< d x r, orthonormal columns spanning range(P)
    Eigen::VectorXd values; ///< the r retained eigenvalues
    std::size_t ambiguous = 0;
};

Support support_of(const Operator &element, const Tolerances &tol) {
    const auto eig = eigh(element, tol.herm);
    Support s;
    Eigen::Index r = 0;
    while (r < eig.values.size() && eig.values(r) > tol.rank_gap) {
        if (eig.values(r) <= tol.rank_gap * tol.ambiguity) {
            ++s.ambiguous;
        }
        ++r;
    }
    s.basis = eig.vectors.leftCols(r);
    s.values = eig.values.head(r);
    return s;
}

std::vector<Support> supports_of(const FinitePovm &p, const Tolerances &tol) {
    std::vector<Support> out;
    out.reserve(p.size());
    for (const auto &e : p.entries()) {
        out.push_back(support_of(e.element, tol));
    }
    return out;
}

std::vector<Perturbation> perturbations_on(const FinitePovm &p, const std::vector<Support> &supports,
                                           const Tolerances &tol) {
    const auto d = p.dim();
    const std::size_t n = p.size();
    const HermitianTuple<double> zero(n, Operator::Zero(d, d));

    std::vector<HermitianTuple<double>> domain;
    for (std::size_t i = 0; i < n; ++i) {
        const auto &v = supports[i].basis;
        for (const auto &b : hermitian_basis<double>(v.cols())) {
            HermitianTuple<double> t = zero;
            t[i] = v * b * v.adjoint();
            domain.push_back(std::move(t));
        }
    }
    const TupleMap<double> sum_map = [d](const HermitianTuple<double> &t) {
        Operator s = Operator::Zero(d, d);
        for (const auto &q : t) {
            s += q;
        }
        return HermitianTuple<double>{s};
    };
    std::vector<Perturbation> out;
    for (auto &t : hermitian_nullspace<double>(sum_map, domain, tol.rank_gap)) {
        out.push_back(Perturbation{std::move(t)});
    }
    return out;
}

// sup { t >= 0 : P + t Q >= 0 } for Q supported on range(P).
double element_step(const Support &s, const Operator &q) {
    if (s.values.size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const Eigen::VectorXd inv_sqrt = s.values.cwiseSqrt().cwiseInverse();
    const Operator restricted = s.basis.adjoint() * q * s.basis;
    const Operator scaled = -(inv_sqrt.asDiagonal() * restricted * inv_sqrt.asDiagonal());
    Eigen::SelfAdjointEigenSolver<Operator> solver((scaled + scaled.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    const double top = solver.eigenvalues().maxCoeff();
    return top > 0 ? 1.0 / top : std::numeric_limits<double>::infinity();
}

StepBounds step_on(const std::vector<Support> &supports, const Perturbation &q) {
    double norm2 = 0.0;
    for (const auto &c : q.components) {
        norm2 += c.squaredNorm();
    }
    if (!(norm2 > 0.0)) {
        throw DegeneratePerturbation("perturbation has zero norm");
    }
    StepBounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < supports.size(); ++i) {
        b.plus = std::min(b.plus, element_step(supports[i], q.components[i]));
        b.minus = std::min(b.minus, element_step(supports[i], -q.components[i]));
    }
    if (!std::isfinite(b.plus) || !std::isfinite(b.minus)) {
        throw DegeneratePerturbation("perturbation does not reach the boundary; it is not traceless in sum");
    }
    return b;
}

FinitePovm moved(const FinitePovm &p, const Perturbation &q, double t, const Tolerances &tol) {
    std::vector<PovmEntry> entries;
    entries.reserve(p.size());
    const double zero_floor = tol.rank_gap * 1e-4;
    for (std::size_t i = 0; i < p.size(); ++i) {
        Operator e = p.element(i) + t * q.components[i];
        e = ((e + e.adjoint()) / 2.0).eval();
        if (e.norm() <= zero_floor) {
            e.setZero();
        }
        entries.push_back({p.point(i), std::move(e)});
    }
    return FinitePovm(p.space(), std::move(entries), p.allows_duplicate_points(), tol);
}

void check_perturbation_shape(const FinitePovm &p, const Perturbation &q) {
    if (q.components.size() != p.size()) {
        throw DimensionMismatch("perturbation and POVM have different entry counts");
    }
    for (const auto &c : q.components) {
        if (c.rows() != p.dim() || c.cols() != p.dim()) {
            throw DimensionMismatch("perturbation component has the wrong dimension");
        }
    }
}

bool same_povm(const FinitePovm &a, const FinitePovm &b, double tol) {
    if (a.size() != b.size() || a.dim() != b.dim()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_point(a.point(i), b.point(i)) || (a.element(i) - b.element(i)).norm() > tol) {
            return false;
        }
    }
    return true;
}

class Decomposer {
  public:
    Decomposer(std::size_t max_terms, const Tolerances &tol, std::size_t max_depth)
        : max_terms_(max_terms), tol_(tol), max_depth_(max_depth) {}

    void run(const FinitePovm &p, double weight, const std::string &path) {
        result_.depth = std::max(result_.depth, path.size());
        if (path.size() > max_depth_) {
            throw NumericalRankAmbiguity("split tree deeper than the total support rank; rank decisions are unstable");
        }
        const auto supports = supports_of(p, tol_);
        for (std::size_t i = 0; i < supports.size(); ++i) {
            if (supports[i].ambiguous > 0) {
                std::ostringstream msg;
                msg << "element " << i << " at path '" << path << "' has an eigenvalue inside the rank gap band";
                throw NumericalRankAmbiguity(msg.str());
            }
        }
        const auto basis = perturbations_on(p, supports, tol_);
        if (basis.empty()) {
            add_leaf(p, weight, path);
            return;
        }
        const Perturbation &q = basis.front();
        const StepBounds step = step_on(supports, q);
        const double span = step.plus + step.minus;
        run(moved(p, q, step.plus, tol_), weight * step.minus / span, path + "+");
        run(moved(p, q, -step.minus, tol_), weight * step.plus / span, path + "-");
    }

    DecompositionResult take() { return std::move(result_); }

  private:
    void add_leaf(const FinitePovm &leaf, double weight, const std::string &path) {
        for (auto &term : result_.terms) {
            if (same_povm(term.povm, leaf, tol_.merge)) {
                term.weight += weight;
                return;
            }
        }
        if (result_.terms.size() >= max_terms_) {
            std::ostringstream msg;
            msg << "decomposition needs more than " << max_terms_ << " terms";
            throw TermBudgetExceeded(msg.str(), std::move(result_));
        }
        result_.terms.push_back({weight, leaf, path});
    }

    std::size_t max_terms_;
    Tolerances tol_;
    std::size_t max_depth_;
    DecompositionResult result_;
};

} // namespace

std::vector<Perturbation> perturbation_space(const FinitePovm &p, const Tolerances &tol) {
    return perturbations_on(p, supports_of(p, tol), tol);
}

bool is_extremal(const FinitePovm &p, const Tolerances &tol) { return perturbation_space(p, tol).empty(); }

StepBounds max_step(const FinitePovm &p, const Perturbation &q, const Tolerances &tol) {
    check_perturbation_shape(p, q);
    return step_on(supports_of(p, tol), q);
}

Split split(const FinitePovm &p, const Perturbation &q, const Tolerances &tol) {
    check_perturbation_shape(p, q);
    const StepBounds step = step_on(supports_of(p, tol), q);
    const double span = step.plus + step.minus;
    return Split{moved(p, q, step.plus, tol), moved(p, q, -step.minus, tol), step.minus / span, step.plus / span,
                 step};
}

DecompositionResult decompose_extremal(const FinitePovm &p, std::size_t max_terms, const Tolerances &tol) {
    if (max_terms == 0) {
        throw InvalidInput("max_terms must be positive");
    }
    // Each split strictly lowers the total support rank of both children.
    const std::size_t max_depth = total_support_rank(p, tol) + 1;
    Decomposer worker(max_terms, tol, max_depth);
    worker.run(p, 1.0, "");
    return worker.take();
}

std::vector<Operator> reconstruct(const DecompositionResult &result) {
    if (result.terms.empty()) {
        return {};
    }
    const auto &first = result.terms.front().povm;
    std::vector<Operator> sum(first.size(), Operator::Zero(first.dim(), first.dim()));
    for (const auto &term : result.terms) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += term.weight * term.povm.element(i);
        }
    }
    return sum;
}

std::size_t total_support_rank(const FinitePovm &p, const Tolerances &tol) {
    std::size_t rank = 0;
    for (const auto &e : p.entries()) {
        rank += static_cast<std::size_t>(support_of(e.element, tol).values.size());
    }
    return rank;
}

} // namespace povm

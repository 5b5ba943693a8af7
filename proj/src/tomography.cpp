#include "povm/tomography.hpp"

#include <cmath>
#include <numbers>

#include "povm/quadrature.hpp"

namespace povm {

namespace {

Eigen::MatrixXd coordinate_matrix(const FinitePovm &p) {
    const auto d = p.dim();
    Eigen::MatrixXd c(d * d, static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
        c.col(static_cast<Eigen::Index>(i)) = hermitian_coordinates(p.element(i));
    }
    return c;
}

} // namespace

double DualProcessing::evaluate_at(const OutcomePoint &omega) const {
    switch (kind) {
    case DualKind::Spin:
        return a0 + 3.0 * a.dot(std::get<Direction>(omega));
    case DualKind::Phase: {
        const double phi = std::get<Angle>(omega).radians;
        double f = toeplitz.front().real();
        for (std::size_t k = 1; k < toeplitz.size(); ++k) {
            f += 2.0 * (toeplitz[k] * std::polar(1.0, -static_cast<double>(k) * phi)).real();
        }
        return f;
    }
    case DualKind::Finite:
        break;
    }
    throw InvalidInput("finite duals are indexed by apparatus outcome, not by outcome point");
}

double DualProcessing::evaluate(const OutcomeRecord &record) const {
    if (kind == DualKind::Finite) {
        if (!record.index || *record.index >= coefficients.size()) {
            throw InvalidInput("record lacks a valid apparatus index for a finite dual");
        }
        return coefficients[*record.index];
    }
    return evaluate_at(record.omega);
}

bool is_informationally_complete(const FinitePovm &p, const Tolerances &tol) {
    return numerical_rank<double>(coordinate_matrix(p), tol.rank_gap) == p.dim() * p.dim();
}

DualProcessing dual_coefficients(const FinitePovm &p, const Operator &target, const Tolerances &tol) {
    require_hermitian(target, tol.herm);
    if (target.rows() != p.dim()) {
        throw DimensionMismatch("target and POVM dimensions differ");
    }
    if (!is_informationally_complete(p, tol)) {
        throw NotInformationallyComplete("POVM elements do not span the Hermitian operators");
    }
    const Eigen::MatrixXd c = coordinate_matrix(p);
    const Eigen::VectorXd rhs = hermitian_coordinates(target);
    const Eigen::VectorXd f = c.completeOrthogonalDecomposition().solve(rhs);

    DualProcessing dual;
    dual.kind = DualKind::Finite;
    dual.target = target;
    dual.coefficients.assign(f.data(), f.data() + f.size());
    Operator rebuilt = Operator::Zero(p.dim(), p.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        rebuilt += f(static_cast<Eigen::Index>(i)) * p.element(i);
    }
    dual.residual = (rebuilt - target).norm();
    return dual;
}

DualProcessing dual_coefficients(const ContinuousPovm &c, const Operator &target, const Tolerances &tol) {
    require_hermitian(target, tol.herm);
    if (target.rows() != c.dim()) {
        throw DimensionMismatch("target and POVM dimensions differ");
    }
    DualProcessing dual;
    dual.target = (target + target.adjoint()) / 2.0;
    if (c.family() == Family::SpinDirection) {
        // A = a0 I + a.sigma with a0 = Tr[A]/2, a_k = Tr[A sigma_k]/2
        dual.kind = DualKind::Spin;
        dual.a0 = dual.target.trace().real() / 2.0;
        for (int k = 0; k < 3; ++k) {
            dual.a(k) = trace_inner(pauli<double>(k), dual.target) / 2.0;
        }
        return dual;
    }
    const auto d = c.dim();
    dual.kind = DualKind::Phase;
    dual.toeplitz.assign(static_cast<std::size_t>(d), 0.0);
    for (Eigen::Index k = 0; k < d; ++k) {
        std::complex<double> mean = 0.0;
        for (Eigen::Index m = k; m < d; ++m) {
            mean += dual.target(m, m - k);
        }
        mean /= static_cast<double>(d - k);
        for (Eigen::Index m = k; m < d; ++m) {
            if (std::abs(dual.target(m, m - k) - mean) > tol.rank_gap * (1 + dual.target.norm())) {
                throw NotInformationallyComplete(
                    "the phase measurement only determines Toeplitz operators; target is not Toeplitz");
            }
        }
        dual.toeplitz[static_cast<std::size_t>(k)] = mean;
    }
    return dual;
}

Operator dual_reconstruction(const ContinuousPovm &c, const DualProcessing &dual, std::size_t nodes) {
    Operator sum = Operator::Zero(c.dim(), c.dim());
    if (c.family() == Family::SpinDirection) {
        for (const auto &node : sphere_rule(nodes, 2 * nodes)) {
            sum += (node.weight / kTwoPi * dual.evaluate_at(node.n)) * c.density(node.n);
        }
        return sum;
    }
    const auto rule = periodic_trapezoid(std::max<std::size_t>(nodes, 4 * static_cast<std::size_t>(c.dim())));
    const double d = static_cast<double>(c.dim());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const Angle phi = make_angle(rule.nodes[j]);
        sum += (d * rule.weights[j] / kTwoPi * dual.evaluate_at(phi)) * c.density(phi);
    }
    return sum;
}

EstimateReport estimate_expectation(std::span<const OutcomeRecord> records, const DualProcessing &dual,
                                    const std::optional<DensityMatrix> &rho_exact) {
    if (records.empty()) {
        throw EmptySample("no records to average");
    }
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
    for (const auto &rec : records) {
        const double v = dual.evaluate(rec);
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
    }
    EstimateReport report;
    report.n = count;
    report.estimate = mean;
    const double n = static_cast<double>(count);
    report.std_error = count > 1 ? std::sqrt(m2 / (n - 1.0)) / std::sqrt(n) : 0.0;
    if (rho_exact) {
        if (rho_exact->dim() != dual.target.rows()) {
            throw DimensionMismatch("state and target dimensions differ");
        }
        report.exact = trace_inner(rho_exact->matrix(), dual.target);
    }
    return report;
}

} // namespace povm

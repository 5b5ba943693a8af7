#include "povm/finite_povm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace povm {

namespace {

void check_dimension(Eigen::Index d) {
    if (d < 1 || d > kMaxDimension) {
        throw InvalidDimension("dimension must lie in [1, " + std::to_string(kMaxDimension) + "]");
    }
}

} // namespace

DensityMatrix::DensityMatrix(Operator op, const Tolerances &tol) : op_(std::move(op)) {
    check_dimension(op_.rows());
    if (!op_.allFinite()) {
        throw InvalidInput("state has non-finite entries");
    }
    require_hermitian(op_, tol.herm);
    op_ = (op_ + op_.adjoint()).eval() / 2.0;
    const double tr = op_.trace().real();
    if (std::abs(tr - 1.0) > tol.trace * (1 + op_.norm())) {
        throw InvalidInput("state does not have unit trace");
    }
    if (!is_psd(op_, tol.psd, tol.herm)) {
        throw InvalidInput("state is not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::pure(const Ket &psi) {
    const double n = psi.norm();
    if (!(n > 0)) {
        throw InvalidInput("zero state vector");
    }
    const Ket v = psi / n;
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index d) {
    check_dimension(d);
    return DensityMatrix(Operator::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::from_bloch(const Eigen::Vector3d &r) {
    if (r.norm() > 1.0 + 1e-12) {
        throw InvalidInput("Bloch vector longer than 1");
    }
    Operator op = Operator::Identity(2, 2);
    for (int k = 0; k < 3; ++k) {
        op += r(k) * pauli<double>(k);
    }
    return DensityMatrix(op / 2.0);
}

FinitePovm::FinitePovm(OutcomeSpace space, std::vector<PovmEntry> entries, bool allow_duplicate_points,
                       const Tolerances &tol)
    : space_(space), entries_(std::move(entries)), allow_duplicates_(allow_duplicate_points) {
    if (entries_.empty()) {
        throw InvalidInput("POVM needs at least one entry");
    }
    dim_ = entries_.front().element.rows();
    check_dimension(dim_);
    for (auto &e : entries_) {
        if (e.element.rows() != dim_ || e.element.cols() != dim_) {
            throw DimensionMismatch("POVM elements have inconsistent dimensions");
        }
        if (!e.element.allFinite()) {
            throw InvalidInput("POVM element has non-finite entries");
        }
        require_hermitian(e.element, tol.herm);
        if (!lies_in(e.point, space_)) {
            throw SpaceMismatch("outcome point does not lie in the declared outcome space");
        }
    }
    if (!allow_duplicates_ && has_duplicate_points()) {
        throw InvalidInput("duplicate outcome points require the duplicate flag");
    }
}

FinitePovm FinitePovm::labeled(std::vector<Operator> elements, const Tolerances &tol) {
    const auto space = OutcomeSpace::finite(std::max<std::size_t>(elements.size(), 1));
    std::vector<PovmEntry> entries;
    entries.reserve(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) {
        entries.push_back({Label{i}, std::move(elements[i])});
    }
    return FinitePovm(space, std::move(entries), false, tol);
}

bool FinitePovm::has_duplicate_points() const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            if (same_point(entries_[i].point, entries_[j].point)) {
                return true;
            }
        }
    }
    return false;
}

std::size_t FinitePovm::nonzero_count(double threshold) const {
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [&](const PovmEntry &e) {
        return e.element.trace().real() > threshold;
    }));
}

Operator FinitePovm::total() const {
    Operator sum = Operator::Zero(dim_, dim_);
    for (const auto &e : entries_) {
        sum += e.element;
    }
    return sum;
}

ValidationReport validate_povm(const FinitePovm &p, const Tolerances &tol) {
    ValidationReport report;
    report.psd_ok = true;
    report.worst_psd_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double lam = min_eigenvalue(p.element(i), tol.herm);
        report.psd_margins.push_back(lam);
        if (lam < report.worst_psd_margin) {
            report.worst_psd_margin = lam;
            report.worst_element = i;
        }
        if (lam < -tol.psd * (1 + p.element(i).norm())) {
            report.psd_ok = false;
            std::ostringstream msg;
            msg << "element " << i << " has eigenvalue " << lam;
            report.violations.push_back(msg.str());
        }
    }
    report.completeness_defect = (p.total() - Operator::Identity(p.dim(), p.dim())).norm();
    report.complete_ok = report.completeness_defect <= tol.complete;
    if (!report.complete_ok) {
        std::ostringstream msg;
        msg << "completeness defect " << report.completeness_defect;
        report.violations.push_back(msg.str());
    }
    report.duplicate_points = p.has_duplicate_points();
    report.passed = report.psd_ok && report.complete_ok;
    return report;
}

std::vector<double> born_probabilities(const FinitePovm &p, const DensityMatrix &rho, const Tolerances &tol) {
    if (rho.dim() != p.dim()) {
        throw DimensionMismatch("state and POVM dimensions differ");
    }
    std::vector<double> probs;
    probs.reserve(p.size());
    for (const auto &e : p.entries()) {
        const double v = trace_inner(rho.matrix(), e.element);
        if (v < -tol.psd * 10 || v > 1 + tol.psd * 10) {
            throw InvalidInput("Born probability outside [0, 1]; POVM is not valid");
        }
        probs.push_back(std::clamp(v, 0.0, 1.0));
    }
    return probs;
}

PovmDensityView density_view(const FinitePovm &p, const Tolerances &tol) {
    PovmDensityView view;
    view.weights.reserve(p.size());
    view.densities.reserve(p.size());
    for (const auto &e : p.entries()) {
        const double mu = e.element.trace().real();
        view.weights.push_back(mu);
        if (mu > tol.trace) {
            view.densities.emplace_back(e.element / mu);
        } else {
            view.densities.emplace_back(std::nullopt);
        }
    }
    return view;
}

double probability_of_region(const FinitePovm &p, const DensityMatrix &rho, const Region &r) {
    if (!(r.space() == p.space())) {
        throw SpaceMismatch("region and POVM live in different outcome spaces");
    }
    if (rho.dim() != p.dim()) {
        throw DimensionMismatch("state and POVM dimensions differ");
    }
    double total = 0.0;
    for (const auto &e : p.entries()) {
        if (r.contains(e.point)) {
            total += trace_inner(rho.matrix(), e.element);
        }
    }
    return total;
}

Ket spin_ket(const Direction &n) {
    const double z = std::clamp(n.z(), -1.0, 1.0);
    const double theta = std::acos(z);
    const double rho = std::hypot(n.x(), n.y());
    const double phi = rho == 0.0 ? 0.0 : std::atan2(n.y(), n.x());
    Ket k(2);
    k << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
    return k;
}

Operator spin_projector(const Direction &n) {
    using C = std::complex<double>;
    Operator p(2, 2);
    p << C(1 + n.z(), 0), C(n.x(), -n.y()), C(n.x(), n.y()), C(1 - n.z(), 0);
    return p / 2.0;
}

Eigen::Vector3d bloch_vector(const Operator &rho) {
    if (rho.rows() != 2 || rho.cols() != 2) {
        throw InvalidDimension("Bloch vector needs a qubit operator");
    }
    return {2 * rho(0, 1).real(), -2 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

FinitePovm computational_basis(Eigen::Index d) {
    check_dimension(d);
    std::vector<Operator> elements;
    for (Eigen::Index k = 0; k < d; ++k) {
        Operator e = Operator::Zero(d, d);
        e(k, k) = 1.0;
        elements.push_back(std::move(e));
    }
    return FinitePovm::labeled(std::move(elements));
}

std::vector<Direction> tetrahedron_vertices() {
    const double s = std::sqrt(2.0) / 3.0;
    const double t = std::sqrt(2.0 / 3.0);
    return {Direction(0, 0, 1), Direction(2 * s, 0, -1.0 / 3), Direction(-s, t, -1.0 / 3),
            Direction(-s, -t, -1.0 / 3)};
}

FinitePovm sic_tetrahedron() {
    std::vector<PovmEntry> entries;
    for (const auto &n : tetrahedron_vertices()) {
        entries.push_back({Direction(n.normalized()), spin_projector(n.normalized()) / 2.0});
    }
    return FinitePovm(OutcomeSpace::sphere(), std::move(entries));
}

} // namespace povm

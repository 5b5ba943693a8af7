#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "povm/operator_core.hpp"
#include "povm/outcome.hpp"
#include "povm/tolerances.hpp"

namespace povm {

/// A state: PSD, unit trace, Hermitian. Construction validates.
class DensityMatrix {
  public:
    explicit DensityMatrix(Operator op, const Tolerances &tol = {});

    static DensityMatrix pure(const Ket &psi);
    static DensityMatrix maximally_mixed(Eigen::Index d);
    /// Qubit state (I + r.sigma)/2, |r| <= 1.
    static DensityMatrix from_bloch(const Eigen::Vector3d &r);

    [[nodiscard]] const Operator &matrix() const { return op_; }
    [[nodiscard]] Eigen::Index dim() const { return op_.rows(); }

  private:
    Operator op_;
};

struct PovmEntry {
    OutcomePoint point;
    Operator element;
};

/// A POVM with finite support: outcome points omega_i in an outcome space,
/// each carrying a Hermitian element P_i. The constructor checks structure
/// (shape, Hermiticity, points in space, duplicate policy); positivity and
/// completeness are reported by validate_povm so that defective inputs can
/// still be inspected.
class FinitePovm {
  public:
    FinitePovm(OutcomeSpace space, std::vector<PovmEntry> entries, bool allow_duplicate_points = false,
               const Tolerances &tol = {});

    /// Elements labelled 0..N-1 on a finite label space.
    static FinitePovm labeled(std::vector<Operator> elements, const Tolerances &tol = {});

    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] const OutcomeSpace &space() const { return space_; }
    [[nodiscard]] const std::vector<PovmEntry> &entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] const Operator &element(std::size_t i) const { return entries_[i].element; }
    [[nodiscard]] const OutcomePoint &point(std::size_t i) const { return entries_[i].point; }
    [[nodiscard]] bool allows_duplicate_points() const { return allow_duplicates_; }
    [[nodiscard]] bool has_duplicate_points() const;

    /// Number of elements with trace above `threshold`.
    [[nodiscard]] std::size_t nonzero_count(double threshold = 1e-9) const;

    /// Sum of all elements.
    [[nodiscard]] Operator total() const;

  private:
    Eigen::Index dim_ = 0;
    OutcomeSpace space_;
    std::vector<PovmEntry> entries_;
    bool allow_duplicates_ = false;
};

struct ValidationReport {
    bool passed = false;
    bool psd_ok = false;
    bool complete_ok = false;
    std::vector<double> psd_margins;  ///< min eigenvalue per element
    double worst_psd_margin = 0.0;
    std::size_t worst_element = 0;
    double completeness_defect = 0.0; ///< ||sum P_i - I||_F
    bool duplicate_points = false;
    std::vector<std::string> violations;
};

ValidationReport validate_povm(const FinitePovm &p, const Tolerances &tol = {});

/// p_i = Tr[rho P_i], clamped to [0, 1].
std::vector<double> born_probabilities(const FinitePovm &p, const DensityMatrix &rho, const Tolerances &tol = {});

/// Trace weights mu_i = Tr[P_i] and unit-trace densities M_i = P_i / mu_i.
/// Elements with mu_i <= tol.trace have no density.
struct PovmDensityView {
    std::vector<double> weights;
    std::vector<std::optional<Operator>> densities;
};

PovmDensityView density_view(const FinitePovm &p, const Tolerances &tol = {});

/// sum over omega_i in r of Tr[rho P_i].
double probability_of_region(const FinitePovm &p, const DensityMatrix &rho, const Region &r);

// Qubit helpers. |n> = (cos(theta/2), e^{i phi} sin(theta/2)).
Ket spin_ket(const Direction &n);
/// |n><n| = (I + n.sigma)/2
Operator spin_projector(const Direction &n);
Eigen::Vector3d bloch_vector(const Operator &rho);

/// Orthonormal-basis projective measurement, labels 0..d-1.
FinitePovm computational_basis(Eigen::Index d);

/// Qubit SIC POVM: elements (I + n_i.sigma)/4 at the tetrahedron vertices n_i (sphere points).
FinitePovm sic_tetrahedron();

/// Tetrahedron vertices, the first along +z.
std::vector<Direction> tetrahedron_vertices();

} // namespace povm

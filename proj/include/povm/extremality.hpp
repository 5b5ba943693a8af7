#pragma once

// Extremality of finite POVMs and their decomposition into extremal ones.
//
// A finite POVM {P_i} is extremal iff it admits no nonzero perturbation
// {Q_i}: Hermitian, sum_i Q_i = 0, and P_i +- eps Q_i >= 0 for some eps > 0.
// At finite support the last condition is range(Q_i) subset range(P_i), so
// Q_i is parametrized by a Hermitian basis of the support of P_i and the
// admissible directions form the kernel of (Q_i) -> sum_i Q_i.

#include <cstddef>
#include <string>
#include <vector>

#include "povm/finite_povm.hpp"

namespace povm {

struct Perturbation {
    std::vector<Operator> components; ///< aligned with the POVM entries
};

/// Orthonormal basis of the admissible perturbations (sum of squared
/// Frobenius norms is 1 for each). Empty iff the POVM is extremal.
std::vector<Perturbation> perturbation_space(const FinitePovm &p, const Tolerances &tol = {});

bool is_extremal(const FinitePovm &p, const Tolerances &tol = {});

struct StepBounds {
    double plus = 0.0;  ///< sup { t >= 0 : P_i + t Q_i >= 0 for all i }
    double minus = 0.0; ///< sup { t >= 0 : P_i - t Q_i >= 0 for all i }
};

StepBounds max_step(const FinitePovm &p, const Perturbation &q, const Tolerances &tol = {});

/// P = weight_plus * plus + weight_minus * minus with plus = P + t+ Q and
/// minus = P - t- Q on the boundary of the POVM set.
struct Split {
    FinitePovm plus;
    FinitePovm minus;
    double weight_plus = 0.0;
    double weight_minus = 0.0;
    StepBounds step;
};

Split split(const FinitePovm &p, const Perturbation &q, const Tolerances &tol = {});

struct DecompositionTerm {
    double weight = 0.0;
    FinitePovm povm;
    std::string path; ///< split-tree path of the first leaf merged into this term, e.g. "+-"
};

struct DecompositionResult {
    std::vector<DecompositionTerm> terms;
    std::size_t depth = 0; ///< depth of the binary split tree
};

class TermBudgetExceeded : public Error {
  public:
    TermBudgetExceeded(const std::string &what, DecompositionResult partial)
        : Error(what), partial_(std::move(partial)) {}
    [[nodiscard]] std::string_view kind() const noexcept override { return "TermBudgetExceeded"; }
    [[nodiscard]] const DecompositionResult &partial() const { return partial_; }

  private:
    DecompositionResult partial_;
};

/// Convex decomposition into extremal POVMs by repeated boundary splits
/// along the first perturbation basis vector. Leaves with equal outcome
/// points and elements (within tol.merge) are merged. Terms are ordered by
/// split-tree path with "+" before "-".
DecompositionResult decompose_extremal(const FinitePovm &p, std::size_t max_terms = 4096,
                                       const Tolerances &tol = {});

/// Elementwise sum_j w_j P_i^(j).
std::vector<Operator> reconstruct(const DecompositionResult &result);

/// Sum over elements of rank on the support (eigenvalues above tol.rank_gap).
std::size_t total_support_rank(const FinitePovm &p, const Tolerances &tol = {});

} // namespace povm

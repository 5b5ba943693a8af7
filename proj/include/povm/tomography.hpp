#pragma once

// Dual data processing: outcome functions f_A with sum_i f_A(i) P_i = A (finite)
// or int mu(d omega) f_A(omega) M(omega) = A (named continuous families), so
// that the sample mean of f_A estimates Tr[rho A].

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "povm/continuous.hpp"
#include "povm/sampling.hpp"

namespace povm {

enum class DualKind { Finite, Spin, Phase };

struct DualProcessing {
    DualKind kind = DualKind::Finite;
    Operator target;
    std::vector<double> coefficients; ///< Finite: f_A(i) per POVM entry
    double a0 = 0.0;                  ///< Spin: A = a0 I + a.sigma, f_A(n) = a0 + 3 a.n
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    std::vector<std::complex<double>> toeplitz; ///< Phase: A_{m m'} = t_{m - m'}, k = 0..d-1
    double residual = 0.0;                      ///< ||reconstruction - A||_F (finite duals)

    /// f_A for a record: by apparatus index (finite) or outcome point (families).
    [[nodiscard]] double evaluate(const OutcomeRecord &record) const;
    [[nodiscard]] double evaluate_at(const OutcomePoint &omega) const;
};

bool is_informationally_complete(const FinitePovm &p, const Tolerances &tol = {});

/// Minimum-norm least-squares solution of sum_i f(i) P_i = A. Throws
/// NotInformationallyComplete unless the elements span the Hermitian space.
DualProcessing dual_coefficients(const FinitePovm &p, const Operator &target, const Tolerances &tol = {});

/// Closed-form dual for a named family. The phase family only reaches
/// Toeplitz targets; anything else raises NotInformationallyComplete.
DualProcessing dual_coefficients(const ContinuousPovm &c, const Operator &target, const Tolerances &tol = {});

/// Quadrature of int mu(d omega) f_A(omega) M(omega) for a family dual.
Operator dual_reconstruction(const ContinuousPovm &c, const DualProcessing &dual, std::size_t nodes = 64);

struct EstimateReport {
    double estimate = 0.0;
    double std_error = 0.0; ///< sample standard deviation / sqrt(n)
    std::optional<double> exact;
    std::size_t n = 0;
};

EstimateReport estimate_expectation(std::span<const OutcomeRecord> records, const DualProcessing &dual,
                                    const std::optional<DensityMatrix> &rho_exact = std::nullopt);

} // namespace povm

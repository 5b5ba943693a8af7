#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "povm/continuous.hpp"

namespace povm {

/// One simulated measurement outcome. Two-stage records carry the mixing
/// parameter x and the apparatus index i; direct records carry only omega.
struct OutcomeRecord {
    std::optional<OutcomePoint> x;
    std::optional<std::size_t> index;
    OutcomePoint omega;
};

/// I.i.d. outcomes from the exact outcome density of a named family:
/// inverse-CDF in cos(theta) about the Bloch axis for spin, bisection on
/// the closed-form CDF for phase.
std::vector<OutcomeRecord> sample_direct(const ContinuousPovm &c, const DensityMatrix &rho, std::size_t n,
                                         std::uint64_t seed);

/// Draw x from the mixing distribution, measure E^(x) by the Born rule,
/// report the outcome point of the observed index.
std::vector<OutcomeRecord> sample_two_stage(const RandomizedScheme &s, const DensityMatrix &rho, std::size_t n,
                                            std::uint64_t seed);

/// Born-rule sampling of a single finite POVM (x absent).
std::vector<OutcomeRecord> sample_finite(const FinitePovm &p, const DensityMatrix &rho, std::size_t n,
                                         std::uint64_t seed);

/// Spin-direction CDF of u = n.a for Bloch length r: (u+1)/2 + r (u^2-1)/4.
double spin_axial_cdf(double u, double bloch_length);
/// Inverse of spin_axial_cdf.
double spin_axial_quantile(double uniform, double bloch_length);

/// Phase outcome CDF F(phi) = int_0^phi <t|rho|t> dt / 2pi, phi in [0, 2pi].
double phase_cdf(const DensityMatrix &rho, double phi);

struct GofReport {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::string bin_spec;
    std::vector<std::size_t> counts_a;
    std::vector<std::size_t> counts_b;
};

/// Two-sample chi-square over a disjoint partition; p-value from the
/// regularized upper incomplete gamma function. Throws SparseBins when an
/// expected count falls below 5.
GofReport compare_samples(std::span<const OutcomeRecord> a, std::span<const OutcomeRecord> b,
                          std::span<const Region> bins, std::string bin_spec = "custom");

} // namespace povm

#pragma once

// The two continuous-outcome families (spin direction on the sphere and
// covariant phase on the circle), their closed-form region operators, and
// randomized schemes: a mixing distribution over a parameter x together with
// a map x -> finite POVM whose classical average reproduces a continuous POVM.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "povm/finite_povm.hpp"
#include "povm/rng.hpp"

namespace povm {

enum class Family { SpinDirection, Phase };

/// P(B) = int_B mu(d omega) M(omega) with unit-trace density M.
///  - spin direction (d = 2, sphere): M(n) = |n><n|, mu = dn / 2pi
///  - phase (d >= 2, circle):          M(phi) = |phi><phi| / d, mu = d dphi / 2pi,
///    |phi> = sum_n e^{i n phi} |n> (unnormalized, <phi|phi> = d)
class ContinuousPovm {
  public:
    static ContinuousPovm spin_direction();
    static ContinuousPovm phase(Eigen::Index d);

    [[nodiscard]] Family family() const { return family_; }
    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] OutcomeSpace space() const;
    [[nodiscard]] std::string name() const;

    [[nodiscard]] Operator density(const OutcomePoint &omega) const;

    /// Base measure of the whole outcome space (equals d).
    [[nodiscard]] double total_measure() const { return static_cast<double>(dim_); }

    /// Closed-form P(B).
    [[nodiscard]] Operator region_operator(const Region &region) const;
    [[nodiscard]] double region_probability(const DensityMatrix &rho, const Region &region) const;

    /// Quadrature of mu(d omega) M(omega) over the whole space; approximates I.
    [[nodiscard]] Operator quadrature_total(std::size_t nodes = 64) const;

  private:
    ContinuousPovm(Family f, Eigen::Index d) : family_(f), dim_(d) {}
    Family family_;
    Eigen::Index dim_;
};

/// |phi> = sum_{n<d} e^{i n phi} |n>, not normalized.
Ket phase_ket(Eigen::Index d, double phi);

enum class MixingKind { Sphere, Circle, Finite };

/// A classical randomization over finite POVMs E^(x).
///
/// Sphere mixing is uniform (density 1/4pi); circle mixing is uniform on
/// [0, period); finite mixing has explicit weights. For sphere and circle
/// mixing the scheme also records how each outcome slot i moves with x:
/// omega_i(x) = R_i x on the sphere (R_i orthogonal) and omega_i(x) = x + o_i
/// on the circle. This lets region probabilities be integrated exactly over
/// the pulled-back region.
class RandomizedScheme {
  public:
    using MemberMap = std::function<FinitePovm(const OutcomePoint &)>;

    static RandomizedScheme over_sphere(std::string name, Eigen::Index dim, OutcomeSpace outcome_space,
                                        MemberMap members, std::vector<Eigen::Matrix3d> slot_maps);
    static RandomizedScheme over_circle(std::string name, Eigen::Index dim, OutcomeSpace outcome_space,
                                        MemberMap members, std::vector<double> slot_offsets, double period);
    static RandomizedScheme finite_mixture(std::string name, std::vector<double> weights,
                                           std::vector<FinitePovm> members);

    [[nodiscard]] const std::string &name() const { return name_; }
    [[nodiscard]] MixingKind mixing() const { return mixing_; }
    [[nodiscard]] OutcomeSpace parameter_space() const;
    [[nodiscard]] const OutcomeSpace &outcome_space() const { return outcome_space_; }
    [[nodiscard]] Eigen::Index dim() const { return dim_; }

    [[nodiscard]] FinitePovm member(const OutcomePoint &x) const;
    [[nodiscard]] OutcomePoint sample_parameter(CounterRng &rng) const;

    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] const std::vector<Eigen::Matrix3d> &slot_maps() const { return slot_maps_; }
    [[nodiscard]] const std::vector<double> &slot_offsets() const { return slot_offsets_; }
    [[nodiscard]] const std::vector<double> &weights() const { return weights_; }
    [[nodiscard]] const std::vector<FinitePovm> &finite_members() const { return finite_members_; }

  private:
    RandomizedScheme() = default;

    std::string name_;
    MixingKind mixing_ = MixingKind::Finite;
    Eigen::Index dim_ = 0;
    OutcomeSpace outcome_space_;
    MemberMap members_;
    std::vector<Eigen::Matrix3d> slot_maps_;
    std::vector<double> slot_offsets_;
    double period_ = kTwoPi;
    std::vector<double> weights_;
    std::vector<FinitePovm> finite_members_;
};

/// Stern-Gerlach along a uniformly random axis n: E^(n) has entries
/// (+n, |n><n|), (-n, |-n><-n|) and two zero elements at +n and -n.
RandomizedScheme stern_gerlach_scheme();

/// E^(phi) = (1/d) sum_n chi_B(phi_n + phi) |phi_n + phi><phi_n + phi|,
/// phi_n = 2 pi n / d. The default mixes over one period [0, 2pi/d); with
/// `unfolded` the mixing is uniform over [0, 2pi).
RandomizedScheme phase_scheme(Eigen::Index d, bool unfolded = false);

/// Deterministic scheme average of Tr[rho E^(x)(B)] for each state.
/// `budget` is the number of Gauss-Legendre nodes per direction (the sphere
/// azimuth gets 2 * budget trapezoid nodes).
std::vector<double> scheme_region_probabilities(const RandomizedScheme &scheme,
                                                std::span<const DensityMatrix> states, const Region &region,
                                                std::size_t budget = 64);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

std::vector<MonteCarloEstimate> scheme_region_probabilities_mc(const RandomizedScheme &scheme,
                                                               std::span<const DensityMatrix> states,
                                                               const Region &region, std::size_t samples,
                                                               std::uint64_t seed);

enum class EquivalenceMode { Deterministic, MonteCarlo };

struct EquivalenceRow {
    std::size_t state = 0;
    std::size_t region = 0;
    double p_continuous = 0.0;
    double p_scheme = 0.0;
    double diff = 0.0;
    double std_error = 0.0; ///< zero in deterministic mode
};

struct EquivalenceReport {
    EquivalenceMode mode = EquivalenceMode::Deterministic;
    std::size_t budget = 0;
    std::vector<EquivalenceRow> rows;
    double max_diff = 0.0;
    double max_std_error = 0.0;
};

EquivalenceReport verify_scheme_equivalence(const ContinuousPovm &c, const RandomizedScheme &s,
                                            std::span<const DensityMatrix> states, std::span<const Region> regions,
                                            EquivalenceMode mode = EquivalenceMode::Deterministic,
                                            std::size_t budget = 64, std::uint64_t seed = 0);

} // namespace povm

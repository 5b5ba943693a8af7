#pragma once

// Bayes gains of measurements and the equal-optimality check for the
// members of a randomized scheme.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "povm/continuous.hpp"
#include "povm/extremality.hpp"

namespace povm {

enum class Prior { UniformSphere, UniformCircle };
enum class Gain { Fidelity, Cosine };

/// Uniform prior over a true parameter m with the pure probe state rho_m:
///  - UniformSphere / Fidelity: rho_m = |m><m|, g(m, n) = |<m|n>|^2 = (1 + m.n)/2
///  - UniformCircle / Cosine:   rho_t = |t><t|/d, g(t, phi) = (1 + cos(t - phi))/2
/// `nodes` sets the quadrature order (Gauss-Legendre nodes in cos(theta);
/// the azimuth and the circle use 2 * nodes trapezoid nodes).
struct BayesGainSpec {
    Prior prior = Prior::UniformSphere;
    Gain gain = Gain::Fidelity;
    std::size_t nodes = 16;
};

/// int prior(dm) sum_i Tr[rho_m P_i] g(m, omega_i)
double bayes_gain(const FinitePovm &p, const BayesGainSpec &spec);

/// int prior(dm) int mu(d omega) Tr[rho_m M(omega)] g(m, omega)
double bayes_gain(const ContinuousPovm &c, const BayesGainSpec &spec);

struct MemberMerit {
    OutcomePoint x;
    double value = 0.0;
};

struct MeritReport {
    double value = 0.0; ///< mixing average (quadrature) of member values
    std::vector<MemberMerit> per_member;
    double spread = 0.0; ///< max - min over per_member
    bool passed = true;
};

using FigureOfMerit = std::function<double(const FinitePovm &)>;

/// Evaluates the figure at quadrature nodes of the mixing distribution and at
/// `x_samples` random draws; passes iff the spread is at most `tol`.
MeritReport check_equal_optimality(const RandomizedScheme &s, const FigureOfMerit &merit, std::size_t x_samples,
                                   double tol, std::uint64_t seed = 0);
MeritReport check_equal_optimality(const RandomizedScheme &s, const BayesGainSpec &spec, std::size_t x_samples,
                                   double tol, std::uint64_t seed = 0);

/// sum_j w_j F[povm_j]; per_member are the leaf values labelled by term index.
MeritReport merit_of_mixture(const DecompositionResult &terms, const BayesGainSpec &spec);

} // namespace povm

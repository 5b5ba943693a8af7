#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "povm/outcome.hpp"

namespace povm {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
Rule1D gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// n equally spaced nodes on [start, start + length) with weight length / n.
/// Exact for trigonometric polynomials of degree < n over a full period.
Rule1D periodic_trapezoid(std::size_t n, double start = 0.0, double length = kTwoPi);

struct SphereNode {
    Direction n;
    double weight; ///< area element; weights over the whole sphere sum to 4 pi
};

/// Product rule on a patch: Gauss-Legendre in z (z_nodes) times the periodic
/// trapezoid (full azimuth) or Gauss-Legendre (sector) in phi (phi_nodes).
std::vector<SphereNode> patch_rule(const SpherePatch &patch, std::size_t z_nodes, std::size_t phi_nodes);

/// Whole-sphere product rule.
std::vector<SphereNode> sphere_rule(std::size_t z_nodes, std::size_t phi_nodes);

/// Pairwise (cascade) summation; fixed order, so results are reproducible.
double pairwise_sum(std::span<const double> values);

} // namespace povm

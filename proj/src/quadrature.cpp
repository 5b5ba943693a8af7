#include "povm/quadrature.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "povm/errors.hpp"

namespace povm {

Rule1D gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) {
        throw InvalidInput("quadrature needs at least one node");
    }
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 1; k < m; ++k) {
        const double kk = static_cast<double>(k);
        const double beta = kk / std::sqrt(4.0 * kk * kk - 1.0);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half = (b - a) / 2.0;
    const double mid = (a + b) / 2.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        const double v = solver.eigenvectors()(0, k);
        rule.nodes[static_cast<std::size_t>(k)] = mid + half * solver.eigenvalues()(k);
        rule.weights[static_cast<std::size_t>(k)] = 2.0 * v * v * half;
    }
    return rule;
}

Rule1D periodic_trapezoid(std::size_t n, double start, double length) {
    if (n == 0) {
        throw InvalidInput("quadrature needs at least one node");
    }
    Rule1D rule;
    const double h = length / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        rule.nodes.push_back(start + h * static_cast<double>(k));
        rule.weights.push_back(h);
    }
    return rule;
}

std::vector<SphereNode> patch_rule(const SpherePatch &patch, std::size_t z_nodes, std::size_t phi_nodes) {
    if (patch.z_hi <= patch.z_lo) {
        return {};
    }
    const Rule1D z_rule = gauss_legendre(z_nodes, patch.z_lo, patch.z_hi);
    const Rule1D phi_rule = patch.full_azimuth() ? periodic_trapezoid(phi_nodes, 0.0, kTwoPi)
                                                 : gauss_legendre(phi_nodes, patch.phi_lo, patch.phi_lo + patch.phi_len);
    std::vector<SphereNode> out;
    out.reserve(z_nodes * phi_nodes);
    for (std::size_t i = 0; i < z_rule.nodes.size(); ++i) {
        const double z = z_rule.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (std::size_t j = 0; j < phi_rule.nodes.size(); ++j) {
            const double phi = phi_rule.nodes[j];
            const Eigen::Vector3d local(s * std::cos(phi), s * std::sin(phi), z);
            out.push_back({(patch.frame * local).normalized(), z_rule.weights[i] * phi_rule.weights[j]});
        }
    }
    return out;
}

std::vector<SphereNode> sphere_rule(std::size_t z_nodes, std::size_t phi_nodes) {
    return patch_rule(SpherePatch{}, z_nodes, phi_nodes);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (const double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace povm

#include "povm/merit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "povm/quadrature.hpp"

namespace povm {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_spec(const BayesGainSpec &spec, const OutcomeSpace &space, Eigen::Index dim) {
    if (spec.nodes == 0) {
        throw InvalidInput("Bayes gain quadrature needs at least one node");
    }
    if (spec.prior == Prior::UniformSphere) {
        if (spec.gain != Gain::Fidelity) {
            throw InvalidInput("the uniform sphere prior pairs with the fidelity gain");
        }
        if (!(space == OutcomeSpace::sphere())) {
            throw SpaceMismatch("sphere prior needs outcomes on the sphere");
        }
        if (dim != 2) {
            throw InvalidDimension("sphere prior uses qubit probe states");
        }
    } else {
        if (spec.gain != Gain::Cosine) {
            throw InvalidInput("the uniform circle prior pairs with the cosine gain");
        }
        if (!(space == OutcomeSpace::circle())) {
            throw SpaceMismatch("circle prior needs outcomes on the circle");
        }
    }
}

std::size_t circle_nodes(const BayesGainSpec &spec, Eigen::Index dim) {
    return std::max<std::size_t>(2 * spec.nodes, 4 * static_cast<std::size_t>(dim) + 4);
}

Operator phase_probe(Eigen::Index d, double t) {
    const Ket k = phase_ket(d, t);
    return k * k.adjoint() / static_cast<double>(d);
}

double phase_gain(double t, double phi) { return 0.5 * (1.0 + std::cos(t - phi)); }

MeritReport summarize(std::vector<MemberMerit> members, double value, double tol) {
    MeritReport report;
    report.value = value;
    if (!members.empty()) {
        const auto [lo, hi] = std::minmax_element(members.begin(), members.end(),
                                                  [](const auto &a, const auto &b) { return a.value < b.value; });
        report.spread = hi->value - lo->value;
    }
    report.per_member = std::move(members);
    report.passed = report.spread <= tol;
    return report;
}

} // namespace

double bayes_gain(const FinitePovm &p, const BayesGainSpec &spec) {
    check_spec(spec, p.space(), p.dim());
    std::vector<double> terms;
    if (spec.prior == Prior::UniformSphere) {
        for (const auto &node : sphere_rule(spec.nodes, 2 * spec.nodes)) {
            const Operator probe = spin_projector(node.n);
            double inner = 0.0;
            for (const auto &e : p.entries()) {
                const auto &omega = std::get<Direction>(e.point);
                inner += trace_inner(probe, e.element) * 0.5 * (1.0 + node.n.dot(omega));
            }
            terms.push_back(node.weight / kFourPi * inner);
        }
    } else {
        const auto rule = periodic_trapezoid(circle_nodes(spec, p.dim()));
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const Operator probe = phase_probe(p.dim(), rule.nodes[j]);
            double inner = 0.0;
            for (const auto &e : p.entries()) {
                inner += trace_inner(probe, e.element) * phase_gain(rule.nodes[j], std::get<Angle>(e.point).radians);
            }
            terms.push_back(rule.weights[j] / kTwoPi * inner);
        }
    }
    return pairwise_sum(terms);
}

double bayes_gain(const ContinuousPovm &c, const BayesGainSpec &spec) {
    check_spec(spec, c.space(), c.dim());
    std::vector<double> terms;
    if (spec.prior == Prior::UniformSphere) {
        const auto rule = sphere_rule(spec.nodes, 2 * spec.nodes);
        std::vector<Operator> densities;
        densities.reserve(rule.size());
        for (const auto &node : rule) {
            densities.push_back(c.density(node.n));
        }
        for (const auto &outer : rule) {
            const Operator probe = spin_projector(outer.n);
            double inner = 0.0;
            for (std::size_t k = 0; k < rule.size(); ++k) {
                inner += rule[k].weight / kTwoPi * trace_inner(probe, densities[k]) * 0.5 *
                         (1.0 + outer.n.dot(rule[k].n));
            }
            terms.push_back(outer.weight / kFourPi * inner);
        }
    } else {
        const auto rule = periodic_trapezoid(circle_nodes(spec, c.dim()));
        const double d = static_cast<double>(c.dim());
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const Operator probe = phase_probe(c.dim(), rule.nodes[j]);
            double inner = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const Operator m = c.density(make_angle(rule.nodes[k]));
                inner += d * rule.weights[k] / kTwoPi * trace_inner(probe, m) *
                         phase_gain(rule.nodes[j], rule.nodes[k]);
            }
            terms.push_back(rule.weights[j] / kTwoPi * inner);
        }
    }
    return pairwise_sum(terms);
}

MeritReport check_equal_optimality(const RandomizedScheme &s, const FigureOfMerit &merit, std::size_t x_samples,
                                   double tol, std::uint64_t seed) {
    std::vector<MemberMerit> members;
    std::vector<double> weighted;
    switch (s.mixing()) {
    case MixingKind::Sphere:
        for (const auto &node : sphere_rule(4, 8)) {
            const double v = merit(s.member(node.n));
            members.push_back({node.n, v});
            weighted.push_back(node.weight / kFourPi * v);
        }
        break;
    case MixingKind::Circle: {
        const auto rule = gauss_legendre(16, 0.0, s.period());
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const Angle x = make_angle(rule.nodes[j]);
            const double v = merit(s.member(x));
            members.push_back({x, v});
            weighted.push_back(rule.weights[j] / s.period() * v);
        }
        break;
    }
    case MixingKind::Finite:
        for (std::size_t j = 0; j < s.weights().size(); ++j) {
            const double v = merit(s.finite_members()[j]);
            members.push_back({Label{j}, v});
            weighted.push_back(s.weights()[j] * v);
        }
        break;
    }
    CounterRng rng(seed);
    for (std::size_t k = 0; k < x_samples; ++k) {
        OutcomePoint x = s.sample_parameter(rng);
        const double v = merit(s.member(x));
        members.push_back({std::move(x), v});
    }
    return summarize(std::move(members), pairwise_sum(weighted), tol);
}

MeritReport check_equal_optimality(const RandomizedScheme &s, const BayesGainSpec &spec, std::size_t x_samples,
                                   double tol, std::uint64_t seed) {
    return check_equal_optimality(
        s, [&spec](const FinitePovm &p) { return bayes_gain(p, spec); }, x_samples, tol, seed);
}

MeritReport merit_of_mixture(const DecompositionResult &terms, const BayesGainSpec &spec) {
    std::vector<MemberMerit> members;
    std::vector<double> weighted;
    for (std::size_t j = 0; j < terms.terms.size(); ++j) {
        const double v = bayes_gain(terms.terms[j].povm, spec);
        members.push_back({Label{j}, v});
        weighted.push_back(terms.terms[j].weight * v);
    }
    auto report = summarize(std::move(members), pairwise_sum(weighted), std::numeric_limits<double>::infinity());
    return report;
}

} // namespace povm

#include "povm/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "povm/quadrature.hpp"

namespace povm {

namespace {

constexpr double kPi = std::numbers::pi;

// int sqrt(1 - z^2) dz
double half_disc_antiderivative(double z) {
    z = std::clamp(z, -1.0, 1.0);
    return 0.5 * (z * std::sqrt(1.0 - z * z) + std::asin(z));
}

// (area, int_patch n dn) for a patch, moment in world coordinates.
std::pair<double, Eigen::Vector3d> patch_moments(const SpherePatch &p) {
    const double z0 = p.z_lo;
    const double z1 = p.z_hi;
    const double len = std::min(p.phi_len, kTwoPi);
    const double area = (z1 - z0) * len;
    const double disc = half_disc_antiderivative(z1) - half_disc_antiderivative(z0);
    Eigen::Vector3d local = Eigen::Vector3d::Zero();
    if (!p.full_azimuth()) {
        local.x() = disc * (std::sin(p.phi_lo + len) - std::sin(p.phi_lo));
        local.y() = disc * (std::cos(p.phi_lo) - std::cos(p.phi_lo + len));
    }
    local.z() = len * (z1 * z1 - z0 * z0) / 2.0;
    return {area, p.frame * local};
}

Operator pauli_combination(double scalar, const Eigen::Vector3d &v) {
    Operator op = scalar * Operator::Identity(2, 2);
    for (int k = 0; k < 3; ++k) {
        op += v(k) * pauli<double>(k);
    }
    return op;
}

// int_a^b dphi/2pi |phi><phi|
Operator phase_arc_operator(Eigen::Index d, double a, double b) {
    Operator op(d, d);
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index mp = 0; mp < d; ++mp) {
            const auto k = static_cast<double>(m - mp);
            if (m == mp) {
                op(m, mp) = (b - a) / kTwoPi;
            } else {
                const std::complex<double> num = std::polar(1.0, k * b) - std::polar(1.0, k * a);
                op(m, mp) = num / (std::complex<double>(0.0, k) * kTwoPi);
            }
        }
    }
    return op;
}

void require_space(const Region &r, const OutcomeSpace &space) {
    if (!(r.space() == space)) {
        throw SpaceMismatch("region does not live in the expected outcome space");
    }
}

void require_states(std::span<const DensityMatrix> states, Eigen::Index d) {
    for (const auto &rho : states) {
        if (rho.dim() != d) {
            throw DimensionMismatch("state dimension does not match the measurement");
        }
    }
}

// Checks that member outcome points move with x as the slot maps say.
void check_slot_maps(const RandomizedScheme &s) {
    if (s.mixing() == MixingKind::Sphere) {
        const Direction x = Eigen::Vector3d(0.3, -0.5, 0.81).normalized();
        const auto m = s.member(x);
        if (m.size() != s.slot_maps().size()) {
            throw InvalidInput("scheme slot maps do not match the member size");
        }
        for (std::size_t k = 0; k < m.size(); ++k) {
            const auto &pt = std::get<Direction>(m.point(k));
            if ((s.slot_maps()[k] * x - pt).norm() > 1e-12) {
                throw InvalidInput("scheme slot maps disagree with member outcome points");
            }
        }
    } else if (s.mixing() == MixingKind::Circle) {
        const double x = 0.37 * s.period();
        const auto m = s.member(Angle{x});
        if (m.size() != s.slot_offsets().size()) {
            throw InvalidInput("scheme slot offsets do not match the member size");
        }
        for (std::size_t k = 0; k < m.size(); ++k) {
            const double expected = wrap_angle(x + s.slot_offsets()[k]);
            double gap = std::abs(std::get<Angle>(m.point(k)).radians - expected);
            gap = std::min(gap, kTwoPi - gap);
            if (gap > 1e-12) {
                throw InvalidInput("scheme slot offsets disagree with member outcome points");
            }
        }
    }
}

// Pieces of { x in [0, period) : x + offset in arc }.
std::vector<std::pair<double, double>> pulled_back_intervals(const Arc &arc, double offset, double period) {
    std::vector<std::pair<double, double>> out;
    const double u = wrap_angle(arc.start - offset);
    for (const double shift : {-kTwoPi, 0.0}) {
        const double lo = std::max(0.0, u + shift);
        const double hi = std::min(period, u + shift + arc.length);
        if (hi > lo) {
            out.emplace_back(lo, hi);
        }
    }
    return out;
}

} // namespace

ContinuousPovm ContinuousPovm::spin_direction() { return ContinuousPovm(Family::SpinDirection, 2); }

ContinuousPovm ContinuousPovm::phase(Eigen::Index d) {
    if (d < 2 || d > kMaxDimension) {
        throw InvalidDimension("phase POVM needs 2 <= d <= 16");
    }
    return ContinuousPovm(Family::Phase, d);
}

OutcomeSpace ContinuousPovm::space() const {
    return family_ == Family::SpinDirection ? OutcomeSpace::sphere() : OutcomeSpace::circle();
}

std::string ContinuousPovm::name() const { return family_ == Family::SpinDirection ? "spin_direction" : "phase"; }

Ket phase_ket(Eigen::Index d, double phi) {
    Ket k(d);
    for (Eigen::Index n = 0; n < d; ++n) {
        k(n) = std::polar(1.0, static_cast<double>(n) * phi);
    }
    return k;
}

Operator ContinuousPovm::density(const OutcomePoint &omega) const {
    if (!lies_in(omega, space())) {
        throw SpaceMismatch("outcome point does not lie in the family's outcome space");
    }
    if (family_ == Family::SpinDirection) {
        return spin_projector(std::get<Direction>(omega));
    }
    const Ket k = phase_ket(dim_, std::get<Angle>(omega).radians);
    return k * k.adjoint() / static_cast<double>(dim_);
}

Operator ContinuousPovm::region_operator(const Region &region) const {
    require_space(region, space());
    Operator op = Operator::Zero(dim_, dim_);
    if (family_ == Family::SpinDirection) {
        double area = 0.0;
        Eigen::Vector3d moment = Eigen::Vector3d::Zero();
        for (const auto &p : region.patch_list()) {
            const auto [a, m] = patch_moments(p);
            area += a;
            moment += m;
        }
        op = pauli_combination(area, moment) / (4.0 * kPi);
    } else {
        for (const auto &arc : region.arc_list()) {
            op += phase_arc_operator(dim_, arc.start, arc.start + arc.length);
        }
    }
    if (region.complemented()) {
        op = Operator::Identity(dim_, dim_) - op;
    }
    return op;
}

double ContinuousPovm::region_probability(const DensityMatrix &rho, const Region &region) const {
    if (rho.dim() != dim_) {
        throw DimensionMismatch("state dimension does not match the measurement");
    }
    return trace_inner(rho.matrix(), region_operator(region));
}

Operator ContinuousPovm::quadrature_total(std::size_t nodes) const {
    Operator sum = Operator::Zero(dim_, dim_);
    if (family_ == Family::SpinDirection) {
        for (const auto &node : sphere_rule(nodes, 2 * nodes)) {
            sum += (node.weight / kTwoPi) * density(node.n);
        }
    } else {
        const auto rule = periodic_trapezoid(std::max<std::size_t>(nodes, 2 * static_cast<std::size_t>(dim_)));
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            sum += (static_cast<double>(dim_) * rule.weights[j] / kTwoPi) * density(make_angle(rule.nodes[j]));
        }
    }
    return sum;
}

RandomizedScheme RandomizedScheme::over_sphere(std::string name, Eigen::Index dim, OutcomeSpace outcome_space,
                                               MemberMap members, std::vector<Eigen::Matrix3d> slot_maps) {
    RandomizedScheme s;
    s.name_ = std::move(name);
    s.mixing_ = MixingKind::Sphere;
    s.dim_ = dim;
    s.outcome_space_ = outcome_space;
    s.members_ = std::move(members);
    s.slot_maps_ = std::move(slot_maps);
    return s;
}

RandomizedScheme RandomizedScheme::over_circle(std::string name, Eigen::Index dim, OutcomeSpace outcome_space,
                                               MemberMap members, std::vector<double> slot_offsets, double period) {
    if (!(period > 0.0 && period <= kTwoPi)) {
        throw InvalidInput("circle mixing period must lie in (0, 2pi]");
    }
    RandomizedScheme s;
    s.name_ = std::move(name);
    s.mixing_ = MixingKind::Circle;
    s.dim_ = dim;
    s.outcome_space_ = outcome_space;
    s.members_ = std::move(members);
    s.slot_offsets_ = std::move(slot_offsets);
    s.period_ = period;
    return s;
}

RandomizedScheme RandomizedScheme::finite_mixture(std::string name, std::vector<double> weights,
                                                  std::vector<FinitePovm> members) {
    if (weights.empty() || weights.size() != members.size()) {
        throw InvalidInput("finite mixture needs one weight per member");
    }
    double total = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0)) {
            throw InvalidInput("mixture weights must be nonnegative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidInput("mixture weights must sum to 1");
    }
    for (const auto &m : members) {
        if (m.dim() != members.front().dim() || !(m.space() == members.front().space())) {
            throw DimensionMismatch("mixture members differ in dimension or outcome space");
        }
    }
    RandomizedScheme s;
    s.name_ = std::move(name);
    s.mixing_ = MixingKind::Finite;
    s.dim_ = members.front().dim();
    s.outcome_space_ = members.front().space();
    s.weights_ = std::move(weights);
    s.finite_members_ = std::move(members);
    return s;
}

OutcomeSpace RandomizedScheme::parameter_space() const {
    switch (mixing_) {
    case MixingKind::Sphere:
        return OutcomeSpace::sphere();
    case MixingKind::Circle:
        return OutcomeSpace::circle();
    case MixingKind::Finite:
        break;
    }
    return OutcomeSpace::finite(weights_.size());
}

FinitePovm RandomizedScheme::member(const OutcomePoint &x) const {
    if (!lies_in(x, parameter_space())) {
        throw SpaceMismatch("parameter does not lie in the scheme's parameter space");
    }
    if (mixing_ == MixingKind::Finite) {
        return finite_members_[std::get<Label>(x).index];
    }
    return members_(x);
}

OutcomePoint RandomizedScheme::sample_parameter(CounterRng &rng) const {
    switch (mixing_) {
    case MixingKind::Sphere: {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double phi = kTwoPi * rng.uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        return Direction(Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), z).normalized());
    }
    case MixingKind::Circle:
        return make_angle(period_ * rng.uniform());
    case MixingKind::Finite:
        break;
    }
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        acc += weights_[j];
        if (u < acc) {
            return Label{j};
        }
    }
    // u landed in the rounding gap above the last cumulative weight
    for (std::size_t j = weights_.size(); j-- > 0;) {
        if (weights_[j] > 0) {
            return Label{j};
        }
    }
    return Label{0};
}

RandomizedScheme stern_gerlach_scheme() {
    auto members = [](const OutcomePoint &x) {
        const Direction n = std::get<Direction>(x);
        const Direction minus = -n;
        const Operator zero = Operator::Zero(2, 2);
        std::vector<PovmEntry> entries{
            {n, spin_projector(n)}, {minus, spin_projector(minus)}, {n, zero}, {minus, zero}};
        return FinitePovm(OutcomeSpace::sphere(), std::move(entries), true);
    };
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    return RandomizedScheme::over_sphere("stern_gerlach", 2, OutcomeSpace::sphere(), members, {id, -id, id, -id});
}

RandomizedScheme phase_scheme(Eigen::Index d, bool unfolded) {
    if (d < 2 || d > kMaxDimension) {
        throw InvalidDimension("phase scheme needs 2 <= d <= 16");
    }
    std::vector<double> offsets;
    for (Eigen::Index n = 0; n < d; ++n) {
        offsets.push_back(kTwoPi * static_cast<double>(n) / static_cast<double>(d));
    }
    auto members = [d, offsets](const OutcomePoint &x) {
        const double phi = std::get<Angle>(x).radians;
        std::vector<PovmEntry> entries;
        entries.reserve(static_cast<std::size_t>(d));
        for (const double o : offsets) {
            const Ket k = phase_ket(d, phi + o);
            entries.push_back({make_angle(phi + o), k * k.adjoint() / static_cast<double>(d)});
        }
        return FinitePovm(OutcomeSpace::circle(), std::move(entries), true);
    };
    const double period = unfolded ? kTwoPi : kTwoPi / static_cast<double>(d);
    return RandomizedScheme::over_circle(unfolded ? "phase_unfolded" : "phase", d, OutcomeSpace::circle(), members,
                                         offsets, period);
}

std::vector<double> scheme_region_probabilities(const RandomizedScheme &scheme,
                                                std::span<const DensityMatrix> states, const Region &region,
                                                std::size_t budget) {
    require_space(region, scheme.outcome_space());
    require_states(states, scheme.dim());
    std::vector<double> out(states.size(), 0.0);

    if (scheme.mixing() == MixingKind::Finite) {
        for (std::size_t s = 0; s < states.size(); ++s) {
            std::vector<double> terms;
            for (std::size_t j = 0; j < scheme.weights().size(); ++j) {
                terms.push_back(scheme.weights()[j] *
                                probability_of_region(scheme.finite_members()[j], states[s], region));
            }
            out[s] = pairwise_sum(terms);
        }
        return out;
    }
    check_slot_maps(scheme);

    // contributions[s] collects signed node terms in a fixed order.
    std::vector<std::vector<double>> contributions(states.size());
    auto accumulate = [&](const OutcomePoint &x, std::size_t slot, double weight) {
        const auto m = scheme.member(x);
        const Operator &e = m.element(slot);
        if (e.squaredNorm() == 0.0) {
            return;
        }
        for (std::size_t s = 0; s < states.size(); ++s) {
            contributions[s].push_back(weight * trace_inner(states[s].matrix(), e));
        }
    };

    if (scheme.mixing() == MixingKind::Sphere) {
        const double density = 1.0 / (4.0 * std::numbers::pi);
        const double sign = region.complemented() ? -1.0 : 1.0;
        for (std::size_t k = 0; k < scheme.slot_maps().size(); ++k) {
            const Eigen::Matrix3d &map = scheme.slot_maps()[k];
            if (region.complemented()) {
                for (const auto &node : sphere_rule(budget, 2 * budget)) {
                    accumulate(node.n, k, node.weight * density);
                }
            }
            for (const auto &piece : region.patch_list()) {
                SpherePatch pulled = piece;
                pulled.frame = map.transpose() * piece.frame;
                for (const auto &node : patch_rule(pulled, budget, pulled.full_azimuth() ? 2 * budget : budget)) {
                    accumulate(node.n, k, sign * node.weight * density);
                }
            }
        }
    } else {
        const double period = scheme.period();
        const double density = 1.0 / period;
        const double sign = region.complemented() ? -1.0 : 1.0;
        for (std::size_t k = 0; k < scheme.slot_offsets().size(); ++k) {
            const double offset = scheme.slot_offsets()[k];
            if (region.complemented()) {
                const auto rule = gauss_legendre(budget, 0.0, period);
                for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                    accumulate(make_angle(rule.nodes[j]), k, rule.weights[j] * density);
                }
            }
            for (const auto &arc : region.arc_list()) {
                for (const auto &[lo, hi] : pulled_back_intervals(arc, offset, period)) {
                    const auto rule = gauss_legendre(budget, lo, hi);
                    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                        accumulate(make_angle(rule.nodes[j]), k, sign * rule.weights[j] * density);
                    }
                }
            }
        }
    }
    for (std::size_t s = 0; s < states.size(); ++s) {
        out[s] = pairwise_sum(contributions[s]);
    }
    return out;
}

std::vector<MonteCarloEstimate> scheme_region_probabilities_mc(const RandomizedScheme &scheme,
                                                               std::span<const DensityMatrix> states,
                                                               const Region &region, std::size_t samples,
                                                               std::uint64_t seed) {
    require_space(region, scheme.outcome_space());
    require_states(states, scheme.dim());
    if (samples < 2) {
        throw InvalidInput("Monte Carlo needs at least two samples");
    }
    CounterRng rng(seed);
    std::vector<double> mean(states.size(), 0.0);
    std::vector<double> m2(states.size(), 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto m = scheme.member(scheme.sample_parameter(rng));
        const double count = static_cast<double>(i + 1);
        for (std::size_t s = 0; s < states.size(); ++s) {
            const double v = probability_of_region(m, states[s], region);
            const double delta = v - mean[s];
            mean[s] += delta / count;
            m2[s] += delta * (v - mean[s]);
        }
    }
    std::vector<MonteCarloEstimate> out;
    const double n = static_cast<double>(samples);
    for (std::size_t s = 0; s < states.size(); ++s) {
        out.push_back({mean[s], std::sqrt(m2[s] / (n - 1.0) / n)});
    }
    return out;
}

EquivalenceReport verify_scheme_equivalence(const ContinuousPovm &c, const RandomizedScheme &s,
                                            std::span<const DensityMatrix> states, std::span<const Region> regions,
                                            EquivalenceMode mode, std::size_t budget, std::uint64_t seed) {
    if (!(c.space() == s.outcome_space())) {
        throw SpaceMismatch("continuous POVM and scheme have different outcome spaces");
    }
    if (c.dim() != s.dim()) {
        throw DimensionMismatch("continuous POVM and scheme act on different dimensions");
    }
    EquivalenceReport report;
    report.mode = mode;
    report.budget = budget;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        std::vector<double> scheme_p;
        std::vector<double> errors(states.size(), 0.0);
        if (mode == EquivalenceMode::Deterministic) {
            scheme_p = scheme_region_probabilities(s, states, regions[r], budget);
        } else {
            const auto est = scheme_region_probabilities_mc(s, states, regions[r], budget, seed + r);
            for (std::size_t k = 0; k < est.size(); ++k) {
                scheme_p.push_back(est[k].mean);
                errors[k] = est[k].std_error;
            }
        }
        for (std::size_t k = 0; k < states.size(); ++k) {
            EquivalenceRow row;
            row.state = k;
            row.region = r;
            row.p_continuous = c.region_probability(states[k], regions[r]);
            row.p_scheme = scheme_p[k];
            row.diff = std::abs(row.p_continuous - row.p_scheme);
            row.std_error = errors[k];
            report.max_diff = std::max(report.max_diff, row.diff);
            report.max_std_error = std::max(report.max_std_error, row.std_error);
            report.rows.push_back(row);
        }
    }
    return report;
}

} // namespace povm

#include "povm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace povm {

namespace {

std::size_t draw_index(std::span<const double> probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            return i;
        }
    }
    // rounding gap: fall back to the last outcome with positive probability
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            return i;
        }
    }
    return 0;
}

std::size_t bin_of(const OutcomePoint &omega, std::span<const Region> bins) {
    std::size_t found = bins.size();
    for (std::size_t k = 0; k < bins.size(); ++k) {
        if (bins[k].contains(omega)) {
            if (found != bins.size()) {
                throw InvalidInput("bins overlap: an outcome falls in two bins");
            }
            found = k;
        }
    }
    if (found == bins.size()) {
        throw InvalidInput("bins do not cover the outcome space");
    }
    return found;
}

} // namespace

double spin_axial_cdf(double u, double bloch_length) { return (u + 1.0) / 2.0 + bloch_length * (u * u - 1.0) / 4.0; }

double spin_axial_quantile(double uniform, double bloch_length) {
    // r/4 u^2 + u/2 + (1/2 - r/4 - U) = 0, root in [-1, 1], cancellation-free form
    const double a = bloch_length / 4.0;
    const double b = 0.5;
    const double c = 0.5 - a - uniform;
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    return std::clamp(-2.0 * c / (b + std::sqrt(disc)), -1.0, 1.0);
}

double phase_cdf(const DensityMatrix &rho, double phi) {
    // <t|rho|t> = sum_{m,m'} rho_{m m'} e^{i (m' - m) t}
    const auto &r = rho.matrix();
    const auto d = r.rows();
    double value = r.trace().real() * phi;
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index mp = 0; mp < d; ++mp) {
            if (m == mp) {
                continue;
            }
            const auto k = static_cast<double>(mp - m);
            const std::complex<double> integral = (std::polar(1.0, k * phi) - 1.0) / std::complex<double>(0.0, k);
            value += (r(m, mp) * integral).real();
        }
    }
    return value / kTwoPi;
}

std::vector<OutcomeRecord> sample_direct(const ContinuousPovm &c, const DensityMatrix &rho, std::size_t n,
                                         std::uint64_t seed) {
    if (rho.dim() != c.dim()) {
        throw DimensionMismatch("state dimension does not match the measurement");
    }
    CounterRng rng(seed);
    std::vector<OutcomeRecord> out;
    out.reserve(n);
    if (c.family() == Family::SpinDirection) {
        const auto eig = eigh(rho.matrix());
        const double length = std::clamp(eig.values(0) - eig.values(1), 0.0, 1.0);
        const Ket top = eig.vectors.col(0);
        const Eigen::Vector3d axis_raw = bloch_vector(top * top.adjoint());
        const Direction axis = axis_raw.norm() > 0 ? Direction(axis_raw.normalized()) : Direction::UnitZ();
        const Eigen::Matrix3d frame = frame_about(axis);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = spin_axial_quantile(rng.uniform(), length);
            const double phi = kTwoPi * rng.uniform();
            const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            const Eigen::Vector3d local(s * std::cos(phi), s * std::sin(phi), u);
            out.push_back({std::nullopt, std::nullopt, Direction((frame * local).normalized())});
        }
        return out;
    }
    if (c.family() == Family::Phase) {
        for (std::size_t i = 0; i < n; ++i) {
            const double target = rng.uniform();
            double lo = 0.0;
            double hi = kTwoPi;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                if (phase_cdf(rho, mid) < target) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push_back({std::nullopt, std::nullopt, make_angle(0.5 * (lo + hi))});
        }
        return out;
    }
    throw UnsupportedFamily("direct sampling is available for the spin and phase families only");
}

std::vector<OutcomeRecord> sample_two_stage(const RandomizedScheme &s, const DensityMatrix &rho, std::size_t n,
                                            std::uint64_t seed) {
    if (rho.dim() != s.dim()) {
        throw DimensionMismatch("state dimension does not match the scheme");
    }
    CounterRng mixing_rng(seed, 0);
    CounterRng outcome_rng(seed, 1);
    std::vector<OutcomeRecord> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        OutcomePoint x = s.sample_parameter(mixing_rng);
        const auto member = s.member(x);
        const auto probs = born_probabilities(member, rho);
        const std::size_t i = draw_index(probs, outcome_rng.uniform());
        out.push_back({std::move(x), i, member.point(i)});
    }
    return out;
}

std::vector<OutcomeRecord> sample_finite(const FinitePovm &p, const DensityMatrix &rho, std::size_t n,
                                         std::uint64_t seed) {
    CounterRng rng(seed, 1);
    const auto probs = born_probabilities(p, rho);
    std::vector<OutcomeRecord> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = draw_index(probs, rng.uniform());
        out.push_back({std::nullopt, i, p.point(i)});
    }
    return out;
}

GofReport compare_samples(std::span<const OutcomeRecord> a, std::span<const OutcomeRecord> b,
                          std::span<const Region> bins, std::string bin_spec) {
    if (bins.size() < 2) {
        throw InvalidInput("chi-square comparison needs at least two bins");
    }
    if (a.empty() || b.empty()) {
        throw EmptySample("both samples must be nonempty");
    }
    for (const auto &bin : bins) {
        if (!(bin.space() == bins.front().space())) {
            throw SpaceMismatch("bins live in different outcome spaces");
        }
    }
    for (const auto sample : {a, b}) {
        for (const auto &rec : sample) {
            if (!lies_in(rec.omega, bins.front().space())) {
                throw SpaceMismatch("outcome does not lie in the bins' outcome space");
            }
        }
    }
    GofReport report;
    report.bin_spec = std::move(bin_spec);
    report.counts_a.assign(bins.size(), 0);
    report.counts_b.assign(bins.size(), 0);
    for (const auto &rec : a) {
        ++report.counts_a[bin_of(rec.omega, bins)];
    }
    for (const auto &rec : b) {
        ++report.counts_b[bin_of(rec.omega, bins)];
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ratio_a = std::sqrt(nb / na);
    const double ratio_b = std::sqrt(na / nb);
    double stat = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double ca = static_cast<double>(report.counts_a[k]);
        const double cb = static_cast<double>(report.counts_b[k]);
        const double pooled = ca + cb;
        const double expect_a = na * pooled / (na + nb);
        const double expect_b = nb * pooled / (na + nb);
        if (expect_a < 5.0 || expect_b < 5.0) {
            std::ostringstream msg;
            msg << "bin " << k << " has expected count below 5";
            throw SparseBins(msg.str());
        }
        const double diff = ratio_a * ca - ratio_b * cb;
        stat += diff * diff / pooled;
    }
    report.statistic = stat;
    report.dof = bins.size() - 1;
    report.p_value = boost::math::gamma_q(static_cast<double>(report.dof) / 2.0, stat / 2.0);
    return report;
}

} // namespace povm

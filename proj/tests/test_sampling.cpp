#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "povm/sampling.hpp"

using namespace povm;

namespace {

constexpr double pi = std::numbers::pi;

DensityMatrix up() { return DensityMatrix::pure(spin_ket(Direction::UnitZ())); }

DensityMatrix plus_state(Eigen::Index d) {
    Ket k = Ket::Ones(d) / std::sqrt(static_cast<double>(d));
    return DensityMatrix::pure(k);
}

DensityMatrix ket_state(Eigen::Index d, Eigen::Index k) {
    Ket v = Ket::Zero(d);
    v(k) = 1;
    return DensityMatrix::pure(v);
}

double fraction_in(const std::vector<OutcomeRecord> &records, const Region &region) {
    std::size_t hits = 0;
    for (const auto &r : records) {
        hits += region.contains(r.omega) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

bool same_records(const std::vector<OutcomeRecord> &a, const std::vector<OutcomeRecord> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].index != b[k].index || !same_point(a[k].omega, b[k].omega) || a[k].x.has_value() != b[k].x.has_value() ||
            (a[k].x && !same_point(*a[k].x, *b[k].x))) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("direct spin sampling on the maximally mixed state is isotropic") {
    const std::size_t n = 100000;
    const auto records = sample_direct(ContinuousPovm::spin_direction(), DensityMatrix::maximally_mixed(2), n, 1);
    REQUIRE(records.size() == n);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto &r : records) {
        CHECK_FALSE(r.x.has_value());
        CHECK_FALSE(r.index.has_value());
        const auto &v = std::get<Direction>(r.omega);
        REQUIRE(std::abs(v.norm() - 1) <= 1e-12);
        mean += v;
    }
    mean /= static_cast<double>(n);
    const double sigma = std::sqrt(1.0 / 3.0 / static_cast<double>(n));
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(mean(k)) <= 4 * sigma);
    }
}

TEST_CASE("direct spin sampling on the up state fills the upper hemisphere three quarters of the time") {
    const std::size_t n = 100000;
    const auto records = sample_direct(ContinuousPovm::spin_direction(), up(), n, 2);
    const double f = fraction_in(records, Region::cap(Direction::UnitZ(), pi / 2));
    CHECK(std::abs(f - 0.75) <= 4 * std::sqrt(3.0 / 16.0 / static_cast<double>(n)));
}

TEST_CASE("direct phase sampling") {
    const std::size_t n = 100000;
    const auto records = sample_direct(ContinuousPovm::phase(2), plus_state(2), n, 3);
    const double p = 0.5 + 1 / pi;
    const double f = fraction_in(records, Region::arc(-pi / 2, pi / 2));
    CHECK(std::abs(f - p) <= 4 * std::sqrt(p * (1 - p) / static_cast<double>(n)));

    std::mt19937_64 rng(4);
    const DensityMatrix rho(oracle::random_density(rng, 3));
    const auto three = sample_direct(ContinuousPovm::phase(3), rho, n, 4);
    const double q = ContinuousPovm::phase(3).region_probability(rho, Region::arc(0.5, 2.5));
    CHECK(std::abs(fraction_in(three, Region::arc(0.5, 2.5)) - q) <= 4 * std::sqrt(q * (1 - q) / static_cast<double>(n)));
}

TEST_CASE("inverse CDF round trips") {
    for (const double r : {0.0, 0.3, 0.999, 1.0}) {
        for (int k = 0; k <= 200; ++k) {
            const double u = k / 200.0;
            const double z = spin_axial_quantile(u, r);
            CHECK(z >= -1.0);
            CHECK(z <= 1.0);
            CHECK(std::abs(spin_axial_cdf(z, r) - u) <= 1e-10);
        }
    }
    CHECK(spin_axial_cdf(-1, 0.5) == doctest::Approx(0));
    CHECK(spin_axial_cdf(1, 0.5) == doctest::Approx(1));

    std::mt19937_64 rng(5);
    for (const Eigen::Index d : {2, 3, 5}) {
        const DensityMatrix rho(oracle::random_density(rng, d));
        CHECK(phase_cdf(rho, 0) == doctest::Approx(0));
        CHECK(phase_cdf(rho, 2 * pi) == doctest::Approx(1).epsilon(1e-12));
        double previous = 0;
        for (int k = 1; k <= 40; ++k) {
            const double phi = 2 * pi * k / 40.0;
            const double f = phase_cdf(rho, phi);
            CHECK(f >= previous - 1e-15);
            CHECK(std::abs(f - oracle::phase_arc_probability(rho.matrix(), 0, phi)) <= 1e-9);
            previous = f;
        }
    }
}

TEST_CASE("two-stage Stern-Gerlach records follow the Born rule given x") {
    const std::size_t n = 100000;
    const auto s = stern_gerlach_scheme();
    const auto records = sample_two_stage(s, up(), n, 6);
    REQUIRE(records.size() == n);
    double residual = 0;
    for (const auto &r : records) {
        REQUIRE(r.x.has_value());
        REQUIRE(r.index.has_value());
        const auto member = s.member(*r.x);
        CHECK(same_point(r.omega, member.point(*r.index)));
        CHECK(*r.index < 2);
        const double z = std::get<Direction>(*r.x).z();
        residual += (*r.index == 0 ? 1.0 : 0.0) - (1 + z) / 2;
    }
    // each term has variance at most 1/4
    CHECK(std::abs(residual / static_cast<double>(n)) <= 4 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("two-stage phase records pick each index uniformly on a basis state") {
    const std::size_t n = 100000;
    const auto s = phase_scheme(2);
    const auto records = sample_two_stage(s, ket_state(2, 0), n, 7);
    std::size_t zeros = 0;
    for (const auto &r : records) {
        REQUIRE(r.x.has_value());
        const double x = std::get<Angle>(*r.x).radians;
        CHECK(x >= 0.0);
        CHECK(x < pi);
        CHECK(same_point(r.omega, s.member(*r.x).point(*r.index)));
        zeros += *r.index == 0 ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(zeros) / static_cast<double>(n) - 0.5) <= 4 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("two-stage x marginal matches the uniform mixing distribution") {
    const std::size_t n = 60000;
    auto records = sample_two_stage(stern_gerlach_scheme(), up(), n, 8);
    for (auto &r : records) {
        r.omega = *r.x;
    }
    const auto bins = sphere_bins();
    std::vector<double> counts(bins.size(), 0.0);
    for (const auto &r : records) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (bins[b].contains(r.omega)) {
                counts[b] += 1;
                break;
            }
        }
    }
    const double expected = static_cast<double>(n) / static_cast<double>(bins.size());
    double chi2 = 0;
    for (const double c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 1e-4);
}

TEST_CASE("sample_finite frequencies") {
    const std::size_t n = 80000;
    const auto records = sample_finite(sic_tetrahedron(), DensityMatrix::maximally_mixed(2), n, 9);
    std::vector<std::size_t> counts(4, 0);
    for (const auto &r : records) {
        CHECK_FALSE(r.x.has_value());
        counts[*r.index] += 1;
    }
    for (const auto c : counts) {
        CHECK(std::abs(static_cast<double>(c) / double(n) - 0.25) <= 4 * std::sqrt(3.0 / 16.0 / double(n)));
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const auto c = ContinuousPovm::spin_direction();
    const auto rho = DensityMatrix::from_bloch(Eigen::Vector3d(0.2, -0.4, 0.5));
    CHECK(same_records(sample_direct(c, rho, 1000, 42), sample_direct(c, rho, 1000, 42)));
    CHECK_FALSE(same_records(sample_direct(c, rho, 1000, 42), sample_direct(c, rho, 1000, 43)));
    const auto s = stern_gerlach_scheme();
    CHECK(same_records(sample_two_stage(s, rho, 1000, 42), sample_two_stage(s, rho, 1000, 42)));
    CHECK_FALSE(same_records(sample_two_stage(s, rho, 1000, 42), sample_two_stage(s, rho, 1000, 43)));
    const auto p = phase_scheme(3, true);
    const auto r3 = DensityMatrix::maximally_mixed(3);
    CHECK(same_records(sample_two_stage(p, r3, 500, 1), sample_two_stage(p, r3, 500, 1)));
    CHECK(same_records(sample_direct(ContinuousPovm::phase(3), r3, 500, 1),
                       sample_direct(ContinuousPovm::phase(3), r3, 500, 1)));
}

TEST_CASE("compare_samples") {
    const auto c = ContinuousPovm::spin_direction();
    const auto mixed = DensityMatrix::maximally_mixed(2);
    const auto bins = sphere_bins();
    const auto a = sample_direct(c, mixed, 100000, 10);
    const auto b = sample_direct(c, mixed, 100000, 11);
    const auto same = compare_samples(a, b, bins, "sphere12");
    CHECK(same.dof == 11);
    CHECK(same.bin_spec == "sphere12");
    CHECK(same.p_value > 1e-4);
    CHECK(same.counts_a.size() == 12);
    std::size_t total = 0;
    for (const auto k : same.counts_a) {
        total += k;
    }
    CHECK(total == a.size());
    const boost::math::chi_squared dist(11.0);
    CHECK(same.p_value == doctest::Approx(boost::math::cdf(boost::math::complement(dist, same.statistic))));

    const auto spin_up = sample_direct(c, up(), 100000, 12);
    CHECK(compare_samples(spin_up, a, bins).p_value < 1e-6);

    const auto two_stage = sample_two_stage(stern_gerlach_scheme(), mixed, 100000, 13);
    CHECK(compare_samples(two_stage, a, bins).p_value > 1e-4);

    const auto tiny = sample_direct(c, mixed, 20, 14);
    CHECK_THROWS_AS(compare_samples(tiny, tiny, bins), SparseBins);
    const auto circle = sample_direct(ContinuousPovm::phase(2), DensityMatrix::maximally_mixed(2), 1000, 15);
    CHECK_THROWS_AS(compare_samples(circle, a, bins), SpaceMismatch);
}

TEST_CASE("compare_samples on the circle") {
    const auto rho = plus_state(3);
    const auto direct = sample_direct(ContinuousPovm::phase(3), rho, 100000, 16);
    const auto scheme = sample_two_stage(phase_scheme(3), rho, 100000, 17);
    CHECK(compare_samples(direct, scheme, circle_bins(), "circle16").p_value > 1e-4);
    const auto other = sample_direct(ContinuousPovm::phase(3), ket_state(3, 0), 100000, 18);
    CHECK(compare_samples(direct, other, circle_bins()).p_value < 1e-6);
}

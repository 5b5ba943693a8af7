#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "povm/continuous.hpp"

using namespace povm;

namespace {

constexpr double pi = std::numbers::pi;

DensityMatrix up() { return DensityMatrix::pure(spin_ket(Direction::UnitZ())); }

DensityMatrix plus_state(Eigen::Index d) {
    Ket k = Ket::Ones(d) / std::sqrt(static_cast<double>(d));
    return DensityMatrix::pure(k);
}

Direction random_direction(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    return Direction(g(rng), g(rng), g(rng)).normalized();
}

// SU(2) element acting on Bloch vectors as the rotation by `angle` about `axis`
Operator su2(const Direction &axis, double angle) {
    Operator u = std::cos(angle / 2) * Operator::Identity(2, 2);
    for (int k = 0; k < 3; ++k) {
        u -= std::complex<double>(0, std::sin(angle / 2) * axis(k)) * pauli<double>(k);
    }
    return u;
}

std::vector<Region> sphere_regions() {
    return {
        Region::cap(Direction::UnitZ(), pi / 2),
        Region::cap(Direction(0.2, -0.5, 0.7).normalized(), pi / 3),
        Region::patches({make_zone_sector(-0.3, 0.4, 0, kTwoPi)}),
        Region::patches({make_zone_sector(0.1, 0.9, 1.0, 2.5)}),
        Region::cap(Direction::UnitX(), 0.4).complement(),
        sphere_bins()[7],
    };
}

std::vector<Region> circle_regions() {
    return {
        Region::arc(-pi / 2, pi / 2),
        Region::arc(0.3, 2.1),
        Region::arcs({make_arc(0, 0.5), make_arc(3, 4.5)}),
        Region::arc(1, 6).complement(),
    };
}

} // namespace

TEST_CASE("spin cap probabilities in closed form") {
    const auto c = ContinuousPovm::spin_direction();
    const auto rho = up();
    CHECK(c.region_probability(rho, Region::cap(Direction::UnitZ(), pi)) == doctest::Approx(1).epsilon(1e-12));
    CHECK(std::abs(c.region_probability(rho, Region::cap(Direction::UnitZ(), pi / 2)) - 0.75) <= 1e-12);
    CHECK(std::abs(c.region_probability(rho, Region::cap(Direction::UnitZ(), pi / 3)) - 7.0 / 16) <= 1e-12);
    for (const double t : {0.1, 0.7, 1.3, 2.2, 3.0}) {
        const double closed = 0.75 - std::cos(t) / 2 - std::cos(t) * std::cos(t) / 4;
        CHECK(std::abs(c.region_probability(rho, Region::cap(Direction::UnitZ(), t)) - closed) <= 1e-12);
    }
    CHECK(std::abs(oracle::spin_cap_probability(rho.matrix(), Eigen::Vector3d::UnitZ(), pi / 2) - 0.75) <= 1e-9);
    CHECK(std::abs(oracle::spin_cap_probability(rho.matrix(), Eigen::Vector3d::UnitZ(), pi / 3) - 7.0 / 16) <= 1e-9);
}

TEST_CASE("spin cap probabilities agree with the quadrature oracle on random states") {
    std::mt19937_64 rng(3);
    const auto c = ContinuousPovm::spin_direction();
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(oracle::random_density(rng, 2));
        const Direction axis = random_direction(rng);
        const double t = 0.2 + 2.7 * std::uniform_real_distribution<double>()(rng);
        CHECK(std::abs(c.region_probability(rho, Region::cap(axis, t)) -
                       oracle::spin_cap_probability(rho.matrix(), axis, t)) <= 1e-9);
    }
}

TEST_CASE("spin density and completeness") {
    const auto c = ContinuousPovm::spin_direction();
    const Direction n = Direction(1, 2, -2).normalized();
    const Operator m = c.density(n);
    CHECK(m.trace().real() == doctest::Approx(1));
    CHECK((m * m - m).norm() <= 1e-12);
    CHECK((bloch_vector(m) - n).norm() <= 1e-12);
    CHECK((c.region_operator(Region::whole(OutcomeSpace::sphere())) - Operator::Identity(2, 2)).norm() <= 1e-12);
    CHECK((c.quadrature_total() - Operator::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("phase arc probabilities") {
    const auto c2 = ContinuousPovm::phase(2);
    Ket zero = Ket::Zero(2);
    zero(0) = 1;
    CHECK(c2.region_probability(DensityMatrix::pure(zero), Region::arc(0, pi)) == doctest::Approx(0.5).epsilon(1e-12));
    const double expected = 0.5 + 1 / pi;
    CHECK(std::abs(c2.region_probability(plus_state(2), Region::arc(-pi / 2, pi / 2)) - expected) <= 1e-12);
    CHECK(std::abs(oracle::phase_arc_probability(plus_state(2).matrix(), -pi / 2, pi / 2) - expected) <= 1e-9);

    std::mt19937_64 rng(5);
    for (Eigen::Index d = 2; d <= 6; ++d) {
        const auto c = ContinuousPovm::phase(d);
        CHECK((c.region_operator(Region::whole(OutcomeSpace::circle())) - Operator::Identity(d, d)).norm() <= 1e-12);
        CHECK((c.quadrature_total() - Operator::Identity(d, d)).norm() <= 1e-12);
        const DensityMatrix rho(oracle::random_density(rng, d));
        CHECK(c.region_probability(rho, Region::whole(OutcomeSpace::circle())) == doctest::Approx(1).epsilon(1e-12));
        const double a = std::uniform_real_distribution<double>(-pi, pi)(rng);
        const double b = a + std::uniform_real_distribution<double>(0.1, 2 * pi)(rng);
        CHECK(std::abs(c.region_probability(rho, Region::arc(a, b)) -
                       oracle::phase_arc_probability(rho.matrix(), a, b)) <= 1e-9);
        CHECK(c.density(make_angle(0.7)).trace().real() == doctest::Approx(1));
    }
    CHECK_THROWS_AS(ContinuousPovm::phase(1), InvalidDimension);
    CHECK_THROWS_AS(c2.region_probability(plus_state(2), Region::cap(Direction::UnitZ(), 1)), SpaceMismatch);
}

TEST_CASE("Stern-Gerlach members") {
    const auto s = stern_gerlach_scheme();
    const auto m = s.member(Direction(Direction::UnitZ()));
    REQUIRE(m.size() == 4);
    CHECK(same_point(m.point(0), OutcomePoint(Direction(Direction::UnitZ()))));
    CHECK(same_point(m.point(1), OutcomePoint(Direction(-Direction::UnitZ()))));
    CHECK((m.element(0) - up().matrix()).norm() <= 1e-12);
    Operator down = Operator::Zero(2, 2);
    down(1, 1) = 1;
    CHECK((m.element(1) - down).norm() <= 1e-12);
    CHECK(m.element(2).norm() == 0.0);
    CHECK(m.element(3).norm() == 0.0);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto member = s.member(random_direction(rng));
        CHECK(validate_povm(member).passed);
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < member.size(); ++i) {
            nonzero += member.element(i).norm() > 0 ? 1 : 0;
        }
        CHECK(nonzero <= 4);
    }
}

TEST_CASE("phase scheme members") {
    Ket zero = Ket::Zero(2);
    zero(0) = 1;
    const auto m = phase_scheme(2).member(make_angle(0));
    REQUIRE(m.size() == 2);
    const auto p = born_probabilities(m, DensityMatrix::pure(zero));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(std::get<Angle>(m.point(0)).radians == doctest::Approx(0));
    CHECK(std::get<Angle>(m.point(1)).radians == doctest::Approx(pi));

    for (Eigen::Index d = 2; d <= 7; ++d) {
        for (const bool unfolded : {false, true}) {
            const auto s = phase_scheme(d, unfolded);
            for (const double x : {0.0, 0.3, 1.1}) {
                const auto member = s.member(make_angle(x));
                CHECK(member.size() == static_cast<std::size_t>(d));
                CHECK((member.total() - Operator::Identity(d, d)).norm() <= 1e-12);
                CHECK(validate_povm(member).passed);
            }
        }
    }
}

TEST_CASE("deterministic equivalence for the Stern-Gerlach scheme") {
    const auto c = ContinuousPovm::spin_direction();
    const auto s = stern_gerlach_scheme();
    std::mt19937_64 rng(11);
    std::vector<DensityMatrix> states{up()};
    for (int k = 0; k < 4; ++k) {
        states.emplace_back(oracle::random_density(rng, 2));
    }
    const auto regions = sphere_regions();
    const auto report = verify_scheme_equivalence(c, s, states, regions);
    CHECK(report.rows.size() == states.size() * regions.size());
    CHECK(report.max_diff <= 1e-6);
    CHECK(report.rows[0].p_continuous == doctest::Approx(0.75));
    CHECK(std::abs(report.rows[0].p_scheme - 0.75) <= 1e-6);
}

TEST_CASE("deterministic equivalence for phase schemes, folded and unfolded") {
    std::mt19937_64 rng(13);
    for (const Eigen::Index d : {2, 3, 5}) {
        const auto c = ContinuousPovm::phase(d);
        std::vector<DensityMatrix> states{plus_state(d)};
        for (int k = 0; k < 3; ++k) {
            states.emplace_back(oracle::random_density(rng, d));
        }
        const auto regions = circle_regions();
        for (const bool unfolded : {false, true}) {
            const auto report = verify_scheme_equivalence(c, phase_scheme(d, unfolded), states, regions);
            CHECK(report.max_diff <= 1e-9);
        }
    }
    const auto two = verify_scheme_equivalence(ContinuousPovm::phase(2), phase_scheme(2),
                                               std::vector<DensityMatrix>{plus_state(2)},
                                               std::vector<Region>{Region::arc(-pi / 2, pi / 2)});
    CHECK(std::abs(two.rows[0].p_scheme - (0.5 + 1 / pi)) <= 1e-9);
}

TEST_CASE("one-member finite mixture matches its member exactly") {
    const auto sic = sic_tetrahedron();
    const auto s = RandomizedScheme::finite_mixture("sic", {1.0}, {sic});
    std::mt19937_64 rng(17);
    const std::vector<DensityMatrix> states{DensityMatrix(oracle::random_density(rng, 2)), up()};
    for (const auto &region : sphere_regions()) {
        const auto probs = scheme_region_probabilities(s, states, region);
        for (std::size_t k = 0; k < states.size(); ++k) {
            CHECK(std::abs(probs[k] - probability_of_region(sic, states[k], region)) <= 1e-15);
        }
    }
    CHECK_THROWS_AS(RandomizedScheme::finite_mixture("bad", {0.5}, {sic}), InvalidInput);
}

TEST_CASE("spin covariance under rotations") {
    std::mt19937_64 rng(19);
    const auto c = ContinuousPovm::spin_direction();
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho(oracle::random_density(rng, 2));
        const Direction axis = random_direction(rng);
        const double angle = std::uniform_real_distribution<double>(0, 2 * pi)(rng);
        const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
        const Operator u = su2(axis, angle);
        const DensityMatrix rotated(Operator(u * rho.matrix() * u.adjoint()));
        const Direction cap_axis = random_direction(rng);
        const double t = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
        const double before = c.region_probability(rho, Region::cap(cap_axis, t));
        const double after = c.region_probability(rotated, Region::cap(Direction(r * cap_axis), t));
        CHECK(std::abs(before - after) <= 1e-9);
    }
}

TEST_CASE("phase covariance under shifts") {
    std::mt19937_64 rng(23);
    for (const Eigen::Index d : {2, 3, 4}) {
        const auto c = ContinuousPovm::phase(d);
        for (int trial = 0; trial < 10; ++trial) {
            const DensityMatrix rho(oracle::random_density(rng, d));
            const double delta = std::uniform_real_distribution<double>(-pi, pi)(rng);
            Operator shift = Operator::Zero(d, d);
            for (Eigen::Index k = 0; k < d; ++k) {
                shift(k, k) = std::polar(1.0, delta * static_cast<double>(k));
            }
            const DensityMatrix moved(Operator(shift * rho.matrix() * shift.adjoint()));
            const double a = std::uniform_real_distribution<double>(0, 2 * pi)(rng);
            const double b = a + std::uniform_real_distribution<double>(0.1, 6.0)(rng);
            CHECK(std::abs(c.region_probability(rho, Region::arc(a, b)) -
                           c.region_probability(moved, Region::arc(a + delta, b + delta))) <= 1e-9);
        }
    }
}

TEST_CASE("refining the quadrature budget does not increase the discrepancy") {
    const auto c = ContinuousPovm::spin_direction();
    const auto s = stern_gerlach_scheme();
    std::mt19937_64 rng(29);
    const std::vector<DensityMatrix> states{DensityMatrix(oracle::random_density(rng, 2))};
    const auto regions = sphere_regions();
    double previous = 1.0;
    for (const std::size_t budget : {2, 8, 32}) {
        const double diff = verify_scheme_equivalence(c, s, states, regions, EquivalenceMode::Deterministic, budget)
                                .max_diff;
        CHECK((diff <= previous || diff <= 1e-12));
        previous = diff;
    }
}

TEST_CASE("Monte Carlo equivalence") {
    const auto c = ContinuousPovm::spin_direction();
    const auto s = stern_gerlach_scheme();
    const std::vector<DensityMatrix> states{up()};
    const std::vector<Region> hemisphere{Region::cap(Direction::UnitZ(), pi / 2)};
    const auto report = verify_scheme_equivalence(c, s, states, hemisphere, EquivalenceMode::MonteCarlo, 200000, 5);
    CHECK(report.rows[0].std_error > 0);
    CHECK(std::abs(report.rows[0].p_scheme - 0.75) <= 5 * report.rows[0].std_error);
    const auto again = verify_scheme_equivalence(c, s, states, hemisphere, EquivalenceMode::MonteCarlo, 200000, 5);
    CHECK(again.rows[0].p_scheme == report.rows[0].p_scheme);

    CHECK_THROWS_AS(verify_scheme_equivalence(ContinuousPovm::phase(2), s, states, hemisphere), SpaceMismatch);
}

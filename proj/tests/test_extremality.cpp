#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "povm/extremality.hpp"

using namespace povm;

namespace {

Operator projector(Eigen::Index d, Eigen::Index k) {
    Operator m = Operator::Zero(d, d);
    m(k, k) = 1;
    return m;
}

FinitePovm basis_povm(Eigen::Index d) {
    std::vector<Operator> elements;
    for (Eigen::Index k = 0; k < d; ++k) {
        elements.push_back(projector(d, k));
    }
    return FinitePovm::labeled(std::move(elements));
}

FinitePovm coin_flip() {
    const Operator half = Operator::Identity(2, 2) / 2.0;
    return FinitePovm::labeled({half, half});
}

std::vector<oracle::Mat> elements_of(const FinitePovm &p) {
    std::vector<oracle::Mat> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.push_back(p.element(i));
    }
    return out;
}

FinitePovm random_povm(std::mt19937_64 &rng, Eigen::Index d, const std::vector<Eigen::Index> &ranks) {
    const auto elements = oracle::random_povm(rng, d, ranks);
    return FinitePovm::labeled(std::vector<Operator>(elements.begin(), elements.end()));
}

int gram_rank(const FinitePovm &p, double gap = 1e-8) {
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            g(i, j) = trace_inner(p.element(static_cast<std::size_t>(i)), p.element(static_cast<std::size_t>(j)));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    int rank = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        rank += es.eigenvalues()(k) > gap ? 1 : 0;
    }
    return rank;
}

std::size_t nonzero_count(const FinitePovm &p) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        count += p.element(i).norm() > 1e-8 ? 1 : 0;
    }
    return count;
}

void check_decomposition(const FinitePovm &p, const DecompositionResult &r) {
    double total = 0;
    for (const auto &term : r.terms) {
        CHECK(term.weight > 0);
        total += term.weight;
        CHECK(validate_povm(term.povm).passed);
        CHECK(is_extremal(term.povm));
        const std::size_t nz = nonzero_count(term.povm);
        CHECK(nz <= static_cast<std::size_t>(p.dim() * p.dim()));
        CHECK(gram_rank(term.povm) == static_cast<int>(nz));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    const auto sum = reconstruct(r);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK((sum[i] - p.element(i)).norm() <= 1e-8);
    }
}

} // namespace

TEST_CASE("perturbation_space examples") {
    CHECK(perturbation_space(basis_povm(2)).empty());
    CHECK(perturbation_space(coin_flip()).size() == 4);
    CHECK(perturbation_space(FinitePovm::labeled({Operator(Operator::Identity(2, 2))})).empty());
}

TEST_CASE("perturbations are orthonormal, sum to zero and stay inside the support") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 2 + trial % 2;
        const auto p = random_povm(rng, d, {1, 2, 1, 1, 1, 1, 1, 1, 1, 1});
        const auto basis = perturbation_space(p);
        REQUIRE_FALSE(basis.empty());
        for (std::size_t a = 0; a < basis.size(); ++a) {
            Operator sum = Operator::Zero(d, d);
            for (std::size_t i = 0; i < p.size(); ++i) {
                const auto &q = basis[a].components[i];
                sum += q;
                CHECK(is_hermitian(q, 1e-10));
                const Operator proj = oracle::range_projector(p.element(i));
                CHECK((q - proj * q * proj).norm() <= 1e-9);
            }
            CHECK(sum.norm() <= 1e-9);
            for (std::size_t b = 0; b < basis.size(); ++b) {
                double ip = 0;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    ip += trace_inner(basis[a].components[i], basis[b].components[i]);
                }
                CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0));
            }
        }
    }
}

TEST_CASE("is_extremal examples") {
    for (Eigen::Index d = 2; d <= 4; ++d) {
        CHECK(is_extremal(basis_povm(d)));
    }
    CHECK(is_extremal(sic_tetrahedron()));
    CHECK_FALSE(is_extremal(coin_flip()));
}

TEST_CASE("extremality verdicts agree with the brute-force kernel") {
    std::mt19937_64 rng(31);
    const std::vector<std::vector<Eigen::Index>> shapes = {
        {1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}, {1, 1, 2}, {2, 2}, {1, 1, 1, 1, 1}, {1, 2, 1, 1, 1},
    };
    int extremal = 0;
    int not_extremal = 0;
    for (int trial = 0; trial < 70; ++trial) {
        const auto &ranks = shapes[static_cast<std::size_t>(trial) % shapes.size()];
        const Eigen::Index d = 2 + (trial / 7) % 2;
        const auto p = random_povm(rng, d, ranks);
        const auto oracle_kernel = oracle::perturbation_kernel(elements_of(p));
        CHECK(oracle::kernel_inside_cone(elements_of(p), oracle_kernel));
        const auto basis = perturbation_space(p);
        CHECK(static_cast<int>(basis.size()) == oracle_kernel.dim);
        CHECK(is_extremal(p) == (oracle_kernel.dim == 0));
        (oracle_kernel.dim == 0 ? extremal : not_extremal) += 1;
    }
    CHECK(extremal > 0);
    CHECK(not_extremal > 0);
}

TEST_CASE("max_step examples") {
    const auto coin = coin_flip();
    const Operator z = pauli<double>(2);
    const Perturbation q{{z / 2.0, -z / 2.0}};
    const auto step = max_step(coin, q);
    CHECK(step.plus == doctest::Approx(1));
    CHECK(step.minus == doctest::Approx(1));

    Operator a(1, 1);
    a(0, 0) = 0.75;
    Operator b(1, 1);
    b(0, 0) = 0.25;
    Operator u(1, 1);
    u(0, 0) = 1 / std::sqrt(2.0);
    const auto scalar = max_step(FinitePovm::labeled({a, b}), Perturbation{{u, Operator(-u)}});
    CHECK(scalar.plus == doctest::Approx(std::sqrt(2.0) / 4));
    CHECK(scalar.minus == doctest::Approx(3 * std::sqrt(2.0) / 4));

    CHECK_THROWS_AS(max_step(coin, Perturbation{{Operator::Zero(2, 2), Operator::Zero(2, 2)}}), DegeneratePerturbation);
    CHECK_THROWS_AS(max_step(coin, Perturbation{{z}}), DimensionMismatch);
}

TEST_CASE("split of the coin flip") {
    const Operator z = pauli<double>(2);
    const auto s = split(coin_flip(), Perturbation{{z / 2.0, -z / 2.0}});
    CHECK((s.plus.element(0) - projector(2, 0)).norm() <= 1e-12);
    CHECK((s.plus.element(1) - projector(2, 1)).norm() <= 1e-12);
    CHECK((s.minus.element(0) - projector(2, 1)).norm() <= 1e-12);
    CHECK((s.minus.element(1) - projector(2, 0)).norm() <= 1e-12);
    CHECK(s.weight_plus == doctest::Approx(0.5));
    CHECK(s.weight_minus == doctest::Approx(0.5));
}

TEST_CASE("split children are valid and lie on the boundary") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        std::vector<Eigen::Index> ranks(static_cast<std::size_t>(d * d + 2), 1);
        const auto p = random_povm(rng, d, ranks);
        const auto basis = perturbation_space(p);
        REQUIRE_FALSE(basis.empty());
        const auto s = split(p, basis.front());
        CHECK(validate_povm(s.plus).passed);
        CHECK(validate_povm(s.minus).passed);
        CHECK(s.weight_plus + s.weight_minus == doctest::Approx(1.0));
        CHECK(total_support_rank(s.plus) < total_support_rank(p));
        CHECK(total_support_rank(s.minus) < total_support_rank(p));
        // a small step past either end leaves the POVM set
        const double eps = 1e-4;
        const auto &q = basis.front().components;
        double worst_plus = 0;
        double worst_minus = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            worst_plus = std::min(worst_plus, oracle::min_eig(p.element(i) + (s.step.plus + eps) * q[i]));
            worst_minus = std::min(worst_minus, oracle::min_eig(p.element(i) - (s.step.minus + eps) * q[i]));
        }
        CHECK(worst_plus < -1e-9);
        CHECK(worst_minus < -1e-9);
    }
}

TEST_CASE("decompose_extremal examples") {
    const auto coin = decompose_extremal(coin_flip());
    REQUIRE(coin.terms.size() == 2);
    CHECK(coin.terms[0].weight == doctest::Approx(0.5));
    CHECK(coin.terms[1].weight == doctest::Approx(0.5));
    check_decomposition(coin_flip(), coin);

    const auto sic = decompose_extremal(sic_tetrahedron());
    REQUIRE(sic.terms.size() == 1);
    CHECK(sic.terms[0].weight == doctest::Approx(1));
    CHECK(sic.depth == 0);

    std::mt19937_64 rng(51);
    const auto six = random_povm(rng, 2, {1, 1, 1, 1, 1, 1});
    check_decomposition(six, decompose_extremal(six));
}

TEST_CASE("decompose_extremal on random POVMs") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        const std::size_t n = 5 + static_cast<std::size_t>(trial) % 8;
        std::vector<Eigen::Index> ranks(n, 1);
        if (trial % 4 == 0) {
            ranks[0] = 2;
        }
        const auto p = random_povm(rng, d, ranks);
        check_decomposition(p, decompose_extremal(p));
    }
}

TEST_CASE("decomposing an extremal POVM returns it unchanged") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_povm(rng, 2, {1, 1, 1, 1, 1, 1});
        const auto r = decompose_extremal(p);
        for (const auto &term : r.terms) {
            const auto again = decompose_extremal(term.povm);
            REQUIRE(again.terms.size() == 1);
            CHECK(again.terms[0].weight == doctest::Approx(1));
            for (std::size_t i = 0; i < p.size(); ++i) {
                CHECK((again.terms[0].povm.element(i) - term.povm.element(i)).norm() <= 1e-12);
            }
        }
    }
}

TEST_CASE("decomposition failure modes") {
    try {
        (void)decompose_extremal(coin_flip(), 1);
        FAIL("expected TermBudgetExceeded");
    } catch (const TermBudgetExceeded &e) {
        CHECK(e.partial().terms.size() == 1);
        CHECK(e.kind() == "TermBudgetExceeded");
    }
    CHECK_THROWS_AS(decompose_extremal(coin_flip(), 0), InvalidInput);

    Operator faint = Operator::Zero(2, 2);
    faint(0, 0) = 1;
    faint(1, 1) = 1e-7;
    const Operator rest = Operator::Identity(2, 2) - faint;
    CHECK_THROWS_AS(decompose_extremal(FinitePovm::labeled({faint, rest})), NumericalRankAmbiguity);
}

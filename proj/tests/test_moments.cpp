// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include <cubic_moment/moments.hpp>

using namespace cubic_moment;
using P = Polynomial2<double>;

namespace {

MomentSequence<double> random_sequence(std::mt19937_64& rng, int degree)
{
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    Vector<double> v(static_cast<Eigen::Index>(monomial_count(degree)));
    for (Eigen::Index n = 0; n < v.size(); ++n)
        v(n) = u(rng);
    v(0) = 1.0 + std::abs(v(0));
    return MomentSequence<double>(degree, v);
}

P random_polynomial(std::mt19937_64& rng, int degree)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    P p;
    for (const auto& m : degree_lex_monomials(degree))
        p += P::monomial(m, u(rng));
    return p;
}

MomentSequence<double> normalized_quartic(double a0, double a1, double a2, double a3, double b40, double b31,
                                          double b22, double b13, double b04)
{
    return MomentSequence<double>(4, {1, 0, 0, 1, 0, 1, a0, a1, a2, a3, b40, b31, b22, b13, b04});
}

} // namespace

TEST_CASE("monomial_index follows degree-lex order")
{
    CHECK(monomial_index({0, 0}) == 0);
    CHECK(monomial_index({1, 1}) == 4);
    CHECK(monomial_index({0, 3}) == 9);
    CHECK(monomial_index({3, 0}) == 6);

    const auto labels = degree_lex_monomials(6);
    REQUIRE(labels.size() == 28);
    for (std::size_t n = 0; n < labels.size(); ++n) {
        CHECK(monomial_index(labels[n]) == n);
        CHECK(monomial_at(n) == labels[n]);
        if (n > 0)
            CHECK(labels[n - 1] < labels[n]);
    }
    CHECK(to_string(Monomial{2, 1}) == "X^2Y");
}

TEST_CASE("MomentSequence rejects malformed data")
{
    CHECK_THROWS_AS(MomentSequence<double>(2, {1.0, 0.0}), DegreeError);
    CHECK_THROWS_AS(MomentSequence<double>(1, {0.0, 1.0, 1.0}), PreconditionError);
    MomentSequence<double> b(1, {2.0, 3.0, 4.0});
    CHECK(b(0, 1) == 4.0);
    CHECK_THROWS_AS(b(2, 0), DegreeError);
}

TEST_CASE("build_moment_matrix")
{
    SUBCASE("normalized M(1) is the identity")
    {
        MomentSequence<double> b(2, {1, 0, 0, 1, 0, 1});
        CHECK(build_moment_matrix(b).entries.isApprox(Matrix<double>::Identity(3, 3)));
    }
    SUBCASE("direct placement of M(2)")
    {
        const auto b = normalized_quartic(0, 0, 0, 0, 1, 0, 1, 0, 1);
        const auto m = build_moment_matrix(b);
        REQUIRE(m.size() == 6);
        Matrix<double> expected(6, 6);
        expected << 1, 0, 0, 1, 0, 1,
                    0, 1, 0, 0, 0, 0,
                    0, 0, 1, 0, 0, 0,
                    1, 0, 0, 1, 0, 1,
                    0, 0, 0, 0, 1, 0,
                    1, 0, 0, 1, 0, 1;
        CHECK(m.entries == expected);
        // rows 1, X^2, Y^2 coincide
        CHECK(m.entries.row(0) == m.entries.row(3));
        CHECK(m.entries.row(0) == m.entries.row(5));
    }
    SUBCASE("general placement follows the displayed layout")
    {
        const auto b = normalized_quartic(0.3, -0.2, 0.7, 1.1, 5, 6, 7, 8, 9);
        const auto m = build_moment_matrix(b);
        CHECK(m({2, 0}, {2, 0}) == 5);
        CHECK(m({2, 0}, {1, 1}) == 6);
        CHECK(m({1, 1}, {1, 1}) == 7);
        CHECK(m({2, 0}, {0, 2}) == 7);
        CHECK(m({0, 2}, {1, 1}) == 8);
        CHECK(m({0, 2}, {0, 2}) == 9);
        CHECK(m({1, 0}, {1, 1}) == doctest::Approx(-0.2));
        CHECK(m({0, 1}, {0, 2}) == doctest::Approx(1.1));
    }
    SUBCASE("odd degree is rejected")
    {
        MomentSequence<double> b(3, {1, 0, 0, 1, 0, 1, 0, 0, 0, 0});
        CHECK_THROWS_AS(build_moment_matrix(b), DegreeError);
        CHECK(moment_matrix(b, 1).entries.isApprox(Matrix<double>::Identity(3, 3)));
        CHECK_THROWS_AS(moment_matrix(b, 2), DegreeError);
    }
}

TEST_CASE("moment matrices are symmetric and Hankel by blocks")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 3;
        const auto b = random_sequence(rng, 2 * d);
        const auto m = build_moment_matrix(b);
        const auto labels = m.labels();
        CHECK(m.entries.isApprox(m.entries.transpose()));
        for (std::size_t u = 0; u < labels.size(); ++u)
            for (std::size_t v = 0; v < labels.size(); ++v)
                for (std::size_t u2 = 0; u2 < labels.size(); ++u2)
                    for (std::size_t v2 = 0; v2 < labels.size(); ++v2)
                        if (labels[u].i + labels[v].i == labels[u2].i + labels[v2].i &&
                            labels[u].j + labels[v].j == labels[u2].j + labels[v2].j)
                            REQUIRE(m.entries(u, v) == m.entries(u2, v2));
        CHECK(hankel_defect(m) == 0.0);
        CHECK(moments_of(m).values() == b.values());
    }
}

TEST_CASE("hankel_defect detects a broken block")
{
    auto m = build_moment_matrix(normalized_quartic(0, 0, 0, 0, 1, 0, 1, 0, 1));
    m.entries(3, 5) += 0.5; // (X^2, Y^2) no longer equals (XY, XY)
    CHECK(hankel_defect(m) == doctest::Approx(0.5));
}

TEST_CASE("riesz functional")
{
    MomentSequence<double> normalized(3, {1, 0, 0, 1, 0, 1, 1, 0, 0, 0});
    CHECK(riesz(normalized, P::constant(1.0)) == 1.0);
    CHECK(riesz(normalized, P({{{2, 0}, 1.0}, {{0, 2}, 1.0}})) == 2.0);
    CHECK(riesz(normalized, P({{{3, 0}, 1.0}, {{1, 0}, -1.0}})) == 1.0);
    CHECK_THROWS_AS(riesz(normalized, P::monomial({4, 0})), DegreeError);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto b = random_sequence(rng, 4);
        const auto p = random_polynomial(rng, 4);
        const auto q = random_polynomial(rng, 3);
        const double alpha = u(rng);
        CHECK(riesz(b, alpha * p + q) == doctest::Approx(alpha * riesz(b, p) + riesz(b, q)).epsilon(1e-12));
    }
}

TEST_CASE("column_of realizes the functional calculus")
{
    MomentSequence<double> unit(2, {1, 0, 0, 1, 0, 1});
    const auto m1 = build_moment_matrix(unit);
    Vector<double> e1 = Vector<double>::Zero(3);
    e1(1) = 1.0;
    CHECK(column_of(m1, P::x()) == e1);
    CHECK(column_of(m1, P()).isZero());
    CHECK_THROWS_AS(column_of(m1, P::monomial({2, 0})), DegreeError);

    // X^2 = 1 in M(2) of a = 0 with flat quartics
    const auto m2 = build_moment_matrix(normalized_quartic(0, 0, 0, 0, 1, 0, 1, 0, 1));
    CHECK(column_of(m2, P::monomial({2, 0}) - P::constant(1.0)).isZero());

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = build_moment_matrix(random_sequence(rng, 4));
        const auto p = random_polynomial(rng, 2);
        Vector<double> sum = Vector<double>::Zero(6);
        for (const auto& [mono, c] : p.terms())
            sum += c * column_of(m, P::monomial(mono));
        CHECK((column_of(m, p) - sum).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("polynomial arithmetic")
{
    const P p = P::x() + P::constant(1.0);
    const P sq = p * p;
    CHECK(sq.coeff({2, 0}) == 1.0);
    CHECK(sq.coeff({1, 0}) == 2.0);
    CHECK(sq.coeff({0, 0}) == 1.0);
    CHECK(p.pow(3).degree() == 3);
    CHECK((p - p).is_zero());
    CHECK(P().degree() == -1);
    CHECK(sq(2.0, 5.0) == 9.0);
    const auto v = sq.coefficients(2);
    CHECK(P::from_coefficients(v).terms() == sq.terms());
}

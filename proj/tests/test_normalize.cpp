// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <doctest.h>

#include <cubic_moment/cubic.hpp>
#include <cubic_moment/normalize.hpp>

#include "oracles.hpp"

using namespace cubic_moment;
using Mat = Matrix<double>;

namespace {

MomentSequence<double> seq(const std::vector<double>& v, int degree)
{
    return MomentSequence<double>(degree, Eigen::Map<const Vector<double>>(v.data(), static_cast<Eigen::Index>(v.size())));
}

const AffineMap<double> kRotation{0, 0, -1, 0, 1, 0}; // (x, y) -> (-y, x)

/// Raw degree-`degree` moments of a random measure with nonsingular M(1).
std::vector<oracle::PointMass> nonsingular_measure(std::mt19937_64& rng, int n)
{
    for (;;) {
        auto atoms = oracle::random_measure(rng, n);
        const auto d = oracle::minors(oracle::moments(atoms, 2));
        if (d[0] > 0.01 && d[1] > 0.01)
            return atoms;
    }
}

} // namespace

TEST_CASE("minors of M(1)")
{
    const auto unit = minors(MomentSequence<double>(2, {1, 0, 0, 1, 0, 1}));
    CHECK(unit.d2 == 1.0);
    CHECK(unit.d3 == 1.0);

    const auto half = minors(MomentSequence<double>(2, {1, 0.5, 0, 1, 0, 1}));
    CHECK(half.d2 == doctest::Approx(0.75));
    CHECK(half.d3 == doctest::Approx(0.75));

    const auto flat = minors(MomentSequence<double>(2, {1, 0.5, 0.2, 0.25, 0.1, 1}));
    CHECK(flat.d2 == 0.0);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto atoms = oracle::random_measure(rng, 5);
        const auto b = oracle::moments(atoms, 2);
        const auto got = minors(seq(b, 2));
        const auto want = oracle::minors(b);
        CHECK(got.d2 == doctest::Approx(want[0]).epsilon(1e-12));
        CHECK(got.d3 == doctest::Approx(want[1]).epsilon(1e-10));
    }
}

TEST_CASE("degree_one_coeffs")
{
    const auto rot = degree_one_coeffs(MomentSequence<double>(2, {1, 0, 0, 1, 0, 1}));
    CHECK(rot.a == 0.0);
    CHECK(rot.b == 0.0);
    CHECK(rot.c == -1.0);
    CHECK(rot.d == 0.0);
    CHECK(rot.e == 1.0);
    CHECK(rot.f == 0.0);

    const auto psi = degree_one_coeffs(MomentSequence<double>(2, {1, 0.5, 0, 1, 0, 1}));
    CHECK(psi.e == doctest::Approx(2.0 / std::sqrt(3.0)));
    CHECK(psi.d == doctest::Approx(-1.0 / std::sqrt(3.0)));
    CHECK(psi.determinant() == doctest::Approx(1.0 / std::sqrt(0.75)));

    try {
        degree_one_coeffs(MomentSequence<double>(2, {1, 0.5, 0.2, 0.25, 0.1, 1}));
        FAIL("expected SingularM1Error");
    } catch (const SingularM1Error& e) {
        CHECK(e.minor == "d2");
    }
    try {
        // x and y perfectly correlated: d2 > 0, d3 = 0
        degree_one_coeffs(MomentSequence<double>(2, {1, 0, 0, 1, 1, 1}));
        FAIL("expected SingularM1Error");
    } catch (const SingularM1Error& e) {
        CHECK(e.minor == "d3");
    }
}

TEST_CASE("transform_sequence")
{
    std::mt19937_64 rng(21);
    const auto a = oracle::random_a(rng);
    const auto b = normalized_cubic_sequence(a);

    CHECK(transform_sequence(b, AffineMap<double>::identity()).values().isApprox(b.values()));

    const auto rotated = transform_sequence(b, kRotation);
    CHECK(rotated(3, 0) == doctest::Approx(-a(3)));
    CHECK(rotated(2, 1) == doctest::Approx(a(2)));
    CHECK(rotated(1, 2) == doctest::Approx(-a(1)));
    CHECK(rotated(0, 3) == doctest::Approx(a(0)));

    const auto point = seq(oracle::moments({{1, 1, 1}}, 3), 3);
    const AffineMap<double> shift{1, 1, 0, 0, 0, 2}; // (x + 1, 2y)
    const auto moved = transform_sequence(point, shift);
    const auto want = oracle::moments({{2, 2, 1}}, 3);
    for (std::size_t n = 0; n < want.size(); ++n)
        CHECK(moved.values()(static_cast<Eigen::Index>(n)) == doctest::Approx(want[n]));
}

TEST_CASE("build_J")
{
    CHECK(build_J(AffineMap<double>::identity(), 2).isApprox(Mat::Identity(6, 6)));

    const Mat j = build_J(kRotation, 1);
    Vector<double> x_hat = Vector<double>::Zero(3), minus_y = Vector<double>::Zero(3);
    x_hat(1) = 1.0;
    minus_y(2) = -1.0;
    CHECK(j * x_hat == minus_y);

    const AffineMap<double> psi{0.3, 1.2, -0.4, -0.7, 0.5, 2.0};
    const Mat j2 = build_J(psi, 2);
    const auto labels = degree_lex_monomials(2);
    for (std::size_t r = 0; r < labels.size(); ++r)
        for (std::size_t c = 0; c < labels.size(); ++c)
            if (labels[r].degree() > labels[c].degree())
                CHECK(j2(r, c) == 0.0); // substitution cannot raise degree
    CHECK(std::abs(j2.determinant()) > 0.0);
}

TEST_CASE("pullback_measure")
{
    AtomicMeasure<double> mu{{{0.3, -1.2, 0.7}}};
    const auto same = pullback_measure(mu, AffineMap<double>::identity());
    CHECK(same.atoms[0].x == 0.3);
    CHECK(same.atoms[0].y == -1.2);

    const auto rot = pullback_measure(mu, kRotation);
    CHECK(rot.atoms[0].x == doctest::Approx(-1.2));
    CHECK(rot.atoms[0].y == doctest::Approx(-0.3));
    CHECK(rot.atoms[0].weight == 0.7);

    const auto back = pullback_measure(AtomicMeasure<double>{{{2, 2, 1}}}, AffineMap<double>{1, 1, 0, 0, 0, 2});
    CHECK(back.atoms[0].x == doctest::Approx(1.0));
    CHECK(back.atoms[0].y == doctest::Approx(1.0));
}

TEST_CASE("degree-one invariance properties")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto atoms = nonsingular_measure(rng, 6);
        const auto raw4 = seq(oracle::moments(atoms, 4), 4);
        const auto psi = degree_one_coeffs(raw4);
        const auto tilde = transform_sequence(raw4, psi);

        const Mat j = build_J(psi, 2);
        const Mat m = build_moment_matrix(raw4).entries;
        const Mat mt = build_moment_matrix(tilde).entries;
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        CHECK((j.transpose() * m * j - mt).cwiseAbs().maxCoeff() < 1e-10 * scale);
        CHECK(numeric_rank(m, 1e-9) == numeric_rank(mt, 1e-9));

        // normalized by construction: M~(1) = beta00 I
        const Mat m1 = moment_matrix(tilde, 1).entries;
        CHECK((m1 - raw4(0, 0) * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10 * scale);

        // push the measure forward by psi and pull it back again
        AtomicMeasure<double> pushed;
        for (const auto& p : atoms) {
            const auto [u, v] = psi(p.x, p.y);
            pushed.atoms.push_back({u, v, p.w});
        }
        CHECK((pushed.moments(4) - tilde.values()).cwiseAbs().maxCoeff() < 1e-8 * scale);
        const auto pulled = pullback_measure(pushed, psi);
        const auto want = oracle::moments(atoms, 4);
        for (std::size_t n = 0; n < want.size(); ++n)
            CHECK(pulled.moments(4)(static_cast<Eigen::Index>(n)) == doctest::Approx(want[n]).epsilon(1e-8));
    }
}

TEST_CASE("normalize rescales and certifies")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto atoms = nonsingular_measure(rng, 5);
        for (auto& p : atoms)
            p.w *= 7.5;
        const auto cert = normalize(seq(oracle::moments(atoms, 3), 3));
        CHECK(cert.d2 > 0.0);
        CHECK(cert.d3 > 0.0);
        CHECK(cert.scale == doctest::Approx(oracle::moments(atoms, 0)[0]));
        const auto& n = cert.normalized;
        CHECK(n(0, 0) == doctest::Approx(1.0));
        CHECK(std::abs(n(1, 0)) < 1e-10);
        CHECK(std::abs(n(0, 1)) < 1e-10);
        CHECK(std::abs(n(1, 1)) < 1e-10);
        CHECK(n(2, 0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(n(0, 2) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(cert.a_vec(0) == n(3, 0));
        CHECK(cert.a_vec(3) == n(0, 3));
    }
    CHECK_THROWS_AS(normalize(MomentSequence<double>(2, {1, 0, 0, 1, 0, 1})), DegreeError);
}

TEST_CASE("k is invariant under the rotation normalizing already-normalized data")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = oracle::random_a(rng);
        const auto cert = normalize(normalized_cubic_sequence(a));
        CHECK(cert.map.c == -1.0);
        CHECK(cert.map.e == 1.0);
        CHECK(compute_k(cert.a_vec) == doctest::Approx(compute_k(a)).epsilon(1e-12));
    }
}

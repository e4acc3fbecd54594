// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_NORMALIZE_HPP
#define CUBIC_MOMENT_NORMALIZE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "atomic_measure.hpp"
#include "moments.hpp"

namespace cubic_moment {

/// Psi(x, y) = (a + b x + c y, d + e x + f y).
template <typename Scalar>
struct AffineMap {
    Scalar a{0}, b{1}, c{0}, d{0}, e{0}, f{1};

    static AffineMap identity() { return {}; }

    Scalar determinant() const noexcept { return b * f - c * e; }

    Polynomial2<Scalar> psi1() const
    {
        return Polynomial2<Scalar>({{Monomial{0, 0}, a}, {Monomial{1, 0}, b}, {Monomial{0, 1}, c}});
    }
    Polynomial2<Scalar> psi2() const
    {
        return Polynomial2<Scalar>({{Monomial{0, 0}, d}, {Monomial{1, 0}, e}, {Monomial{0, 1}, f}});
    }

    std::pair<Scalar, Scalar> operator()(Scalar x, Scalar y) const { return {a + b * x + c * y, d + e * x + f * y}; }

    /// Psi^{-1}(u, v).
    std::pair<Scalar, Scalar> inverse(Scalar u, Scalar v) const
    {
        const Scalar det = determinant();
        if (det == Scalar(0))
            throw PreconditionError("affine map is not invertible");
        const Scalar ru = u - a;
        const Scalar rv = v - d;
        return {(f * ru - c * rv) / det, (b * rv - e * ru) / det};
    }
};

/// p o Psi.
template <typename Scalar>
Polynomial2<Scalar> compose(const Polynomial2<Scalar>& p, const AffineMap<Scalar>& psi)
{
    const auto p1 = psi.psi1();
    const auto p2 = psi.psi2();
    Polynomial2<Scalar> out;
    for (const auto& [m, c] : p.terms())
        out += c * (p1.pow(m.i) * p2.pow(m.j));
    return out;
}

template <typename Scalar>
struct Minors {
    Scalar d2;
    Scalar d3;
};

/// Leading 2x2 and 3x3 principal minors of M(1), computed on beta / beta_00.
template <typename Scalar>
Minors<Scalar> minors(const MomentSequence<Scalar>& beta)
{
    if (beta.degree() < 2)
        throw DegreeError("minors need moments of degree 2");
    const Scalar s = Scalar(1) / beta(0, 0);
    const Scalar b10 = beta(1, 0) * s, b01 = beta(0, 1) * s;
    const Scalar b20 = beta(2, 0) * s, b11 = beta(1, 1) * s, b02 = beta(0, 2) * s;
    const Scalar d2 = -b10 * b10 + b20;
    const Scalar d3 = -b02 * b10 * b10 + Scalar(2) * b01 * b10 * b11 - b11 * b11 - b01 * b01 * b20 + b02 * b20;
    return {d2, d3};
}

/// The degree-one map sending M(1) of beta / beta_00 to the identity.
/// Throws SingularM1Error naming the first nonpositive minor.
template <typename Scalar>
AffineMap<Scalar> degree_one_coeffs(const MomentSequence<Scalar>& beta, const Tolerances& tol = {})
{
    const auto [d2, d3] = minors(beta);
    const Scalar s = Scalar(1) / beta(0, 0);
    Scalar scale(1);
    for (Eigen::Index n = 0; n < 6; ++n)
        scale = std::max(scale, std::abs(beta.values()(n) * s));
    const Scalar threshold = Scalar(tol.singular) * scale;
    if (!(d2 > threshold))
        throw SingularM1Error("d2", static_cast<double>(d2),
                              "M(1) is singular: minor d2 = beta20 - beta10^2 = " + std::to_string(double(d2)) +
                                  " is not positive");
    if (!(d3 > threshold))
        throw SingularM1Error("d3", static_cast<double>(d3),
                              "M(1) is singular: minor d3 = det M(1) = " + std::to_string(double(d3)) +
                                  " is not positive");

    const Scalar b10 = beta(1, 0) * s, b01 = beta(0, 1) * s;
    const Scalar b20 = beta(2, 0) * s, b11 = beta(1, 1) * s;
    const Scalar root = std::sqrt(d2 * d3);
    AffineMap<Scalar> psi;
    psi.a = (b01 * b20 - b10 * b11) / root;
    psi.b = (b11 - b01 * b10) / root;
    psi.c = -std::sqrt(d2 / d3);
    psi.d = -b10 / std::sqrt(d2);
    psi.e = Scalar(1) / std::sqrt(d2);
    psi.f = Scalar(0);
    return psi;
}

/// beta~_ij = Lambda_beta(Psi_1^i Psi_2^j) for every i + j <= deg beta.
template <typename Scalar>
MomentSequence<Scalar> transform_sequence(const MomentSequence<Scalar>& beta, const AffineMap<Scalar>& psi)
{
    const auto labels = degree_lex_monomials(beta.degree());
    const auto p1 = psi.psi1();
    const auto p2 = psi.psi2();
    Vector<Scalar> out(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t n = 0; n < labels.size(); ++n)
        out(static_cast<Eigen::Index>(n)) = riesz(beta, p1.pow(labels[n].i) * p2.pow(labels[n].j));
    return MomentSequence<Scalar>(beta.degree(), std::move(out));
}

/// J p-hat = (p o Psi)-hat on polynomials of degree <= d.
template <typename Scalar>
Matrix<Scalar> build_J(const AffineMap<Scalar>& psi, int d)
{
    const auto labels = degree_lex_monomials(d);
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix<Scalar> j(n, n);
    for (Eigen::Index col = 0; col < n; ++col)
        j.col(col) = compose(Polynomial2<Scalar>::monomial(labels[col]), psi).coefficients(d);
    return j;
}

/// Maps a representing measure of the transformed sequence back: atoms go
/// through Psi^{-1}, weights are unchanged.
template <typename Scalar>
AtomicMeasure<Scalar> pullback_measure(const AtomicMeasure<Scalar>& mu, const AffineMap<Scalar>& psi)
{
    AtomicMeasure<Scalar> out;
    out.atoms.reserve(mu.atoms.size());
    for (const auto& atom : mu.atoms) {
        const auto [x, y] = psi.inverse(atom.x, atom.y);
        out.atoms.push_back({x, y, atom.weight});
    }
    return out;
}

template <typename Scalar>
struct NormalizationCertificate {
    Scalar scale;   ///< beta_00 of the raw input
    Scalar d2;
    Scalar d3;
    AffineMap<Scalar> map;
    MomentSequence<Scalar> normalized;
    CubicData<Scalar> a_vec;
};

/// Rescales by beta_00 and applies the normalizing map. The map is applied
/// even to already normalized data, where it is the rotation (-y, x).
template <typename Scalar>
NormalizationCertificate<Scalar> normalize(const MomentSequence<Scalar>& beta, const Tolerances& tol = {})
{
    if (beta.degree() != 3)
        throw DegreeError("normalize expects a cubic moment sequence, got degree " + std::to_string(beta.degree()));
    const Scalar scale = beta(0, 0);
    const auto unit = beta.scaled(Scalar(1) / scale);
    const auto [d2, d3] = minors(unit);
    const auto psi = degree_one_coeffs(unit, tol);
    auto normalized = transform_sequence(unit, psi);
    CubicData<Scalar> a_vec(normalized(3, 0), normalized(2, 1), normalized(1, 2), normalized(0, 3));
    return {scale, d2, d3, psi, std::move(normalized), a_vec};
}

} // namespace cubic_moment

#endif // CUBIC_MOMENT_NORMALIZE_HPP

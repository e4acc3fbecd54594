// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_CUBIC_HPP
#define CUBIC_MOMENT_CUBIC_HPP

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linalg.hpp"
#include "moments.hpp"

namespace cubic_moment {

enum class CaseTag {
    FlatK0,                     ///< k = 0: M(2) is a flat extension of M(1), 3 atoms
    RecursivelyDeterminateKPos, ///< k > 0: rank-4 recursively determinate M(2), 4 atoms
    RankIncreasingKNeg,         ///< k < 0: M(2) flat over its {1, X, Y, X^2} compression, 4 atoms
};

constexpr std::string_view case_name(CaseTag c) noexcept
{
    switch (c) {
    case CaseTag::FlatK0:
        return "k_zero";
    case CaseTag::RecursivelyDeterminateKPos:
        return "k_pos";
    case CaseTag::RankIncreasingKNeg:
        return "k_neg";
    }
    return "unknown";
}

/// target column = sum of combo coefficients times basis columns.
template <typename Scalar>
struct ColumnRelation {
    Monomial target;
    Polynomial2<Scalar> combo;

    /// target - combo, which vanishes on the variety.
    Polynomial2<Scalar> polynomial() const { return Polynomial2<Scalar>::monomial(target) - combo; }
};

template <typename Scalar>
using ColumnRelationSet = std::vector<ColumnRelation<Scalar>>;

template <typename Scalar>
struct ExtensionResult {
    CaseTag case_tag;
    Scalar k;
    CubicData<Scalar> a;
    /// (b40, b31, b22, b13, b04)
    Eigen::Matrix<Scalar, 5, 1> quartics;
    MomentMatrix<Scalar> m2;
    std::vector<Monomial> basis;
    ColumnRelationSet<Scalar> relations;
    std::optional<Eigen::Matrix<Scalar, 4, 1>> p_vec;
    std::optional<Scalar> beta50;
    std::optional<MomentMatrix<Scalar>> m3;

    const ColumnRelation<Scalar>* find_relation(Monomial target) const
    {
        for (const auto& r : relations)
            if (r.target == target)
                return &r;
        return nullptr;
    }
};

/// k = 1 + a0 a2 + a1 a3 - a1^2 - a2^2
template <typename Scalar>
Scalar compute_k(const CubicData<Scalar>& a)
{
    return (Scalar(1) + a(0) * a(2) + a(1) * a(3)) - (a(1) * a(1) + a(2) * a(2));
}

/// {1, 0, 0, 1, 0, 1, a0, a1, a2, a3}
template <typename Scalar>
MomentSequence<Scalar> normalized_cubic_sequence(const CubicData<Scalar>& a)
{
    return MomentSequence<Scalar>(3, {Scalar(1), Scalar(0), Scalar(0), Scalar(1), Scalar(0), Scalar(1), a(0), a(1),
                                      a(2), a(3)});
}

/// The normalized cubic data completed by (b40, b31, b22, b13, b04).
template <typename Scalar>
MomentSequence<Scalar> quartic_sequence(const CubicData<Scalar>& a, const Eigen::Matrix<Scalar, 5, 1>& q)
{
    Vector<Scalar> v(15);
    v.head(10) = normalized_cubic_sequence(a).values();
    v.tail(5) = q;
    return MomentSequence<Scalar>(4, std::move(v));
}

/// Closed form of b04 in the rank-increasing case, a polynomial in a.
template <typename Scalar>
Scalar beta04_formula(const CubicData<Scalar>& a)
{
    const Scalar a0 = a(0), a1 = a(1), a2 = a(2), a3 = a(3);
    const Scalar a1s = a1 * a1, a2s = a2 * a2;
    return Scalar(2) + a1s * a1s + Scalar(2) * a0 * a2 + a0 * a0 * a2s + Scalar(2) * a1s * a2s + a2s * a2s +
           Scalar(2) * a1 * a3 + Scalar(2) * a0 * a1 * a2 * a3 + a3 * a3 + a1s * a3 * a3 - Scalar(2) * a1s -
           Scalar(2) * a0 * a1s * a2 - a2s - Scalar(2) * a0 * a2s * a2 - Scalar(2) * a1s * a1 * a3 -
           Scalar(2) * a1 * a2s * a3;
}

namespace detail {

template <typename Scalar>
Polynomial2<Scalar> combo_over(const std::vector<Monomial>& basis, const Eigen::Ref<const Vector<Scalar>>& coeffs)
{
    Polynomial2<Scalar> p;
    for (std::size_t n = 0; n < basis.size(); ++n)
        p += Polynomial2<Scalar>::monomial(basis[n], coeffs(static_cast<Eigen::Index>(n)));
    return p;
}

/// Restriction of m2 to the rows and columns labelled by basis.
template <typename Scalar>
Matrix<Scalar> compression(const MomentMatrix<Scalar>& m, const std::vector<Monomial>& basis)
{
    const auto r = static_cast<Eigen::Index>(basis.size());
    Matrix<Scalar> g(r, r);
    for (Eigen::Index u = 0; u < r; ++u)
        for (Eigen::Index v = 0; v < r; ++v)
            g(u, v) = m(basis[static_cast<std::size_t>(u)], basis[static_cast<std::size_t>(v)]);
    return g;
}

/// M(3) = N G N^T where row n of N holds the basis coordinates of the n-th
/// monomial of degree <= 3 and G is the basis compression of M(2).
template <typename Scalar>
MomentMatrix<Scalar> m3_from_normal_forms(const Matrix<Scalar>& gram, const Matrix<Scalar>& nf)
{
    Matrix<Scalar> m = nf * gram * nf.transpose();
    return {3, (m + m.transpose()) / Scalar(2)};
}

template <typename Scalar>
void check_precondition(bool ok, const char* what, Scalar k)
{
    if (!ok)
        throw PreconditionError(std::string(what) + " (k = " + std::to_string(double(k)) + ")");
}

} // namespace detail

/// k = 0: quartics from W^T W, so M(2) is a flat extension of M(1) = I.
template <typename Scalar>
ExtensionResult<Scalar> extend_k0(const CubicData<Scalar>& a, const Tolerances& tol = {})
{
    const Scalar k = compute_k(a);
    detail::check_precondition(std::abs(k) <= Scalar(tol.k), "extend_k0 requires k = 0", k);
    const Scalar a0 = a(0), a1 = a(1), a2 = a(2), a3 = a(3);

    ExtensionResult<Scalar> r{CaseTag::FlatK0, k, a, {}, {}, {}, {}, {}, {}, {}};
    r.quartics << Scalar(1) + a0 * a0 + a1 * a1, a0 * a1 + a1 * a2, Scalar(1) + a0 * a2 + a1 * a3,
        a1 * a2 + a2 * a3, Scalar(1) + a2 * a2 + a3 * a3;
    r.m2 = build_moment_matrix(quartic_sequence(a, r.quartics));
    r.basis = {{0, 0}, {1, 0}, {0, 1}};
    using P = Polynomial2<Scalar>;
    r.relations = {
        {{2, 0}, P({{{0, 0}, Scalar(1)}, {{1, 0}, a0}, {{0, 1}, a1}})},
        {{1, 1}, P({{{1, 0}, a1}, {{0, 1}, a2}})},
        {{0, 2}, P({{{0, 0}, Scalar(1)}, {{1, 0}, a2}, {{0, 1}, a3}})},
    };
    return r;
}

/// k > 0: b22 raised to 1 + a0 a2 + a1 a3 so C(2) - W^T W is k at (XY, XY)
/// only. M(2) has rank 4 with X^2 and Y^2 as its column relations, and its
/// flat extension M(3) is built from the induced degree-3 relations.
template <typename Scalar>
ExtensionResult<Scalar> extend_kpos(const CubicData<Scalar>& a, const Tolerances& tol = {})
{
    const Scalar k = compute_k(a);
    detail::check_precondition(k > Scalar(tol.k), "extend_kpos requires k > 0", k);
    const Scalar a0 = a(0), a1 = a(1), a2 = a(2), a3 = a(3);

    ExtensionResult<Scalar> r{CaseTag::RecursivelyDeterminateKPos, k, a, {}, {}, {}, {}, {}, {}, {}};
    r.quartics << Scalar(1) + a0 * a0 + a1 * a1, a0 * a1 + a1 * a2, Scalar(1) + a0 * a2 + a1 * a3,
        a1 * a2 + a2 * a3, Scalar(1) + a2 * a2 + a3 * a3;
    r.m2 = build_moment_matrix(quartic_sequence(a, r.quartics));
    r.basis = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};

    // Basis coordinates over {1, X, Y, XY} of every monomial up to degree 3.
    Matrix<Scalar> nf = Matrix<Scalar>::Zero(10, 4);
    nf.row(0) << 1, 0, 0, 0;                                   // 1
    nf.row(1) << 0, 1, 0, 0;                                   // X
    nf.row(2) << 0, 0, 1, 0;                                   // Y
    nf.row(3) << 1, a0, a1, 0;                                 // X^2
    nf.row(4) << 0, 0, 0, 1;                                   // XY
    nf.row(5) << 1, a2, a3, 0;                                 // Y^2
    nf.row(6) << a0, 1 + a0 * a0, a0 * a1, a1;                 // X^3 = X + a0 X^2 + a1 XY
    nf.row(7) << a1, a1 * a2, 1 + a1 * a3, a0;                 // X^2Y = Y + a0 XY + a1 Y^2
    nf.row(8) << a2, 1 + a0 * a2, a1 * a2, a3;                 // XY^2 = X + a2 X^2 + a3 XY
    nf.row(9) << a3, a2 * a3, 1 + a3 * a3, a2;                 // Y^3 = Y + a2 XY + a3 Y^2

    for (const int n : {3, 5, 6, 7, 8, 9})
        r.relations.push_back({monomial_at(static_cast<std::size_t>(n)),
                               detail::combo_over<Scalar>(r.basis, nf.row(n).transpose())});
    r.m3 = detail::m3_from_normal_forms<Scalar>(detail::compression(r.m2, r.basis), nf);
    return r;
}

/// X^3 over {1, X, Y, X^2} forced by the compatibility of the two ways of
/// writing XY^2, and the quintic moment b50 read off the X^2 row.
template <typename Scalar>
struct X3Relation {
    Eigen::Matrix<Scalar, 4, 1> combo;
    Scalar beta50;
};

template <typename Scalar>
X3Relation<Scalar> x3_relation(const CubicData<Scalar>& a, const Eigen::Matrix<Scalar, 4, 1>& p)
{
    const Scalar a0 = a(0), a1 = a(1), a2 = a(2);
    const Scalar p1 = p(0), p2 = p(1), p3 = p(2), p4 = p(3);
    if (p4 == Scalar(0) || !std::isfinite(static_cast<double>(Scalar(1) / p4)))
        throw PreconditionError("x3_relation: p4 = 0, X^3 is undetermined");
    X3Relation<Scalar> out;
    out.combo << a2 * p1, a1 * a1 + a2 * p2 - p1 - a1 * p3, a1 * a2, a2 * p4 - p2;
    out.combo /= p4;
    // X^2 row of M(3) at columns 1, X, Y, X^2 is (b20, b30, b21, b40).
    const Eigen::Matrix<Scalar, 4, 1> x2_row(Scalar(1), a0, a1, Scalar(2) + a0 * a0 + a1 * a1);
    out.beta50 = out.combo.dot(x2_row);
    return out;
}

/// Flat M(3) over M(2) in the rank-increasing case. Degree-3 columns come from
/// the functional calculus on XY = a1 X + a2 Y and Y^2 = p1 + p2 X + p3 Y + p4 X^2,
/// with X^3 from x3_relation.
template <typename Scalar>
MomentMatrix<Scalar> build_m3_kneg(const CubicData<Scalar>& a, const ExtensionResult<Scalar>& ext,
                                   Matrix<Scalar>* normal_forms = nullptr)
{
    if (ext.case_tag != CaseTag::RankIncreasingKNeg || !ext.p_vec)
        throw PreconditionError("build_m3_kneg requires a k < 0 extension");
    using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
    const Scalar a1 = a(1), a2 = a(2);
    const Vec4& p = *ext.p_vec;
    const Vec4 x3 = x3_relation(a, p).combo;

    // Coordinates over {1, X, Y, X^2}; multiplication by x and y on that basis.
    const Vec4 xy(0, a1, a2, 0);
    const Vec4 y2 = p;
    const Vec4 x2y = a1 * Vec4(0, 0, 0, 1) + a2 * xy;
    auto times_x = [&](const Vec4& v) { return Vec4(v(3) * x3 + v(0) * Vec4(0, 1, 0, 0) + v(1) * Vec4(0, 0, 0, 1) + v(2) * xy); };

    const Vec4 xy2_via_xy = a1 * xy + a2 * y2; // y * (XY)
    const Vec4 xy2_via_y2 = times_x(y2);       // x * (Y^2)
    const Scalar scale = std::max({Scalar(1), xy2_via_xy.cwiseAbs().maxCoeff(), xy2_via_y2.cwiseAbs().maxCoeff()});
    if ((xy2_via_xy - xy2_via_y2).cwiseAbs().maxCoeff() > Scalar(1e-9) * scale)
        throw VerificationError("the two expansions of XY^2 disagree");
    const Vec4 y3 = p(0) * Vec4(0, 0, 1, 0) + p(1) * xy + p(2) * y2 + p(3) * x2y;

    Matrix<Scalar> nf(10, 4);
    nf.row(0) = Vec4(1, 0, 0, 0).transpose();
    nf.row(1) = Vec4(0, 1, 0, 0).transpose();
    nf.row(2) = Vec4(0, 0, 1, 0).transpose();
    nf.row(3) = Vec4(0, 0, 0, 1).transpose();
    nf.row(4) = xy.transpose();
    nf.row(5) = y2.transpose();
    nf.row(6) = x3.transpose();
    nf.row(7) = x2y.transpose();
    nf.row(8) = xy2_via_xy.transpose();
    nf.row(9) = y3.transpose();
    if (normal_forms)
        *normal_forms = nf;
    return detail::m3_from_normal_forms<Scalar>(detail::compression(ext.m2, ext.basis), nf);
}

/// k < 0: X^2 made independent of 1, X, Y; M(2) is the flat extension of its
/// compression M4 to {1, X, Y, X^2}, with b04 from the flat completion.
template <typename Scalar>
ExtensionResult<Scalar> extend_kneg(const CubicData<Scalar>& a, const Tolerances& tol = {})
{
    const Scalar k = compute_k(a);
    detail::check_precondition(k < -Scalar(tol.k), "extend_kneg requires k < 0", k);
    const Scalar a0 = a(0), a1 = a(1), a2 = a(2), a3 = a(3);

    const Scalar b40 = Scalar(2) + a0 * a0 + a1 * a1;
    const Scalar b31 = a0 * a1 + a1 * a2;
    const Scalar b22 = a1 * a1 + a2 * a2;
    const Scalar b13 = a1 * a2 + a2 * a3;

    Eigen::Matrix<Scalar, 4, 4> m4;
    m4 << 1, 0, 0, 1,
          0, 1, 0, a0,
          0, 0, 1, a1,
          1, a0, a1, b40;
    Eigen::Matrix<Scalar, 4, 2> b;
    b << 0, 1,
         a1, a2,
         a2, a3,
         b31, b22;
    const Matrix<Scalar> c = flat_completion(m4, b, tol);
    const Scalar cscale = std::max(Scalar(1), c.cwiseAbs().maxCoeff());
    if (std::abs(c(0, 0) - b22) > Scalar(tol.flat) * cscale || std::abs(c(0, 1) - b13) > Scalar(tol.flat) * cscale)
        throw VerificationError("flat completion of the {1, X, Y, X^2} compression is not Hankel");

    ExtensionResult<Scalar> r{CaseTag::RankIncreasingKNeg, k, a, {}, {}, {}, {}, {}, {}, {}};
    r.quartics << b40, b31, b22, b13, c(1, 1);
    r.m2 = build_moment_matrix(quartic_sequence(a, r.quartics));
    r.basis = {{0, 0}, {1, 0}, {0, 1}, {2, 0}};

    const Eigen::Matrix<Scalar, 4, 1> rhs(Scalar(1), a2, a3, b22);
    r.p_vec = Eigen::Matrix<Scalar, 4, 1>(m4.partialPivLu().solve(rhs));
    const auto x3 = x3_relation(a, *r.p_vec);
    r.beta50 = x3.beta50;

    Matrix<Scalar> nf;
    r.m3 = build_m3_kneg(a, r, &nf);
    for (const int n : {4, 5, 6, 7, 8, 9})
        r.relations.push_back({monomial_at(static_cast<std::size_t>(n)),
                               detail::combo_over<Scalar>(r.basis, nf.row(n).transpose())});
    return r;
}

/// Sign of k against tol.k; ties go to k = 0.
template <typename Scalar>
CaseTag classify(Scalar k, const Tolerances& tol = {})
{
    if (std::abs(k) <= Scalar(tol.k))
        return CaseTag::FlatK0;
    return k > Scalar(0) ? CaseTag::RecursivelyDeterminateKPos : CaseTag::RankIncreasingKNeg;
}

template <typename Scalar>
ExtensionResult<Scalar> extend(const CubicData<Scalar>& a, const Tolerances& tol = {})
{
    switch (classify(compute_k(a), tol)) {
    case CaseTag::FlatK0:
        return extend_k0(a, tol);
    case CaseTag::RecursivelyDeterminateKPos:
        return extend_kpos(a, tol);
    case CaseTag::RankIncreasingKNeg:
        break;
    }
    return extend_kneg(a, tol);
}

// Sum-of-squares certificate for b04 - 1 in the rank-increasing case.

/// y = (1, a2, a3, a1^2, a2^2, a0 a2, a1 a3)
template <typename Scalar>
Eigen::Matrix<Scalar, 7, 1> sos_monomials(const CubicData<Scalar>& a)
{
    Eigen::Matrix<Scalar, 7, 1> y;
    y << Scalar(1), a(2), a(3), a(1) * a(1), a(2) * a(2), a(0) * a(2), a(1) * a(3);
    return y;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 7> sos_gram()
{
    Eigen::Matrix<Scalar, 7, 7> r;
    r << 1, 0, 0, -1, -1, 1, 1,
         0, 1, 0, 0, 0, 0, 0,
         0, 0, 1, 0, 0, 0, 0,
        -1, 0, 0, 1, 1, -1, -1,
        -1, 0, 0, 1, 1, -1, -1,
         1, 0, 0, -1, -1, 1, 1,
         1, 0, 0, -1, -1, 1, 1;
    return r;
}

template <typename Scalar>
Scalar sos_quadratic_form(const CubicData<Scalar>& a)
{
    const auto y = sos_monomials(a);
    return y.dot(sos_gram<Scalar>() * y);
}

/// y^T R y equals b04 - 1 and is nonnegative.
template <typename Scalar>
bool sos_certificate_check(const CubicData<Scalar>& a)
{
    const Scalar form = sos_quadratic_form(a);
    const Scalar target = beta04_formula(a) - Scalar(1);
    return std::abs(form - target) <= Scalar(1e-9) * std::max(Scalar(1), std::abs(target)) && form >= Scalar(-1e-12);
}

} // namespace cubic_moment

#endif // CUBIC_MOMENT_CUBIC_HPP

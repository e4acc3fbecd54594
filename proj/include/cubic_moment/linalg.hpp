// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_LINALG_HPP
#define CUBIC_MOMENT_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "types.hpp"

namespace cubic_moment {

namespace detail {

template <typename Derived>
auto symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& s)
{
    using Scalar = typename Derived::Scalar;
    const Matrix<Scalar> sym = (s + s.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
    return Vector<Scalar>(solver.eigenvalues());
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    return m.size() == 0 ? Scalar(0) : m.cwiseAbs().maxCoeff();
}

} // namespace detail

/// Smallest eigenvalue of the symmetric part of s. s counts as PSD when this is >= -tol_psd.
template <typename Derived>
typename Derived::Scalar psd_min_eig(const Eigen::MatrixBase<Derived>& s)
{
    using Scalar = typename Derived::Scalar;
    if (s.size() == 0)
        return Scalar(0);
    return detail::symmetric_eigenvalues(s).minCoeff();
}

/// Number of eigenvalues with |lambda| > tol * max(1, |lambda|_max).
template <typename Derived>
int numeric_rank(const Eigen::MatrixBase<Derived>& s, double tol)
{
    using Scalar = typename Derived::Scalar;
    if (s.size() == 0)
        return 0;
    const Vector<Scalar> ev = detail::symmetric_eigenvalues(s);
    const Scalar cutoff = Scalar(tol) * std::max(Scalar(1), ev.cwiseAbs().maxCoeff());
    return static_cast<int>((ev.array().abs() > cutoff).count());
}

/// Least-squares W with A W ~ B for symmetric PSD A (pseudo-inverse through the
/// spectral decomposition). Throws RangeError if B is not in Ran A.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> range_solve(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                              const Tolerances& tol = {})
{
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw DegreeError("range_solve: nonconformal dimensions");
    const Matrix<Scalar> sym = (a + a.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym);
    const Vector<Scalar>& ev = es.eigenvalues();
    const Scalar cutoff = Scalar(tol.psd) * std::max(Scalar(1), ev.cwiseAbs().maxCoeff());
    Vector<Scalar> inv = Vector<Scalar>::Zero(ev.size());
    for (Eigen::Index n = 0; n < ev.size(); ++n)
        if (std::abs(ev(n)) > cutoff)
            inv(n) = Scalar(1) / ev(n);
    const Matrix<Scalar>& v = es.eigenvectors();
    Matrix<Scalar> w = v * inv.asDiagonal() * (v.transpose() * b);
    const Scalar residual = detail::max_abs(Matrix<Scalar>(sym * w - b));
    if (residual > Scalar(tol.range) * std::max(Scalar(1), detail::max_abs(b)))
        throw RangeError("B is not in the range of A (residual " + std::to_string(static_cast<double>(residual)) +
                         "); no positive extension exists");
    return w;
}

template <typename Scalar>
struct SmuljanResult {
    bool psd = false;
    bool flat = false;
    int rank = 0;
    std::optional<Matrix<Scalar>> witness_W;
    /// Smallest eigenvalue of C - W^T A W; NaN when no W exists.
    Scalar schur_gap = std::numeric_limits<Scalar>::quiet_NaN();
};

/// Classifies [[A, B], [B^T, C]]: PSD iff A >= 0, B = A W and C >= W^T A W;
/// flat iff additionally C = W^T A W.
template <typename DerivedA, typename DerivedB, typename DerivedC>
SmuljanResult<typename DerivedA::Scalar> smuljan_classify(const Eigen::MatrixBase<DerivedA>& a,
                                                          const Eigen::MatrixBase<DerivedB>& b,
                                                          const Eigen::MatrixBase<DerivedC>& c,
                                                          const Tolerances& tol = {})
{
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != a.cols() || c.rows() != c.cols() || b.rows() != a.rows() || b.cols() != c.rows())
        throw DegreeError("smuljan_classify: nonconformal blocks");

    SmuljanResult<Scalar> out;
    const auto n = a.rows();
    const auto m = c.rows();
    Matrix<Scalar> block(n + m, n + m);
    block << a, b, b.transpose(), c;
    out.rank = numeric_rank(block, tol.flat);

    const bool a_psd = psd_min_eig(a) >= -Scalar(tol.psd) * std::max(Scalar(1), detail::max_abs(a));
    try {
        out.witness_W = range_solve(a, b, tol);
    } catch (const RangeError&) {
        return out;
    }
    const Matrix<Scalar>& w = *out.witness_W;
    const Matrix<Scalar> gap = c - w.transpose() * a * w;
    out.schur_gap = psd_min_eig(gap);
    out.psd = a_psd && out.schur_gap >= -Scalar(tol.psd) * std::max(Scalar(1), detail::max_abs(c));
    out.flat = out.psd && detail::max_abs(gap) <= Scalar(tol.flat) * std::max(Scalar(1), detail::max_abs(c));
    return out;
}

/// C := W^T A W, the unique C making [[A, B], [B^T, C]] a flat extension of A.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> flat_completion(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedB>& b, const Tolerances& tol = {})
{
    using Scalar = typename DerivedA::Scalar;
    const Matrix<Scalar> w = range_solve(a, b, tol);
    Matrix<Scalar> c = w.transpose() * a * w;
    return (c + c.transpose()) / Scalar(2);
}

/// Induced infinity norm of Mx My - My Mx.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar commutator_norm(const Eigen::MatrixBase<DerivedX>& mx, const Eigen::MatrixBase<DerivedY>& my)
{
    using Scalar = typename DerivedX::Scalar;
    const Matrix<Scalar> comm = mx * my - my * mx;
    return comm.size() == 0 ? Scalar(0) : comm.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Scalar>
struct JointEigenvalue {
    Scalar x;
    Scalar y;
};

/// Joint spectrum of a commuting pair. A random convex combination
/// c Mx + (1 - c) My is brought to real Schur form Q T Q^T; Q also
/// triangularizes Mx and My, so their diagonals pair up. Eigenvectors come
/// from back-substitution on T. Retries with a fresh c when eigenvalues of the
/// combination cluster or the recovered points collide.
template <typename DerivedX, typename DerivedY, typename Rng>
std::vector<JointEigenvalue<typename DerivedX::Scalar>> joint_eigen(const Eigen::MatrixBase<DerivedX>& mx,
                                                                    const Eigen::MatrixBase<DerivedY>& my, Rng& rng,
                                                                    const Tolerances& tol = {}, int max_attempts = 5)
{
    using Scalar = typename DerivedX::Scalar;
    using Mat = Matrix<Scalar>;
    const auto r = mx.rows();
    if (mx.rows() != mx.cols() || my.rows() != my.cols() || my.rows() != r)
        throw DegreeError("joint_eigen: matrices must be square and of equal size");

    const Mat x_mat = mx;
    const Mat y_mat = my;
    const Scalar scale_x = std::max(Scalar(1), detail::max_abs(x_mat));
    const Scalar scale_y = std::max(Scalar(1), detail::max_abs(y_mat));
    const Scalar comm = commutator_norm(x_mat, y_mat);
    if (comm > Scalar(tol.commute) * scale_x * scale_y)
        throw CommutatorError("multiplication matrices do not commute (norm " + std::to_string(double(comm)) + ")");

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::string last_failure = "no attempts made";
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const Scalar c = Scalar(coin(rng));
        const Mat combo = c * x_mat + (Scalar(1) - c) * y_mat;
        Eigen::RealSchur<Mat> schur(combo);
        if (schur.info() != Eigen::Success) {
            last_failure = "real Schur iteration did not converge";
            continue;
        }
        const Mat& t = schur.matrixT();
        const Mat& q = schur.matrixU();
        const Scalar scale_t = std::max(Scalar(1), detail::max_abs(t));

        bool clustered = false;
        for (Eigen::Index n = 0; n + 1 < r; ++n) {
            if (t(n + 1, n) == Scalar(0))
                continue;
            const Scalar tr = t(n, n) + t(n + 1, n + 1);
            const Scalar det = t(n, n) * t(n + 1, n + 1) - t(n, n + 1) * t(n + 1, n);
            const Scalar disc = tr * tr / Scalar(4) - det;
            if (disc < Scalar(0) && std::sqrt(-disc) > Scalar(tol.cluster) * scale_t)
                throw ComplexAtomError("joint spectrum has a nonreal pair (imaginary part " +
                                       std::to_string(double(std::sqrt(-disc))) + ")");
            clustered = true;
        }
        const Vector<Scalar> lambda = t.diagonal();
        for (Eigen::Index u = 0; u < r && !clustered; ++u)
            for (Eigen::Index v = u + 1; v < r; ++v)
                if (std::abs(lambda(u) - lambda(v)) < Scalar(tol.cluster) * scale_t)
                    clustered = true;
        if (clustered) {
            last_failure = "eigenvalues of the random combination cluster";
            continue;
        }

        const Mat tx = q.transpose() * x_mat * q;
        const Mat ty = q.transpose() * y_mat * q;
        std::vector<JointEigenvalue<Scalar>> out;
        out.reserve(static_cast<std::size_t>(r));
        bool ok = true;
        for (Eigen::Index n = 0; n < r && ok; ++n) {
            Vector<Scalar> z = Vector<Scalar>::Zero(r);
            z(n) = Scalar(1);
            for (Eigen::Index row = n - 1; row >= 0; --row) {
                Scalar s(0);
                for (Eigen::Index col = row + 1; col <= n; ++col)
                    s += t(row, col) * z(col);
                z(row) = -s / (t(row, row) - lambda(n));
            }
            const Vector<Scalar> v = (q * z).normalized();
            const JointEigenvalue<Scalar> pt{tx(n, n), ty(n, n)};
            const Scalar rx = (x_mat * v - pt.x * v).norm();
            const Scalar ry = (y_mat * v - pt.y * v).norm();
            if (rx > Scalar(tol.eig) * scale_x || ry > Scalar(tol.eig) * scale_y) {
                last_failure = "eigenvector residual too large";
                ok = false;
            }
            out.push_back(pt);
        }
        for (std::size_t u = 0; u < out.size() && ok; ++u)
            for (std::size_t v = u + 1; v < out.size(); ++v)
                if (std::max(std::abs(out[u].x - out[v].x), std::abs(out[u].y - out[v].y)) < Scalar(tol.atom_separation)) {
                    last_failure = "recovered points coincide";
                    ok = false;
                    break;
                }
        if (ok)
            return out;
    }
    throw MomentError("joint_eigen failed after " + std::to_string(max_attempts) + " attempts: " + last_failure);
}

} // namespace cubic_moment

#endif // CUBIC_MOMENT_LINALG_HPP

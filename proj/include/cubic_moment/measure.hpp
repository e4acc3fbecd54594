// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_MEASURE_HPP
#define CUBIC_MOMENT_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "atomic_measure.hpp"
#include "cubic.hpp"
#include "linalg.hpp"
#include "normalize.hpp"

namespace cubic_moment {

template <typename Scalar>
struct MultiplicationMatrices {
    Matrix<Scalar> mx;
    Matrix<Scalar> my;
};

/// Matrices of multiplication by x and by y on the span of basis. Column n
/// holds the basis coordinates of x * basis[n] (resp. y * basis[n]).
template <typename Scalar>
MultiplicationMatrices<Scalar> multiplication_matrices(const std::vector<Monomial>& basis,
                                                       const ColumnRelationSet<Scalar>& relations)
{
    const auto r = static_cast<Eigen::Index>(basis.size());
    auto coordinates = [&](Monomial m) -> Vector<Scalar> {
        Vector<Scalar> v = Vector<Scalar>::Zero(r);
        if (auto it = std::find(basis.begin(), basis.end(), m); it != basis.end()) {
            v(it - basis.begin()) = Scalar(1);
            return v;
        }
        for (const auto& rel : relations) {
            if (rel.target != m)
                continue;
            for (const auto& [mono, c] : rel.combo.terms()) {
                auto it = std::find(basis.begin(), basis.end(), mono);
                if (it == basis.end())
                    throw MissingRelationError("relation for " + to_string(m) + " uses non-basis column " +
                                               to_string(mono));
                v(it - basis.begin()) += c;
            }
            return v;
        }
        throw MissingRelationError("no column relation expresses " + to_string(m) + " over the basis");
    };

    MultiplicationMatrices<Scalar> out{Matrix<Scalar>(r, r), Matrix<Scalar>(r, r)};
    for (Eigen::Index n = 0; n < r; ++n) {
        const Monomial b = basis[static_cast<std::size_t>(n)];
        out.mx.col(n) = coordinates({b.i + 1, b.j});
        out.my.col(n) = coordinates({b.i, b.j + 1});
    }
    return out;
}

/// Largest |p(x, y)| over the relation polynomials and the points, each value
/// scaled by max(1, sum |c_m m(x, y)|).
template <typename Scalar>
Scalar variety_residual(const std::vector<JointEigenvalue<Scalar>>& points, const ColumnRelationSet<Scalar>& relations)
{
    Scalar worst(0);
    for (const auto& pt : points)
        for (const auto& rel : relations) {
            const auto p = rel.polynomial();
            Scalar magnitude(1);
            for (const auto& [m, c] : p.terms())
                magnitude += std::abs(c * std::pow(pt.x, m.i) * std::pow(pt.y, m.j));
            worst = std::max(worst, std::abs(p(pt.x, pt.y)) / magnitude);
        }
    return worst;
}

/// The |basis| points of the variety: joint spectrum of the multiplication matrices.
template <typename Scalar, typename Rng>
std::vector<JointEigenvalue<Scalar>> extract_atoms(const ExtensionResult<Scalar>& ext, Rng& rng,
                                                   const Tolerances& tol = {})
{
    const auto mm = multiplication_matrices(ext.basis, ext.relations);
    auto points = joint_eigen(mm.mx, mm.my, rng, tol);
    const Scalar res = variety_residual(points, ext.relations);
    if (res > Scalar(tol.variety))
        throw VerificationError("extracted atoms miss the column relations (residual " + std::to_string(double(res)) +
                                ")");
    return points;
}

/// Solves V_B^T rho = (Lambda(t_1), ..., Lambda(t_r)) for the densities.
template <typename Scalar>
Vector<Scalar> solve_densities(const std::vector<JointEigenvalue<Scalar>>& atoms, const std::vector<Monomial>& basis,
                               const MomentSequence<Scalar>& beta, const Tolerances& tol = {})
{
    if (atoms.size() != basis.size())
        throw SingularVandermondeError("need exactly one atom per basis column");
    const auto r = static_cast<Eigen::Index>(atoms.size());
    Matrix<Scalar> vt(r, r);
    Vector<Scalar> rhs(r);
    for (Eigen::Index b = 0; b < r; ++b) {
        const Monomial t = basis[static_cast<std::size_t>(b)];
        rhs(b) = beta[t];
        for (Eigen::Index k = 0; k < r; ++k) {
            const auto& pt = atoms[static_cast<std::size_t>(k)];
            vt(b, k) = std::pow(pt.x, t.i) * std::pow(pt.y, t.j);
        }
    }
    // equilibrate columns: a far atom should not make the near ones look dependent
    const Vector<Scalar> colmax = vt.cwiseAbs().colwise().maxCoeff().transpose();
    if (!(colmax.minCoeff() > Scalar(0)))
        throw SingularVandermondeError("Vandermonde system is singular; atoms coincide");
    const Matrix<Scalar> scaled = vt * colmax.cwiseInverse().asDiagonal();
    Eigen::FullPivLU<Matrix<Scalar>> lu(scaled);
    lu.setThreshold(Scalar(tol.atom_separation));
    if (!lu.isInvertible())
        throw SingularVandermondeError("Vandermonde system is singular; atoms coincide");
    return lu.solve(rhs).cwiseQuotient(colmax);
}

template <typename Scalar>
struct MeasureReport {
    Scalar max_moment_residual;
    Vector<Scalar> residuals; ///< signed, measure minus target, degree-lex
    Scalar min_weight;
};

/// Compares every moment of mu with beta.
template <typename Scalar>
MeasureReport<Scalar> verify_measure(const AtomicMeasure<Scalar>& mu, const MomentSequence<Scalar>& beta)
{
    MeasureReport<Scalar> out;
    out.residuals = mu.moments(beta.degree()) - beta.values();
    out.max_moment_residual = out.residuals.cwiseAbs().maxCoeff();
    out.min_weight = std::numeric_limits<Scalar>::infinity();
    for (const auto& a : mu.atoms)
        out.min_weight = std::min(out.min_weight, a.weight);
    return out;
}

struct SolveOptions {
    Tolerances tol;
    std::uint64_t seed = 0x5eedULL;
};

template <typename Scalar>
struct SolveReport {
    CaseTag case_tag;
    Scalar k;
    int rank;
    int variety_size;
    Scalar max_moment_residual;
    Scalar min_weight;
    Scalar commutator_norm;
    Scalar variety_residual;
    NormalizationCertificate<Scalar> certificate;
};

template <typename Scalar>
struct SolveResult {
    AtomicMeasure<Scalar> measure;            ///< in the coordinates of the input
    AtomicMeasure<Scalar> normalized_measure; ///< represents the normalized sequence
    SolveReport<Scalar> report;
    ExtensionResult<Scalar> extension;
    MultiplicationMatrices<Scalar> multiplication;
};

/// normalize -> extend -> multiplication matrices -> atoms -> densities ->
/// pull back -> verify. Never returns an unverified measure.
template <typename Scalar>
SolveResult<Scalar> solve_cubic(const MomentSequence<Scalar>& beta, const SolveOptions& options = {})
{
    const Tolerances& tol = options.tol;
    if (beta.degree() != 3)
        throw DegreeError("solve_cubic expects the ten moments of degree <= 3");

    auto cert = normalize(beta, tol);
    auto ext = extend(cert.a_vec, tol);
    auto mm = multiplication_matrices(ext.basis, ext.relations);

    std::mt19937_64 rng(options.seed);
    const auto points = extract_atoms(ext, rng, tol);
    const Vector<Scalar> rho = solve_densities(points, ext.basis, cert.normalized, tol);

    AtomicMeasure<Scalar> normalized;
    for (std::size_t n = 0; n < points.size(); ++n) {
        const Scalar w = rho(static_cast<Eigen::Index>(n));
        // weigh the density by the atom's reach into the cubic moments, so a
        // far atom with a tiny but load-bearing weight is not mistaken for noise
        using std::abs;
        const Scalar reach = std::max({Scalar(1), abs(points[n].x), abs(points[n].y)});
        if (!(w > Scalar(0)) || !(w * reach * reach * reach >= Scalar(tol.min_weight)))
            throw VerificationError("density " + std::to_string(double(w)) + " at atom (" +
                                    std::to_string(double(points[n].x)) + ", " + std::to_string(double(points[n].y)) +
                                    ") is not positive");
        normalized.atoms.push_back({points[n].x, points[n].y, w});
    }

    AtomicMeasure<Scalar> measure = pullback_measure(normalized, cert.map);
    for (auto& atom : measure.atoms)
        atom.weight *= cert.scale;

    const auto check = verify_measure(measure, beta);
    const Scalar scale = std::max(Scalar(1), beta.values().cwiseAbs().maxCoeff());
    if (!(check.max_moment_residual <= Scalar(tol.accept) * scale))
        throw VerificationError("recovered measure misses the input moments (max residual " +
                                std::to_string(double(check.max_moment_residual)) + ")");

    SolveReport<Scalar> report{ext.case_tag,
                               ext.k,
                               numeric_rank(ext.m2.entries, tol.flat),
                               static_cast<int>(points.size()),
                               check.max_moment_residual,
                               check.min_weight,
                               commutator_norm(mm.mx, mm.my),
                               variety_residual(points, ext.relations),
                               std::move(cert)};
    return {std::move(measure), std::move(normalized), std::move(report), std::move(ext), std::move(mm)};
}

} // namespace cubic_moment

#endif // CUBIC_MOMENT_MEASURE_HPP

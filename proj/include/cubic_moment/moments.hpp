// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_MOMENTS_HPP
#define CUBIC_MOMENT_MOMENTS_HPP

#include <cmath>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace cubic_moment {

/// Real bivariate polynomial with finite support.
template <typename Scalar>
class Polynomial2 {
public:
    using Terms = std::map<Monomial, Scalar>;

    Polynomial2() = default;
    Polynomial2(std::initializer_list<std::pair<const Monomial, Scalar>> terms) : m_terms(terms) { prune(); }
    explicit Polynomial2(Terms terms) : m_terms(std::move(terms)) { prune(); }

    static Polynomial2 constant(Scalar c) { return Polynomial2({{Monomial{0, 0}, c}}); }
    static Polynomial2 monomial(Monomial m, Scalar c = Scalar(1)) { return Polynomial2({{m, c}}); }
    static Polynomial2 x() { return monomial({1, 0}); }
    static Polynomial2 y() { return monomial({0, 1}); }

    /// Inverse of coefficients(): entry n of v is the coefficient of monomial_at(n).
    static Polynomial2 from_coefficients(const Eigen::Ref<const Vector<Scalar>>& v)
    {
        Terms t;
        for (Eigen::Index n = 0; n < v.size(); ++n)
            t[monomial_at(static_cast<std::size_t>(n))] = v(n);
        return Polynomial2(std::move(t));
    }

    const Terms& terms() const noexcept { return m_terms; }
    bool is_zero() const noexcept { return m_terms.empty(); }

    Scalar coeff(Monomial m) const
    {
        auto it = m_terms.find(m);
        return it == m_terms.end() ? Scalar(0) : it->second;
    }

    /// -1 for the zero polynomial.
    int degree() const noexcept
    {
        int d = -1;
        for (const auto& [m, c] : m_terms)
            d = std::max(d, m.degree());
        return d;
    }

    /// Coefficient vector p-hat in degree-lex order, length monomial_count(d).
    Vector<Scalar> coefficients(int d) const
    {
        if (degree() > d)
            throw DegreeError("polynomial of degree " + std::to_string(degree()) +
                              " does not fit in degree " + std::to_string(d));
        Vector<Scalar> v = Vector<Scalar>::Zero(static_cast<Eigen::Index>(monomial_count(d)));
        for (const auto& [m, c] : m_terms)
            v(static_cast<Eigen::Index>(monomial_index(m))) = c;
        return v;
    }

    Scalar operator()(Scalar x, Scalar y) const
    {
        Scalar s(0);
        for (const auto& [m, c] : m_terms)
            s += c * std::pow(x, m.i) * std::pow(y, m.j);
        return s;
    }

    Polynomial2& operator+=(const Polynomial2& o)
    {
        for (const auto& [m, c] : o.m_terms)
            m_terms[m] += c;
        prune();
        return *this;
    }
    Polynomial2& operator-=(const Polynomial2& o) { return *this += o * Scalar(-1); }
    Polynomial2& operator*=(Scalar s)
    {
        for (auto& [m, c] : m_terms)
            c *= s;
        prune();
        return *this;
    }

    friend Polynomial2 operator+(Polynomial2 a, const Polynomial2& b) { return a += b; }
    friend Polynomial2 operator-(Polynomial2 a, const Polynomial2& b) { return a -= b; }
    friend Polynomial2 operator*(Polynomial2 a, Scalar s) { return a *= s; }
    friend Polynomial2 operator*(Scalar s, Polynomial2 a) { return a *= s; }

    friend Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b)
    {
        Terms t;
        for (const auto& [ma, ca] : a.m_terms)
            for (const auto& [mb, cb] : b.m_terms)
                t[Monomial{ma.i + mb.i, ma.j + mb.j}] += ca * cb;
        return Polynomial2(std::move(t));
    }

    Polynomial2 pow(int n) const
    {
        Polynomial2 r = constant(Scalar(1));
        for (int e = 0; e < n; ++e)
            r = r * *this;
        return r;
    }

private:
    void prune()
    {
        std::erase_if(m_terms, [](const auto& kv) { return kv.second == Scalar(0); });
    }

    Terms m_terms;
};

/// Moments beta_ij for all i + j <= degree, stored densely in degree-lex order.
template <typename Scalar>
class MomentSequence {
public:
    MomentSequence(int degree, Vector<Scalar> values) : m_degree(degree), m_values(std::move(values))
    {
        if (degree < 0)
            throw DegreeError("moment sequence degree must be nonnegative");
        if (static_cast<std::size_t>(m_values.size()) != monomial_count(degree))
            throw DegreeError("moment sequence of degree " + std::to_string(degree) + " needs " +
                              std::to_string(monomial_count(degree)) + " values, got " +
                              std::to_string(m_values.size()));
        if (!(m_values(0) > Scalar(0)))
            throw PreconditionError("beta_00 must be positive");
    }

    MomentSequence(int degree, std::initializer_list<Scalar> values)
        : MomentSequence(degree, Eigen::Map<const Vector<Scalar>>(values.begin(),
                                                                  static_cast<Eigen::Index>(values.size())))
    {
    }

    int degree() const noexcept { return m_degree; }
    const Vector<Scalar>& values() const noexcept { return m_values; }

    Scalar operator()(int i, int j) const { return (*this)[Monomial{i, j}]; }
    Scalar operator[](Monomial m) const
    {
        if (m.i < 0 || m.j < 0 || m.degree() > m_degree)
            throw DegreeError("moment beta_" + std::to_string(m.i) + std::to_string(m.j) +
                              " is beyond degree " + std::to_string(m_degree));
        return m_values(static_cast<Eigen::Index>(monomial_index(m)));
    }

    /// The leading moments up to degree d.
    MomentSequence truncated(int d) const
    {
        if (d > m_degree)
            throw DegreeError("cannot truncate upward");
        return MomentSequence(d, m_values.head(static_cast<Eigen::Index>(monomial_count(d))));
    }

    MomentSequence scaled(Scalar s) const { return MomentSequence(m_degree, m_values * s); }

private:
    int m_degree;
    Vector<Scalar> m_values;
};

/// M(d): entry (u, v) is beta_{u+v}, rows and columns labelled degree-lex.
template <typename Scalar>
struct MomentMatrix {
    int degree = 0;
    Matrix<Scalar> entries;

    std::vector<Monomial> labels() const { return degree_lex_monomials(degree); }
    Eigen::Index size() const noexcept { return entries.rows(); }

    Scalar operator()(Monomial row, Monomial col) const
    {
        return entries(static_cast<Eigen::Index>(monomial_index(row)),
                       static_cast<Eigen::Index>(monomial_index(col)));
    }
};

/// M(d) from the moments of degree <= 2d of beta. beta may carry more moments.
template <typename Scalar>
MomentMatrix<Scalar> moment_matrix(const MomentSequence<Scalar>& beta, int d)
{
    if (d < 0 || 2 * d > beta.degree())
        throw DegreeError("M(" + std::to_string(d) + ") needs moments of degree " + std::to_string(2 * d) +
                          ", sequence has degree " + std::to_string(beta.degree()));
    const auto labels = degree_lex_monomials(d);
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix<Scalar> m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = beta(labels[r].i + labels[c].i, labels[r].j + labels[c].j);
    return {d, std::move(m)};
}

/// M(d) for a sequence of even degree 2d.
template <typename Scalar>
MomentMatrix<Scalar> build_moment_matrix(const MomentSequence<Scalar>& beta)
{
    if (beta.degree() % 2 != 0)
        throw DegreeError("moment matrix needs an even-degree sequence, got degree " + std::to_string(beta.degree()));
    return moment_matrix(beta, beta.degree() / 2);
}

/// Riesz functional: sum of coeff_ij * beta_ij.
template <typename Scalar>
Scalar riesz(const MomentSequence<Scalar>& beta, const Polynomial2<Scalar>& p)
{
    if (p.degree() > beta.degree())
        throw DegreeError("polynomial degree " + std::to_string(p.degree()) + " exceeds available moments (degree " +
                          std::to_string(beta.degree()) + ")");
    Scalar s(0);
    for (const auto& [m, c] : p.terms())
        s += c * beta[m];
    return s;
}

/// p(X, Y) = M(d) p-hat.
template <typename Scalar>
Vector<Scalar> column_of(const MomentMatrix<Scalar>& m, const Polynomial2<Scalar>& p)
{
    return m.entries * p.coefficients(m.degree);
}

/// Moments up to `degree` of sum_k w_k delta_(x_k, y_k).
template <typename Scalar>
Vector<Scalar> atomic_moments(const std::vector<Scalar>& xs, const std::vector<Scalar>& ys,
                              const std::vector<Scalar>& ws, int degree)
{
    const auto labels = degree_lex_monomials(degree);
    Vector<Scalar> out = Vector<Scalar>::Zero(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t k = 0; k < ws.size(); ++k)
        for (std::size_t n = 0; n < labels.size(); ++n)
            out(static_cast<Eigen::Index>(n)) +=
                ws[k] * std::pow(xs[k], labels[n].i) * std::pow(ys[k], labels[n].j);
    return out;
}

/// Largest |M(u, v) - M(u', v')| over index pairs with u + v = u' + v'.
/// Zero exactly when m is Hankel by blocks.
template <typename Scalar>
Scalar hankel_defect(const MomentMatrix<Scalar>& m)
{
    const auto labels = m.labels();
    std::map<Monomial, Scalar> first;
    Scalar worst(0);
    for (std::size_t r = 0; r < labels.size(); ++r)
        for (std::size_t c = 0; c < labels.size(); ++c) {
            const Monomial sum{labels[r].i + labels[c].i, labels[r].j + labels[c].j};
            const Scalar v = m.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            auto [it, inserted] = first.try_emplace(sum, v);
            if (!inserted)
                worst = std::max(worst, std::abs(it->second - v));
        }
    return worst;
}

/// Reads beta^(2d) back off M(d), taking each moment from its first occurrence.
template <typename Scalar>
MomentSequence<Scalar> moments_of(const MomentMatrix<Scalar>& m)
{
    const auto all = degree_lex_monomials(2 * m.degree);
    Vector<Scalar> out(static_cast<Eigen::Index>(all.size()));
    for (std::size_t n = 0; n < all.size(); ++n) {
        const Monomial target = all[n];
        // split target into row + col with row of degree <= d
        const int row_deg = std::min(target.degree(), m.degree);
        const int ri = std::min(target.i, row_deg);
        const Monomial row{ri, row_deg - ri};
        const Monomial col{target.i - row.i, target.j - row.j};
        out(static_cast<Eigen::Index>(n)) = m(row, col);
    }
    return MomentSequence<Scalar>(2 * m.degree, std::move(out));
}

} // namespace cubic_moment

#endif // CUBIC_MOMENT_MOMENTS_HPP

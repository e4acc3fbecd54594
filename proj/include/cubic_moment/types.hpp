// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_TYPES_HPP
#define CUBIC_MOMENT_TYPES_HPP

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cubic_moment {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// The four normalized cubic moments (a0, a1, a2, a3) = (b30, b21, b12, b03).
template <typename Scalar>
using CubicData = Eigen::Matrix<Scalar, 4, 1>;

/// x^i y^j. Ordered degree-lex: by total degree, then by decreasing i,
/// so the sequence is 1, X, Y, X^2, XY, Y^2, X^3, ...
struct Monomial {
    int i = 0;
    int j = 0;

    constexpr int degree() const noexcept { return i + j; }

    friend constexpr bool operator==(const Monomial&, const Monomial&) = default;
    friend constexpr std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) noexcept
    {
        if (auto c = a.degree() <=> b.degree(); c != 0)
            return c;
        return b.i <=> a.i;
    }
};

/// Number of monomials of degree at most d.
constexpr std::size_t monomial_count(int d) noexcept
{
    return d < 0 ? 0 : static_cast<std::size_t>((d + 1) * (d + 2) / 2);
}

/// Position of m in degree-lex order.
constexpr std::size_t monomial_index(Monomial m) noexcept
{
    const int d = m.degree();
    return static_cast<std::size_t>(d * (d + 1) / 2 + m.j);
}

constexpr Monomial monomial_at(std::size_t index) noexcept
{
    int d = 0;
    while (monomial_count(d) <= index)
        ++d;
    const int j = static_cast<int>(index - monomial_count(d - 1));
    return {d - j, j};
}

inline std::vector<Monomial> degree_lex_monomials(int d)
{
    std::vector<Monomial> out;
    out.reserve(monomial_count(d));
    for (int deg = 0; deg <= d; ++deg)
        for (int j = 0; j <= deg; ++j)
            out.push_back({deg - j, j});
    return out;
}

/// "1", "X", "XY", "X^2Y", ...
inline std::string to_string(Monomial m)
{
    if (m.degree() == 0)
        return "1";
    std::string s;
    if (m.i > 0)
        s += m.i == 1 ? "X" : "X^" + std::to_string(m.i);
    if (m.j > 0)
        s += m.j == 1 ? "Y" : "Y^" + std::to_string(m.j);
    return s;
}

/// Numerical thresholds shared by the whole pipeline.
struct Tolerances {
    double psd = 1e-10;
    double range = 1e-9;
    double flat = 1e-9;
    double commute = 1e-9;
    double eig = 1e-7;
    double cluster = 1e-7;
    double k = 1e-10;
    double accept = 1e-8;
    double singular = 1e-10;
    double min_weight = 1e-10;
    double atom_separation = 1e-8;
    double variety = 1e-7;
};

// Error hierarchy. Every failure of the library surfaces as one of these.

struct MomentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegreeError : MomentError {
    using MomentError::MomentError;
};

struct PreconditionError : MomentError {
    using MomentError::MomentError;
};

/// M(1) is singular: one of the leading minors d2, d3 is not positive.
struct SingularM1Error : MomentError {
    SingularM1Error(std::string minor_name, double minor_value, const std::string& what)
        : MomentError(what), minor(std::move(minor_name)), value(minor_value)
    {
    }
    std::string minor;
    double value;
};

struct RangeError : MomentError {
    using MomentError::MomentError;
};

struct CommutatorError : MomentError {
    using MomentError::MomentError;
};

struct ComplexAtomError : MomentError {
    using MomentError::MomentError;
};

struct MissingRelationError : MomentError {
    using MomentError::MomentError;
};

struct SingularVandermondeError : MomentError {
    using MomentError::MomentError;
};

struct VerificationError : MomentError {
    using MomentError::MomentError;
};

} // namespace cubic_moment

#endif // CUBIC_MOMENT_TYPES_HPP

// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_ATOMIC_MEASURE_HPP
#define CUBIC_MOMENT_ATOMIC_MEASURE_HPP

#include <vector>

#include "moments.hpp"

namespace cubic_moment {

template <typename Scalar>
struct Atom {
    Scalar x;
    Scalar y;
    Scalar weight;
};

/// sum_k rho_k delta_(x_k, y_k)
template <typename Scalar>
struct AtomicMeasure {
    std::vector<Atom<Scalar>> atoms;

    std::size_t size() const noexcept { return atoms.size(); }

    /// All moments of degree <= d, degree-lex.
    Vector<Scalar> moments(int d) const
    {
        std::vector<Scalar> xs, ys, ws;
        for (const auto& a : atoms) {
            xs.push_back(a.x);
            ys.push_back(a.y);
            ws.push_back(a.weight);
        }
        return atomic_moments(xs, ys, ws, d);
    }

    Scalar integrate(const Polynomial2<Scalar>& p) const
    {
        Scalar s(0);
        for (const auto& a : atoms)
            s += a.weight * p(a.x, a.y);
        return s;
    }
};

} // namespace cubic_moment

#endif // CUBIC_MOMENT_ATOMIC_MEASURE_HPP

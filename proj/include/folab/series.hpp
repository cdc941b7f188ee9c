#pragma once

// Truncated formal power series in x. Entry m of a series is the coefficient
// of x^m; every operation truncates at the requested order. Coefficients are
// either plain doubles or polynomials in the time variable.

#include <algorithm>
#include <type_traits>
#include <vector>

#include "folab/polynomial.hpp"

namespace folab {

template <class C>
using Series = std::vector<C>;

template <class C>
C series_unit() {
    if constexpr (std::is_same_v<C, Polynomial>) {
        return Polynomial::constant(1.0);
    } else {
        return C{1};
    }
}

template <class C>
Series<C> series_mul(const Series<C>& a, const Series<C>& b, int order) {
    Series<C> out(static_cast<std::size_t>(order) + 1);
    for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(order); ++i)
        for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(order); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

template <class C>
Series<C> series_pow(const Series<C>& a, int n, int order) {
    Series<C> out(static_cast<std::size_t>(order) + 1);
    out[0] = series_unit<C>();
    for (int i = 0; i < n; ++i) out = series_mul(out, a, order);
    return out;
}

// f(g(x)); g must have no constant term.
template <class C>
Series<C> series_compose(const Series<C>& f, const Series<C>& g, int order) {
    Series<C> out(static_cast<std::size_t>(order) + 1);
    Series<C> gp(static_cast<std::size_t>(order) + 1);
    gp[0] = series_unit<C>();
    for (std::size_t j = 0; j < f.size() && j <= static_cast<std::size_t>(order); ++j) {
        for (std::size_t m = 0; m <= static_cast<std::size_t>(order); ++m) out[m] += f[j] * gp[m];
        gp = series_mul(gp, g, order);
    }
    return out;
}

template <class C>
C series_coeff(const Series<C>& a, int m) {
    return m >= 0 && static_cast<std::size_t>(m) < a.size() ? a[static_cast<std::size_t>(m)] : C{};
}

// Evaluates each polynomial coefficient at t.
Series<double> evaluate_at(const Series<Polynomial>& s, double t);

}  // namespace folab

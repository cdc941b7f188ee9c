#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace folab {

// Lagrange stencil of up to twelve nodes on a uniform grid. Nodes outside
// [0, n) read as zero, which matches the implicit zero extension of compactly
// supported samples.
struct InterpStencil {
    std::ptrdiff_t first = 0;  // index of the leftmost node
    std::array<double, 12> w{};
    int points = 0;
    bool empty = true;
};

// `pos` is the fractional grid index of the evaluation point; `points` is even.
inline InterpStencil lagrange_stencil(double pos, std::size_t n, int points) {
    InterpStencil s;
    const auto count = static_cast<double>(n);
    if (!(pos > -1.0 && pos < count)) return s;
    const double j = std::floor(pos);
    const int half = points / 2;
    s.first = static_cast<std::ptrdiff_t>(j) - (half - 1);
    s.points = points;
    const double u = pos - j + (half - 1);  // position relative to the first node
    for (int i = 0; i < points; ++i) {
        double wi = 1.0;
        for (int m = 0; m < points; ++m)
            if (m != i) wi *= (u - m) / static_cast<double>(i - m);
        const auto idx = s.first + i;
        s.w[static_cast<std::size_t>(i)] = (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : wi;
    }
    s.empty = false;
    return s;
}

inline InterpStencil cubic_stencil(double pos, std::size_t n) { return lagrange_stencil(pos, n, 4); }

template <class Get>
auto apply_stencil(const InterpStencil& s, Get&& get) -> decltype(get(std::size_t{0}) * 1.0) {
    using V = decltype(get(std::size_t{0}) * 1.0);
    V acc{};
    if (s.empty) return acc;
    for (int i = 0; i < s.points; ++i) {
        const double wi = s.w[static_cast<std::size_t>(i)];
        if (wi != 0.0) acc += get(static_cast<std::size_t>(s.first + i)) * wi;
    }
    return acc;
}

}  // namespace folab

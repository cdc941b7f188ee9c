#pragma once

// Truncated jets f_0 + f_1 x + ... + f_p x^p with coefficients in the
// convolution ring, under the product transported from the groupoid algebra
// by the Taylor map at x = 0:
//
//     h_q = sum_{n <= m <= q} f_n * (phi_m^n g_{q-m}).
//
// Order convention: a jet of truncation order p lives in the quotient by
// x^{p+1}. The quotient by x^p therefore corresponds to order p - 1 here.

#include <iosfwd>
#include <random>
#include <stdexcept>
#include <vector>

#include "folab/coeff_ring.hpp"
#include "folab/flow.hpp"

namespace folab {

inline bool is_zero_coeff(const GaussPolyFn& f) { return f.is_zero(); }
inline bool is_zero_coeff(const GridFn& f) { return sup_norm(f) == 0.0; }

template <class C>
C apply_taylor(const C& f, const TaylorCoefficient& phi) {
    if (phi.is_zero() || is_zero_coeff(f)) return zero_like(f);
    return mul_by_poly(mul_by_exp(f, phi.rate), phi.poly);
}

template <class C>
struct Jet {
    int k = 1;
    std::vector<C> coeffs;  // p + 1 entries

    Jet(int k_, std::vector<C> c) : k(k_), coeffs(std::move(c)) {
        if (k < 1) throw std::invalid_argument("Jet: k must be >= 1");
        if (coeffs.empty()) throw std::invalid_argument("Jet: needs at least one coefficient");
    }

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    const C& operator[](int n) const { return coeffs[static_cast<std::size_t>(n)]; }

    static Jet zero(int k, int p, const C& like) { return Jet(k, std::vector<C>(static_cast<std::size_t>(p) + 1, zero_like(like))); }
};

namespace detail {

template <class C>
void require_compatible(const Jet<C>& f, const Jet<C>& g) {
    if (f.k != g.k) throw std::invalid_argument("jet operands have different flow order k");
    if (f.order() != g.order()) throw std::invalid_argument("jet operands have different truncation order");
}

}  // namespace detail

template <class C>
Jet<C> jet_add(const Jet<C>& f, const Jet<C>& g) {
    detail::require_compatible(f, g);
    std::vector<C> out;
    for (int n = 0; n <= f.order(); ++n) out.push_back(add(f[n], g[n]));
    return {f.k, std::move(out)};
}

template <class C>
Jet<C> jet_subtract(const Jet<C>& f, const Jet<C>& g) {
    detail::require_compatible(f, g);
    std::vector<C> out;
    for (int n = 0; n <= f.order(); ++n) out.push_back(subtract(f[n], g[n]));
    return {f.k, std::move(out)};
}

template <class C>
Jet<C> truncate(const Jet<C>& f, int q) {
    if (q < 0 || q > f.order()) throw std::invalid_argument("truncate: order out of range");
    return {f.k, std::vector<C>(f.coeffs.begin(), f.coeffs.begin() + q + 1)};
}

template <class C>
Jet<C> jet_mul(const Jet<C>& f, const Jet<C>& g, const FlowTaylorTable& table) {
    detail::require_compatible(f, g);
    if (table.k() != f.k) throw std::invalid_argument("jet_mul: Taylor table built for a different k");
    const int p = f.order();
    if (table.max_order() < p) throw std::invalid_argument("jet_mul: Taylor table too short");
    std::vector<C> h;
    for (int q = 0; q <= p; ++q) {
        C acc = zero_like(f[0]);
        for (int m = 0; m <= q; ++m) {
            if (is_zero_coeff(g[q - m])) continue;
            for (int n = 0; n <= m; ++n) {
                const auto& phi = table.at(n, m);
                if (phi.is_zero() || is_zero_coeff(f[n])) continue;
                acc = add(acc, convolve(f[n], apply_taylor(g[q - m], phi)));
            }
        }
        h.push_back(std::move(acc));
    }
    return {f.k, std::move(h)};
}

// Product for the Monomial flow x^k d/dx.
template <class C>
Jet<C> jet_mul(const Jet<C>& f, const Jet<C>& g) {
    return jet_mul(f, g, monomial_taylor_table(f.k, f.order()));
}

template <class C>
Jet<C> commutator(const Jet<C>& f, const Jet<C>& g) {
    return jet_subtract(jet_mul(f, g), jet_mul(g, f));
}

// f x: coefficients shift up one degree and the top one falls off.
template <class C>
Jet<C> x_mult_right(const Jet<C>& f) {
    if (f.order() < 1) throw std::invalid_argument("x_mult_right: needs truncation order >= 1");
    std::vector<C> out{zero_like(f[0])};
    for (int n = 0; n < f.order(); ++n) out.push_back(f[n]);
    return {f.k, std::move(out)};
}

// x f through the base action (x . F)(x, t) = phi_t(x) F(x, t), whose Taylor
// coefficients are sum_m phi_m^1(t) f_{q-m}(t). For k >= 2 this is
// x f = f x + delta(f) x^k + ...; for k = 1 it is x f = Delta(f) x.
template <class C>
Jet<C> x_mult_left(const Jet<C>& f, const FlowTaylorTable& table) {
    if (f.order() < 1) throw std::invalid_argument("x_mult_left: needs truncation order >= 1");
    std::vector<C> out;
    for (int q = 0; q <= f.order(); ++q) {
        C acc = zero_like(f[0]);
        for (int m = 1; m <= q; ++m) acc = add(acc, apply_taylor(f[q - m], table.at(1, m)));
        out.push_back(std::move(acc));
    }
    return {f.k, std::move(out)};
}

template <class C>
Jet<C> x_mult_left(const Jet<C>& f) {
    return x_mult_left(f, monomial_taylor_table(f.k, f.order()));
}

template <class C>
double jet_sup_norm(const Jet<C>& f) {
    double m = 0.0;
    for (const auto& c : f.coeffs) m = std::max(m, sup_norm(c));
    return m;
}

using ExactJet = Jet<GaussPolyFn>;
using GridJet = Jet<GridFn>;

ExactJet random_exact_jet(std::mt19937_64& rng, int k, int p);

// Deterministic witness of noncommutativity at order q >= k: f = b x,
// g = c with b = c = exp(-t^2/2) (unit sup norm). The commutator's order-k
// coefficient is b * (phi_k^1 c) - b * c, i.e. b * (t c) for k >= 2.
std::pair<ExactJet, ExactJet> commutator_witness(int k, int q);

struct CommutativityRow {
    int order = 0;
    double max_commutator = 0.0;  // max sup norm over random jets and witness
    double witness_norm = 0.0;    // 0 below order k
    bool expected_commutative = false;
};

// For orders 0..max_order: orders <= k - 1 must commute, orders >= k must not.
std::vector<CommutativityRow> commutativity_report(int k, int max_order, int trials, std::mt19937_64& rng);

// {"k", "p", "coeffs": [...]}; each coefficient is {"type": "gauss_poly", "atoms":
// [{"poly", "mean", "variance"}]} or {"type": "grid", "t_start", "t_step", "re", "im"}.
void write_json(std::ostream& os, const ExactJet& f);
void write_json(std::ostream& os, const GridJet& f);
ExactJet read_exact_jet_json(std::istream& is);
GridJet read_grid_jet_json(std::istream& is);

}  // namespace folab

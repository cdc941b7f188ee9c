#pragma once

// Flows of the vector fields x^k d/dx and their complete rescalings
// (1 + x^2)^{-(k-1)/2} x^k d/dx on the line, the Taylor data phi_m^n(t) of
// powers of the flow at the fixed point 0, and the cocycles Delta and beta.
//
// Points of the transformation groupoid are written (x, t): source x, target
// phi_t(x). All functions take them in that order.

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "folab/polynomial.hpp"
#include "folab/series.hpp"

namespace folab {

enum class FlowVariant { Monomial, CompleteRescaled };

std::string to_string(FlowVariant v);
FlowVariant flow_variant_from_string(const std::string& s);

struct FlowModel {
    int k = 1;
    FlowVariant variant = FlowVariant::Monomial;
    // -1 negates the generating field (time reversal).
    int direction = 1;

    FlowModel() = default;
    FlowModel(int k_, FlowVariant v = FlowVariant::Monomial, int dir = 1);

    FlowModel reversed() const { return {k, variant, -direction}; }
    bool operator==(const FlowModel&) const = default;

    // Generating vector field at x.
    double field(double x) const;
    // Monomial k >= 2 is incomplete: defined iff (k-1) t x^{k-1} < 1.
    bool admissible(double x, double t) const;
};

// Throw OutOfDomain for inadmissible (x, t).
double flow_eval(const FlowModel& model, double x, double t);
double flow_derivative(const FlowModel& model, double x, double t);

// phi_t(x) / x, extended smoothly across x = 0.
double cocycle_delta(const FlowModel& model, double x, double t);
// sqrt(phi_t'(x)) for x != 0 and 1 at x = 0. For k = 1 the value at 0 is
// discontinuous (phi_t' = e^t everywhere); the case split is kept as stated.
double beta_cocycle(const FlowModel& model, double x, double t);

// p(t) * exp(rate * t).
struct TaylorCoefficient {
    Polynomial poly;
    double rate = 0.0;

    double operator()(double t) const;
    bool is_zero() const { return poly.is_zero(); }
};

// phi_m^n(t) = [x^m] (phi_t(x))^n for 0 <= n <= m <= max_order.
class FlowTaylorTable {
public:
    static constexpr int kDefaultMaxOrder = 8;

    explicit FlowTaylorTable(const FlowModel& model, int max_order = kDefaultMaxOrder);

    const FlowModel& model() const { return model_; }
    int k() const { return model_.k; }
    int max_order() const { return max_order_; }

    // Zero for m < n. Throws std::out_of_range past max_order.
    const TaylorCoefficient& at(int n, int m) const;
    // Taylor series of phi_t(x) with polynomial coefficients (k >= 2 only).
    const Series<Polynomial>& flow_series() const { return flow_series_; }

private:
    FlowModel model_;
    int max_order_;
    Series<Polynomial> flow_series_;
    std::vector<TaylorCoefficient> entries_;  // (n, m) at n * (max_order + 1) + m
    TaylorCoefficient zero_;
};

// Shared Monomial table of at least the given order.
const FlowTaylorTable& monomial_taylor_table(int k, int max_order = FlowTaylorTable::kDefaultMaxOrder);

// Exact polynomial phi_m^n for the Monomial flow with k >= 2.
Polynomial taylor_flow_power(int k, int n, int m);

// |phi_m^n(t) - sum_{i=n}^{m} phi_m^i(t - s) phi_i^n(s)|
double check_cocycle_identity(const FlowTaylorTable& table, int n, int m, double t, double s);

// Max over `trials` pairs (f, g) of |[m](f o g)^n - sum_{i=n}^m ([m] g^i)([i] f^n)|.
// The first pair is (phi_{t-s}, phi_s) for the Monomial flow of order k at
// random (t, s); the rest are random series vanishing at 0 of degree
// `max_order`.
double check_composition_identity(int k, int n, int m, int trials, std::mt19937_64& rng,
                                  int max_order = FlowTaylorTable::kDefaultMaxOrder);

// JSON: {"k", "M_max", "variant", "entries": [{"n", "m", "poly_coeffs" | "exp_rate"}]}.
// Entries whose coefficient is a pure exponential carry "exp_rate" only.
void write_json(std::ostream& os, const FlowTaylorTable& table);

}  // namespace folab

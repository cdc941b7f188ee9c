#include "folab/flow.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

#include "folab/errors.hpp"

namespace folab {

namespace {

constexpr double kOdeRelTol = 1e-10;
constexpr double kOdeAbsTol = 1e-14;

// exponent (k-1)/2 of the rescaling factor
double rescale_power(int k) { return 0.5 * static_cast<double>(k - 1); }

double field_derivative(const FlowModel& m, double x) {
    const double dir = static_cast<double>(m.direction);
    if (m.variant == FlowVariant::Monomial)
        return dir * static_cast<double>(m.k) * std::pow(x, m.k - 1);
    // d/dx [(1+x^2)^{-a} x^k] = (1+x^2)^{-a-1} x^{k-1} (k + x^2) with 2a = k - 1
    const double a = rescale_power(m.k);
    return dir * std::pow(1.0 + x * x, -a - 1.0) * std::pow(x, m.k - 1) * (static_cast<double>(m.k) + x * x);
}

// Flow and its spatial derivative by integrating the variational equation
// alongside the orbit.
std::array<double, 2> integrate_rescaled(const FlowModel& m, double x, double t) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 2>;
    State s{x, 1.0};
    if (t == 0.0 || x == 0.0) return {x, 1.0};  // k >= 2 here: phi_t fixes 0 with unit slope
    const double sign = t > 0.0 ? 1.0 : -1.0;
    auto rhs = [&](const State& y, State& dy, double) {
        dy[0] = sign * m.field(y[0]);
        dy[1] = sign * field_derivative(m, y[0]) * y[1];
    };
    auto stepper = odeint::make_controlled(kOdeAbsTol, kOdeRelTol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_adaptive(stepper, rhs, s, 0.0, std::abs(t), std::min(1e-3, std::abs(t)));
    return s;
}

void require_admissible(const FlowModel& m, double x, double t) {
    if (!m.admissible(x, t))
        throw OutOfDomain("flow of order " + std::to_string(m.k) + " undefined at x=" + std::to_string(x) +
                          ", t=" + std::to_string(t));
}

// 1 - (k-1) t x^{k-1}, positive on the domain of the Monomial flow.
double monomial_base(const FlowModel& m, double x, double t) {
    return 1.0 - static_cast<double>(m.k - 1) * m.direction * t * std::pow(x, m.k - 1);
}

double binom_general(double a, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (a - i) / static_cast<double>(i + 1);
    return r;
}

// Taylor coefficients at 0 of the generating field.
Series<double> field_series(const FlowModel& m, int order) {
    Series<double> f(static_cast<std::size_t>(order) + 1, 0.0);
    const double dir = static_cast<double>(m.direction);
    if (m.variant == FlowVariant::Monomial) {
        if (m.k <= order) f[static_cast<std::size_t>(m.k)] = dir;
        return f;
    }
    const double a = rescale_power(m.k);
    for (int j = 0; m.k + 2 * j <= order; ++j) f[static_cast<std::size_t>(m.k + 2 * j)] = dir * binom_general(-a, j);
    return f;
}

}  // namespace

std::string to_string(FlowVariant v) {
    return v == FlowVariant::Monomial ? "monomial" : "complete_rescaled";
}

FlowVariant flow_variant_from_string(const std::string& s) {
    if (s == "monomial") return FlowVariant::Monomial;
    if (s == "complete_rescaled") return FlowVariant::CompleteRescaled;
    throw std::invalid_argument("unknown flow variant: " + s);
}

FlowModel::FlowModel(int k_, FlowVariant v, int dir) : k(k_), variant(v), direction(dir) {
    if (k < 1) throw std::invalid_argument("FlowModel: k must be >= 1");
    if (dir != 1 && dir != -1) throw std::invalid_argument("FlowModel: direction must be +1 or -1");
}

double FlowModel::field(double x) const {
    const double xk = std::pow(x, k);
    if (variant == FlowVariant::Monomial) return direction * xk;
    return direction * std::pow(1.0 + x * x, -rescale_power(k)) * xk;
}

bool FlowModel::admissible(double x, double t) const {
    if (variant == FlowVariant::CompleteRescaled || k == 1) return std::isfinite(x) && std::isfinite(t);
    return monomial_base(*this, x, t) > 0.0;
}

double flow_eval(const FlowModel& m, double x, double t) {
    require_admissible(m, x, t);
    if (m.k == 1) return std::exp(m.direction * t) * x;
    if (m.variant == FlowVariant::Monomial) return x * std::pow(monomial_base(m, x, t), -1.0 / (m.k - 1));
    return integrate_rescaled(m, x, t)[0];
}

double flow_derivative(const FlowModel& m, double x, double t) {
    require_admissible(m, x, t);
    if (m.k == 1) return std::exp(m.direction * t);
    if (m.variant == FlowVariant::Monomial)
        return std::pow(monomial_base(m, x, t), -static_cast<double>(m.k) / (m.k - 1));
    return integrate_rescaled(m, x, t)[1];
}

double cocycle_delta(const FlowModel& m, double x, double t) {
    require_admissible(m, x, t);
    if (m.k == 1) return std::exp(m.direction * t);
    if (m.variant == FlowVariant::Monomial) return std::pow(monomial_base(m, x, t), -1.0 / (m.k - 1));
    if (x == 0.0) return 1.0;  // (h(0)/h(0) * phi_t'(0))^{1/k} with phi_t'(0) = 1
    return integrate_rescaled(m, x, t)[0] / x;
}

double beta_cocycle(const FlowModel& m, double x, double t) {
    require_admissible(m, x, t);
    if (x == 0.0) return 1.0;
    return std::sqrt(flow_derivative(m, x, t));
}

// ---------------------------------------------------------------- Taylor data

double TaylorCoefficient::operator()(double t) const {
    const double p = poly(t);
    return rate == 0.0 ? p : p * std::exp(rate * t);
}

FlowTaylorTable::FlowTaylorTable(const FlowModel& model, int max_order) : model_(model), max_order_(max_order) {
    if (max_order < 0) throw std::invalid_argument("FlowTaylorTable: negative order");
    const auto M = static_cast<std::size_t>(max_order);
    entries_.resize((M + 1) * (M + 1));
    auto slot = [&](int n, int m) -> TaylorCoefficient& {
        return entries_[static_cast<std::size_t>(n) * (M + 1) + static_cast<std::size_t>(m)];
    };

    if (model.k == 1) {
        // phi_t(x) = e^{t} x exactly: only diagonal entries survive.
        for (int n = 0; n <= max_order; ++n) slot(n, n) = {Polynomial::constant(1.0), double(model.direction * n)};
        return;
    }

    // Picard iteration phi = x + int_0^t X(phi) ds in the x-adic topology; each
    // pass fixes at least k - 1 further orders.
    Series<Polynomial> field(M + 1);
    const auto fs = field_series(model, max_order);
    for (std::size_t i = 0; i <= M; ++i) field[i] = Polynomial::constant(fs[i]);
    Series<Polynomial> phi(M + 1);
    if (max_order >= 1) phi[1] = Polynomial::constant(1.0);
    for (int pass = 0; pass < max_order; ++pass) {
        auto rhs = series_compose(field, phi, max_order);
        Series<Polynomial> next(M + 1);
        for (std::size_t i = 0; i <= M; ++i) next[i] = rhs[i].integral();
        if (max_order >= 1) next[1] += Polynomial::constant(1.0);
        if (next == phi) break;
        phi = std::move(next);
    }
    flow_series_ = phi;
    for (int n = 0; n <= max_order; ++n) {
        const auto pw = series_pow(phi, n, max_order);
        for (int m = n; m <= max_order; ++m) slot(n, m) = {pw[static_cast<std::size_t>(m)], 0.0};
    }
}

const TaylorCoefficient& FlowTaylorTable::at(int n, int m) const {
    if (n < 0 || m < 0 || n > max_order_ || m > max_order_)
        throw std::out_of_range("FlowTaylorTable: index beyond max order");
    if (m < n) return zero_;
    return entries_[static_cast<std::size_t>(n) * static_cast<std::size_t>(max_order_ + 1) + static_cast<std::size_t>(m)];
}

const FlowTaylorTable& monomial_taylor_table(int k, int max_order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<FlowTaylorTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[k];
    if (!slot || slot->max_order() < max_order)
        slot = std::make_unique<FlowTaylorTable>(FlowModel(k), std::max(max_order, FlowTaylorTable::kDefaultMaxOrder));
    return *slot;
}

Polynomial taylor_flow_power(int k, int n, int m) {
    if (k < 2) throw std::invalid_argument("taylor_flow_power: polynomial entries need k >= 2");
    return monomial_taylor_table(k, m).at(n, m).poly;
}

double check_cocycle_identity(const FlowTaylorTable& table, int n, int m, double t, double s) {
    double rhs = 0.0;
    for (int i = n; i <= m; ++i) rhs += table.at(i, m)(t - s) * table.at(n, i)(s);
    return std::abs(table.at(n, m)(t) - rhs);
}

namespace {

double composition_residual(const Series<double>& f, const Series<double>& g, int n, int m, int order) {
    const auto lhs = series_pow(series_compose(f, g, order), n, order);
    double rhs = 0.0;
    for (int i = n; i <= m; ++i)
        rhs += series_coeff(series_pow(g, i, order), m) * series_coeff(series_pow(f, n, order), i);
    return std::abs(series_coeff(lhs, m) - rhs);
}

}  // namespace

double check_composition_identity(int k, int n, int m, int trials, std::mt19937_64& rng, int max_order) {
    if (m > max_order) throw std::invalid_argument("check_composition_identity: m exceeds truncation order");
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Series<double> f(static_cast<std::size_t>(max_order) + 1, 0.0), g = f;
        if (trial == 0) {
            const double t = coeff(rng), s = coeff(rng);
            if (k == 1) {
                if (max_order >= 1) {
                    f[1] = std::exp(t - s);
                    g[1] = std::exp(s);
                }
            } else {
                const auto& phi = monomial_taylor_table(k, max_order).flow_series();
                f = evaluate_at(phi, t - s);
                g = evaluate_at(phi, s);
                f.resize(static_cast<std::size_t>(max_order) + 1);
                g.resize(static_cast<std::size_t>(max_order) + 1);
            }
        } else {
            for (std::size_t i = 1; i < f.size(); ++i) {
                f[i] = coeff(rng);
                g[i] = coeff(rng);
            }
        }
        worst = std::max(worst, composition_residual(f, g, n, m, max_order));
    }
    return worst;
}

void write_json(std::ostream& os, const FlowTaylorTable& table) {
    nlohmann::json entries = nlohmann::json::array();
    for (int n = 0; n <= table.max_order(); ++n) {
        for (int m = n; m <= table.max_order(); ++m) {
            const auto& e = table.at(n, m);
            nlohmann::json j{{"n", n}, {"m", m}};
            if (table.k() == 1 && n == m) {
                j["exp_rate"] = e.rate;
            } else {
                j["poly_coeffs"] = std::vector<double>(e.poly.coeffs().begin(), e.poly.coeffs().end());
            }
            entries.push_back(std::move(j));
        }
    }
    nlohmann::json doc{{"k", table.k()},
                       {"M_max", table.max_order()},
                       {"variant", to_string(table.model().variant)},
                       {"entries", std::move(entries)}};
    os << doc.dump(2) << '\n';
}

}  // namespace folab

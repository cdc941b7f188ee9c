#include "folab/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>
#include <unsupported/Eigen/FFT>

#include "folab/errors.hpp"
#include "folab/groupoid.hpp"

namespace folab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// M_m = int_0^1 u^m e^{-i theta u} du for m = 0..3.
std::array<cplx, 4> oscillatory_moments(double theta) {
    std::array<cplx, 4> m{};
    if (std::abs(theta) < 1.0) {
        const cplx z = -kI * theta;
        for (int p = 0; p < 4; ++p) {
            cplx term = 1.0, acc = 0.0;
            for (int k = 0; k < 30; ++k) {
                acc += term / static_cast<double>(p + k + 1);
                term *= z / static_cast<double>(k + 1);
            }
            m[static_cast<std::size_t>(p)] = acc;
        }
        return m;
    }
    const cplx e = std::exp(-kI * theta), it = kI * theta;
    m[0] = (1.0 - e) / it;
    for (int p = 1; p < 4; ++p) m[static_cast<std::size_t>(p)] = (static_cast<double>(p) * m[static_cast<std::size_t>(p - 1)] - e) / it;
    return m;
}

// Monomial coefficients (in u) of the cubic through (d + i, y_i), i = 0..3.
std::array<cplx, 4> cubic_coefficients(int d, const cplx* y) {
    Eigen::Matrix4d v;
    for (int i = 0; i < 4; ++i)
        for (int c = 0; c < 4; ++c) v(i, c) = std::pow(static_cast<double>(d + i), c);
    const Eigen::Matrix4d inv = v.inverse();
    std::array<cplx, 4> out{};
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(c)] += inv(c, i) * y[i];
    return out;
}

std::vector<cplx> spectral_derivative(const std::vector<cplx>& v) {
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, v);
    const auto n = static_cast<long>(v.size());
    for (long m = 0; m < n; ++m) {
        long k = m <= n / 2 ? m : m - n;
        if (n % 2 == 0 && m == n / 2) k = 0;
        spec[static_cast<std::size_t>(m)] *= kI * static_cast<double>(k);
    }
    std::vector<cplx> out;
    fft.inv(out, spec);
    return out;
}

// Composite Simpson weights for n + 1 equally spaced nodes (n even).
double simpson_weight(std::size_t i, std::size_t n) {
    if (i == 0 || i == n) return 1.0 / 3.0;
    return i % 2 ? 4.0 / 3.0 : 2.0 / 3.0;
}

template <class F>
double simpson(F&& f, double lo, double hi, std::size_t panels) {
    panels += panels % 2;
    const double h = (hi - lo) / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t i = 0; i <= panels; ++i) acc += simpson_weight(i, panels) * f(lo + static_cast<double>(i) * h);
    return acc * h;
}

}  // namespace

std::vector<cplx> fourier_transform_line(const GridFn& f, const std::vector<double>& s) {
    const auto y = f.samples();
    const std::size_t n = y.size();
    if (n < 4) throw std::invalid_argument("fourier_transform_line: need at least four samples");
    double peak = 0.0;
    for (auto v : y) peak = std::max(peak, std::abs(v));
    std::vector<cplx> out(s.size());
    if (peak == 0.0) return out;
    if (std::abs(y.front()) > 1e-8 * peak && std::abs(y.back()) > 1e-8 * peak)
        throw NotDecaying("fourier_transform_line: input does not decay at either end of its window");

    std::vector<std::array<cplx, 4>> coeffs(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::size_t a = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(j) - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
        coeffs[j] = cubic_coefficients(static_cast<int>(a) - static_cast<int>(j), y.data() + a);
    }
    const double h = f.t_step();
    for (std::size_t q = 0; q < s.size(); ++q) {
        const double omega = 2.0 * kPi * s[q];
        const auto mom = oscillatory_moments(omega * h);
        cplx acc = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            cplx panel = 0.0;
            for (int c = 0; c < 4; ++c) panel += coeffs[j][static_cast<std::size_t>(c)] * mom[static_cast<std::size_t>(c)];
            acc += panel * std::exp(-kI * omega * f.t_at(j));
        }
        out[q] = acc * h;
    }
    return out;
}

SymbolLoop::SymbolLoop(Kind kind, std::vector<cplx> values, double scale, std::string id)
    : kind_(kind), values_(std::move(values)), scale_(scale), id_(std::move(id)) {
    if (values_.size() < 3) throw std::invalid_argument("SymbolLoop: need at least three samples");
    for (auto v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::invalid_argument("SymbolLoop: non-finite sample");
}

SymbolLoop SymbolLoop::circle(std::vector<cplx> samples, std::string id) {
    return {Kind::Circle, std::move(samples), 1.0, std::move(id)};
}

SymbolLoop SymbolLoop::circle(const std::function<cplx(cplx)>& f, std::size_t n, std::string id) {
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = f(std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n)));
    return circle(std::move(v), std::move(id));
}

SymbolLoop SymbolLoop::line(const std::function<cplx(double)>& f, cplx limit_plus, cplx limit_minus, std::size_t n,
                            double scale, std::string id, double limit_tol) {
    if (!(scale > 0.0)) throw std::invalid_argument("SymbolLoop::line: scale must be positive");
    if (std::abs(limit_plus - limit_minus) > limit_tol)
        throw std::invalid_argument("SymbolLoop::line: limits at +inf and -inf differ, the loop does not close");
    SymbolLoop loop(Kind::Line, std::vector<cplx>(std::max<std::size_t>(n, 3)), scale, std::move(id));
    const auto s = loop.line_points();
    loop.values_[0] = 0.5 * (limit_plus + limit_minus);
    for (std::size_t j = 1; j < loop.values_.size(); ++j) loop.values_[j] = f(s[j]);
    return loop;
}

std::vector<double> SymbolLoop::line_points() const {
    if (kind_ != Kind::Line) throw std::logic_error("line_points: not a line loop");
    const auto n = values_.size();
    std::vector<double> s(n, std::numeric_limits<double>::infinity());
    for (std::size_t j = 1; j < n; ++j) s[j] = scale_ / std::tan(kPi * static_cast<double>(j) / static_cast<double>(n));
    return s;
}

double SymbolLoop::min_modulus() const {
    double m = std::numeric_limits<double>::infinity();
    for (auto v : values_) m = std::min(m, std::abs(v));
    return m;
}

SymbolLoop SymbolLoop::map(const std::function<cplx(cplx)>& fn, std::string id) const {
    std::vector<cplx> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), fn);
    return {kind_, std::move(v), scale_, std::move(id)};
}

SymbolLoop pointwise_product(const SymbolLoop& a, const SymbolLoop& b) {
    if (a.kind() != b.kind() || a.size() != b.size() || a.scale() != b.scale())
        throw RepresentationMismatch("pointwise_product: loops sampled at different points");
    std::size_t j = 0;
    const auto& bv = b.values();
    return a.map([&](cplx z) { return z * bv[j++]; }, a.id() + "*" + b.id());
}

SymbolLoop fourier_loop(const GridFn& f, std::size_t n, double scale, std::string id) {
    const auto probe = SymbolLoop::line([](double) { return cplx{}; }, 0.0, 0.0, n, scale);
    auto s = probe.line_points();
    s[0] = 0.0;
    auto fhat = fourier_transform_line(f, s);
    fhat[0] = 0.0;
    std::size_t j = 0;
    return probe.map([&](cplx) { return fhat[j++]; }, std::move(id));
}

WindingReport winding_number(const SymbolLoop& loop, double residual_tol, double fredholm_tol) {
    WindingReport r;
    r.symbol_id = loop.id();
    r.min_modulus = loop.min_modulus();
    if (!(r.min_modulus > fredholm_tol)) throw NotFredholm("winding_number: symbol vanishes on the loop");
    const auto& v = loop.values();
    const auto dv = spectral_derivative(v);
    const auto n = v.size();
    double integral = 0.0;
    for (std::size_t j = 0; j < n; ++j) integral += (dv[j] / v[j]).imag();
    integral /= static_cast<double>(n);
    double increments = 0.0;
    for (std::size_t j = 0; j < n; ++j) increments += std::arg(v[(j + 1) % n] / v[j]);
    r.winding = static_cast<int>(std::lround(integral));
    r.residual = std::abs(integral - r.winding);
    r.boundary_index = -r.winding;
    if (r.residual > residual_tol) throw ResolutionError("winding_number: loop under-resolved, residual too large");
    if (std::lround(increments / (2.0 * kPi)) != r.winding)
        throw ResolutionError("winding_number: argument increments disagree with the spectral integral");
    return r;
}

FiniteSection toeplitz_finite_section(const SymbolLoop& loop, std::size_t n) {
    if (loop.kind() != SymbolLoop::Kind::Circle) throw std::invalid_argument("toeplitz_finite_section: needs a circle loop");
    if (n < 1 || loop.size() < 2 * n - 1) throw std::invalid_argument("toeplitz_finite_section: too few samples for the section size");
    Eigen::FFT<double> fft;
    std::vector<cplx> coef;
    fft.fwd(coef, loop.values());
    const auto m = static_cast<long>(loop.size());
    auto fhat = [&](long k) { return coef[static_cast<std::size_t>(((k % m) + m) % m)] / static_cast<double>(m); };
    FiniteSection sec{Eigen::MatrixXcd(static_cast<long>(n), static_cast<long>(n)),
                      "toeplitz(" + loop.id() + ", N=" + std::to_string(n) + ")"};
    for (long j = 0; j < static_cast<long>(n); ++j)
        for (long k = 0; k < static_cast<long>(n); ++k) sec.matrix(j, k) = fhat(j - k);
    return sec;
}

KernelCounts finite_section_kernel_counts(const FiniteSection& section, double tol) {
    auto small = [tol](const Eigen::MatrixXcd& a) {
        const Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
        const auto& sv = svd.singularValues();
        return static_cast<std::size_t>((sv.array() < tol).count());
    };
    return {small(section.matrix), small(section.matrix.adjoint())};
}

std::function<cplx(double)> cayley_basis_image(int n) {
    return [n](double t) {
        const cplx w = (t - kI) / (t + kI);
        return std::pow(w, n) / (t + kI) / std::sqrt(kPi);
    };
}

Eigen::MatrixXcd cayley_gram(const std::vector<int>& indices, std::size_t nodes) {
    const auto m = static_cast<long>(indices.size());
    std::vector<std::function<cplx(double)>> fns;
    for (int n : indices) fns.push_back(cayley_basis_image(n));
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
    const double du = kPi / static_cast<double>(nodes);
    std::vector<cplx> vals(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < nodes; ++j) {
        const double u = -kPi / 2 + (static_cast<double>(j) + 0.5) * du;
        const double t = std::tan(u);
        const double jac = 1.0 + t * t;
        for (long a = 0; a < m; ++a) vals[static_cast<std::size_t>(a)] = fns[static_cast<std::size_t>(a)](t);
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < m; ++b)
                g(a, b) += vals[static_cast<std::size_t>(a)] * std::conj(vals[static_cast<std::size_t>(b)]) * jac * du;
    }
    return g;
}

FlowBiIndex flow_bi_index(const FlowModel& model) {
    if (model.k < 1) throw std::invalid_argument("flow_bi_index: k must be >= 1");
    // Outward motion on a half-line makes 0 a source for it.
    const double probe = 0.5;
    return {model.field(-probe) < 0.0 ? 1 : -1, model.field(probe) > 0.0 ? 1 : -1};
}

Diffeomorphism Diffeomorphism::sinh() {
    return {"sinh", [](double x) { return std::sinh(x); }, [](double y) { return std::asinh(y); },
            [](double x) { return std::cosh(x); }};
}

Diffeomorphism Diffeomorphism::identity() {
    return {"identity", [](double x) { return x; }, [](double y) { return y; }, [](double) { return 1.0; }};
}

double GaussianSymbol::operator()(double x) const { return amplitude * std::exp(-kPi * x * x / (width * width)); }

double GaussianSymbol::transform(double t) const { return amplitude * width * std::exp(-kPi * width * width * t * t); }

NonpreservationResult nonpreservation_demo(const Diffeomorphism& u, const GaussianSymbol& f1, const GaussianSymbol& f2,
                                           int n_max, double translation) {
    if (!(translation > 1.0)) throw std::invalid_argument("nonpreservation_demo: translation must exceed the bump diameter 1");
    if (n_max < 0) throw std::invalid_argument("nonpreservation_demo: n_max must be nonnegative");
    if (!(f1.width > 0.0) || !(f2.width > 0.0)) throw std::invalid_argument("nonpreservation_demo: symbol widths must be positive");
    for (double x = -10.0; x <= 10.0; x += 0.05) {
        if (!(u.derivative(x) > 0.0)) throw std::invalid_argument("nonpreservation_demo: u is not orientation preserving");
        if (std::abs(u.inverse(u.map(x)) - x) > 1e-9 * (1.0 + std::abs(x)))
            throw std::invalid_argument("nonpreservation_demo: inverse of u is inconsistent");
    }

    const std::size_t panels = 512;
    auto bump = [](double y) { return smooth_bump(2.0 * y - 1.0); };
    const double xi_norm = std::sqrt(simpson([&](double y) { return bump(y) * bump(y); }, 0.0, 1.0, 4096));
    auto xi = [&](double y) { return bump(y) / xi_norm; };

    // Transforms fall below 1e-13 of their peak beyond this distance.
    auto reach = [](const GaussianSymbol& g) { return std::sqrt(std::log(1e13) / kPi) / g.width; };

    NonpreservationResult res;
    res.diffeomorphism = u.name;
    res.translation = translation;
    for (int n = 0; n <= n_max; ++n) {
        const double lo = n * translation, hi = lo + 1.0, h = 1.0 / panels;
        std::vector<double> yk(panels + 1), wk(panels + 1), xk(panels + 1), pk(panels + 1);
        double eta_bound = 0.0;
        for (std::size_t k = 0; k <= panels; ++k) {
            yk[k] = lo + static_cast<double>(k) * h;
            wk[k] = simpson_weight(k, panels) * h * xi(yk[k] - lo);
            xk[k] = u.inverse(yk[k]);
            // Weight of xi_n(y') dy' in U xi_n after y' = u(x'); P drops x' < 0.
            pk[k] = xk[k] >= 0.0 ? wk[k] / std::sqrt(u.derivative(xk[k])) : 0.0;
            eta_bound += std::abs(wk[k]) / std::sqrt(u.derivative(xk[k]));
        }
        auto t1 = [&](double y) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= panels; ++k) acc += f1.transform(y - yk[k]) * wk[k];
            return acc;
        };
        auto zeta = [&](double x) {
            if (f2.is_zero()) return 0.0;
            double acc = 0.0;
            for (std::size_t k = 0; k <= panels; ++k) acc += f2.transform(x - xk[k]) * pk[k];
            return acc;
        };
        const double r1 = reach(f1), r2 = reach(f2);
        const std::size_t grid = 2000;
        const double a2 = simpson([&](double y) { const double v = t1(y); return v * v; }, lo - r1, hi + r1, grid);
        double z2 = 0.0, cross = 0.0;
        if (!f2.is_zero()) {
            z2 = simpson([&](double x) { const double v = zeta(x); return v * v; }, xk.front() - r2, xk.back() + r2, grid);
            cross = simpson([&](double y) {
                const double x = u.inverse(y);
                return t1(y) * zeta(x) / std::sqrt(u.derivative(x));
            }, lo - r1, hi + r1, grid);
        }
        if (n == 0) res.a = std::sqrt(a2);
        res.rows.push_back({n, std::sqrt(std::max(0.0, a2 + z2 - 2.0 * cross)), std::sqrt(z2), eta_bound});
    }
    return res;
}

void write_json(std::ostream& os, const WindingReport& r) {
    nlohmann::json j{{"symbol_id", r.symbol_id},
                     {"winding", r.winding},
                     {"boundary_index", r.boundary_index},
                     {"fredholm_min_modulus", r.min_modulus},
                     {"residual", r.residual}};
    os << j.dump(2) << '\n';
}

void write_json(std::ostream& os, const FlowModel& model, const FlowBiIndex& e) {
    nlohmann::json j{{"k", model.k},
                     {"variant", to_string(model.variant)},
                     {"direction", model.direction},
                     {"epsilon", {e.left, e.right}},
                     {"parity_invariant", parity_invariant(e)}};
    os << j.dump(2) << '\n';
}

}  // namespace folab

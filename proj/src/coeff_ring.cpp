#include "folab/coeff_ring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "folab/binary_io.hpp"
#include "folab/errors.hpp"
#include "folab/interp.hpp"

namespace folab {

namespace {

constexpr double kStepRelTol = 1e-12;
constexpr double kLatticeTol = 1e-9;

void require_same_step(const GridFn& f, const GridFn& g) {
    if (std::abs(f.t_step() - g.t_step()) > kStepRelTol * f.t_step())
        throw RepresentationMismatch("grid functions have different t_step");
}

// Offset of g's first sample on f's lattice, in steps.
long lattice_offset(const GridFn& f, const GridFn& g) {
    require_same_step(f, g);
    const double off = (g.t_start() - f.t_start()) / f.t_step();
    const double r = std::round(off);
    if (std::abs(off - r) > kLatticeTol) throw RepresentationMismatch("grid functions are not lattice aligned");
    return static_cast<long>(r);
}

template <class Op>
GridFn combine(const GridFn& f, const GridFn& g, Op op) {
    const long off = lattice_offset(f, g);
    const long lo = std::min(0L, off);
    const long hi = std::max(static_cast<long>(f.size()), off + static_cast<long>(g.size()));
    std::vector<cplx> out(static_cast<std::size_t>(hi - lo));
    for (long i = lo; i < hi; ++i) {
        const cplx a = (i >= 0 && i < static_cast<long>(f.size())) ? f.samples()[static_cast<std::size_t>(i)] : cplx{};
        const long j = i - off;
        const cplx b = (j >= 0 && j < static_cast<long>(g.size())) ? g.samples()[static_cast<std::size_t>(j)] : cplx{};
        out[static_cast<std::size_t>(i - lo)] = op(a, b);
    }
    return GridFn(GridFn::Unchecked{}, f.t_start() + static_cast<double>(lo) * f.t_step(), f.t_step(), std::move(out));
}

template <class Fn>
GridFn pointwise(const GridFn& f, Fn fn) {
    std::vector<cplx> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f.t_at(i), f.samples()[i]);
    return GridFn(GridFn::Unchecked{}, f.t_start(), f.t_step(), std::move(out));
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Coefficients in u of p(L(t) + sign*u), with L(t) = a t + b: entry j multiplies u^j.
std::vector<Polynomial> expand_shifted(const Polynomial& p, double a, double b, double sign) {
    const int deg = p.degree();
    std::vector<Polynomial> out(static_cast<std::size_t>(std::max(deg, 0)) + 1);
    if (deg < 0) return out;
    std::vector<Polynomial> lin_pow(static_cast<std::size_t>(deg) + 1);
    lin_pow[0] = Polynomial::constant(1.0);
    const Polynomial lin({b, a});
    for (int i = 1; i <= deg; ++i) lin_pow[static_cast<std::size_t>(i)] = lin_pow[static_cast<std::size_t>(i - 1)] * lin;
    for (int i = 0; i <= deg; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double c = p[static_cast<std::size_t>(i)] * binomial(i, j) * std::pow(sign, j);
            if (c != 0.0) out[static_cast<std::size_t>(j)] += lin_pow[static_cast<std::size_t>(i - j)] * c;
        }
    }
    return out;
}

// Closed form of (p G_{m1,v1}) * (q G_{m2,v2}). Completing the square in the
// integration variable leaves a Gaussian expectation of a bivariate polynomial.
GaussAtom convolve_atoms(const GaussAtom& f, const GaussAtom& g) {
    const double var = f.variance + g.variance;
    const double r = g.variance / var;
    const double w = f.variance * g.variance / var;
    // s = m(t) + u with m(t) = r t + b2, and t - s = (1 - r) t - b2 - u.
    const double b2 = g.mean - r * (f.mean + g.mean);
    const auto pf = expand_shifted(f.poly, 1.0 - r, -b2, -1.0);
    const auto pg = expand_shifted(g.poly, r, b2, 1.0);
    Polynomial acc;
    double moment = 1.0;  // E[u^j] for even j: w^{j/2} (j-1)!!
    for (std::size_t j = 0; j < pf.size() + pg.size() - 1; j += 2) {
        if (j > 0) moment *= w * static_cast<double>(j - 1);
        Polynomial term;
        for (std::size_t a = 0; a <= j && a < pf.size(); ++a) {
            const std::size_t b = j - a;
            if (b < pg.size()) term += pf[a] * pg[b];
        }
        acc += term * moment;
    }
    acc *= std::sqrt(2.0 * std::numbers::pi * w);
    return {std::move(acc), f.mean + g.mean, var};
}

bool same_shape(const GaussAtom& a, const GaussAtom& b) {
    return std::abs(a.mean - b.mean) <= 1e-12 * (1.0 + std::abs(a.mean)) &&
           std::abs(a.variance - b.variance) <= 1e-12 * a.variance;
}

// Local maximiser of |fn| on [a, b] by golden-section search.
template <class Fn>
double golden_max(Fn fn, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = std::abs(fn(c)), fd = std::abs(fn(d));
    for (int it = 0; it < 60; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc; c = b - g * (b - a); fc = std::abs(fn(c));
        } else {
            a = c; c = d; fc = fd; d = a + g * (b - a); fd = std::abs(fn(d));
        }
    }
    return std::max(fc, fd);
}

}  // namespace

// ---------------------------------------------------------------- GridFn

GridFn::GridFn(double t_start, double t_step, std::vector<cplx> samples, double support_tol)
    : t_start_(t_start), t_step_(t_step), samples_(std::move(samples)) {
    if (!(t_step_ > 0.0)) throw std::invalid_argument("GridFn: t_step must be positive");
    if (samples_.empty()) throw std::invalid_argument("GridFn: samples must be nonempty");
    if (std::abs(samples_.front()) > support_tol || std::abs(samples_.back()) > support_tol)
        throw std::invalid_argument("GridFn: window endpoints exceed the support tolerance");
}

GridFn::GridFn(Unchecked, double t_start, double t_step, std::vector<cplx> samples)
    : t_start_(t_start), t_step_(t_step), samples_(std::move(samples)) {
    if (samples_.empty()) samples_.push_back({});
}

GridFn GridFn::sample(const std::function<cplx(double)>& fn, double t_start, double t_step,
                      std::size_t count, double support_tol) {
    std::vector<cplx> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = fn(t_start + static_cast<double>(i) * t_step);
    return GridFn(t_start, t_step, std::move(s), support_tol);
}

GridFn GridFn::sample_on_lattice(const std::function<cplx(double)>& fn, double t_step, double radius,
                                 double support_tol) {
    const long n = static_cast<long>(std::ceil(radius / t_step - 1e-9));
    return sample(fn, -static_cast<double>(n) * t_step, t_step, static_cast<std::size_t>(2 * n + 1), support_tol);
}

GridFn GridFn::zero(double t_step, double t_start) { return GridFn(t_start, t_step, {cplx{}}); }

cplx GridFn::operator()(double t) const {
    const auto st = cubic_stencil((t - t_start_) / t_step_, samples_.size());
    return apply_stencil(st, [&](std::size_t i) { return samples_[i]; });
}

GridFn GridFn::resample(double t_start, double t_step, std::size_t count) const {
    std::vector<cplx> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = (*this)(t_start + static_cast<double>(i) * t_step);
    return GridFn(Unchecked{}, t_start, t_step, std::move(s));
}

// ---------------------------------------------------------------- GaussPolyFn

double GaussAtom::operator()(double t) const {
    const double d = t - mean;
    return poly(t) * std::exp(-d * d / (2.0 * variance));
}

GaussPolyFn::GaussPolyFn(std::vector<GaussAtom> atoms) {
    for (auto& a : atoms) {
        if (!(a.variance > 0.0)) throw std::invalid_argument("GaussPolyFn: variance must be positive");
        if (a.poly.is_zero()) continue;
        auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const GaussAtom& b) { return same_shape(a, b); });
        if (it == atoms_.end()) {
            atoms_.push_back(std::move(a));
        } else {
            it->poly += a.poly;
        }
    }
    std::erase_if(atoms_, [](const GaussAtom& a) { return a.poly.is_zero(); });
}

GaussPolyFn GaussPolyFn::gaussian(double amplitude, double mean, double variance) {
    return GaussPolyFn({GaussAtom{Polynomial::constant(amplitude), mean, variance}});
}

double GaussPolyFn::operator()(double t) const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a(t);
    return acc;
}

std::pair<double, double> GaussPolyFn::effective_support() const {
    if (atoms_.empty()) return {0.0, 0.0};
    double lo = atoms_.front().mean, hi = lo;
    for (const auto& a : atoms_) {
        const double sigma = std::sqrt(a.variance);
        const double reach = (12.0 + 2.0 * std::sqrt(static_cast<double>(std::max(a.poly.degree(), 0)))) * sigma;
        lo = std::min(lo, a.mean - reach);
        hi = std::max(hi, a.mean + reach);
    }
    return {lo, hi};
}

GridFn GaussPolyFn::to_grid(double t_start, double t_step, std::size_t count) const {
    return GridFn::sample([this](double t) { return cplx((*this)(t)); }, t_start, t_step, count);
}

GridFn GaussPolyFn::to_grid(double t_step) const {
    const auto [lo, hi] = effective_support();
    const double first = std::floor(lo / t_step);
    const double last = std::ceil(hi / t_step);
    return to_grid(first * t_step, t_step, static_cast<std::size_t>(last - first) + 1);
}

GaussPolyFn random_gauss_poly(std::mt19937_64& rng, int atoms, int degree) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0), mean(-2.0, 2.0), var(0.5, 2.0);
    std::vector<GaussAtom> out;
    for (int a = 0; a < atoms; ++a) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1);
        for (auto& v : c) v = coeff(rng);
        const double mu = mean(rng);
        out.push_back({Polynomial(std::move(c)), mu, var(rng)});
    }
    return GaussPolyFn(std::move(out));
}

// ---------------------------------------------------------------- operations

GridFn convolve(const GridFn& f, const GridFn& g) {
    require_same_step(f, g);
    const std::size_t n = f.size() + g.size() - 1;
    std::vector<cplx> out(n);
    const auto fs = f.samples();
    const auto gs = g.samples();
    for (std::size_t j = 0; j < gs.size(); ++j) {
        const cplx gj = gs[j];
        if (gj == cplx{}) continue;
        for (std::size_t i = 0; i < fs.size(); ++i) out[i + j] += fs[i] * gj;
    }
    for (auto& v : out) v *= f.t_step();
    return GridFn(GridFn::Unchecked{}, f.t_start() + g.t_start(), f.t_step(), std::move(out));
}

GaussPolyFn convolve(const GaussPolyFn& f, const GaussPolyFn& g) {
    std::vector<GaussAtom> out;
    out.reserve(f.atoms().size() * g.atoms().size());
    for (const auto& a : f.atoms())
        for (const auto& b : g.atoms()) out.push_back(convolve_atoms(a, b));
    return GaussPolyFn(std::move(out));
}

GridFn add(const GridFn& f, const GridFn& g) {
    return combine(f, g, [](cplx a, cplx b) { return a + b; });
}

GaussPolyFn add(const GaussPolyFn& f, const GaussPolyFn& g) {
    std::vector<GaussAtom> atoms(f.atoms().begin(), f.atoms().end());
    atoms.insert(atoms.end(), g.atoms().begin(), g.atoms().end());
    return GaussPolyFn(std::move(atoms));
}

GridFn subtract(const GridFn& f, const GridFn& g) {
    return combine(f, g, [](cplx a, cplx b) { return a - b; });
}

GaussPolyFn subtract(const GaussPolyFn& f, const GaussPolyFn& g) { return add(f, scale(g, -1.0)); }

GridFn scale(const GridFn& f, cplx s) {
    return pointwise(f, [s](double, cplx v) { return v * s; });
}

GaussPolyFn scale(const GaussPolyFn& f, double s) {
    std::vector<GaussAtom> atoms(f.atoms().begin(), f.atoms().end());
    for (auto& a : atoms) a.poly *= s;
    return GaussPolyFn(std::move(atoms));
}

GridFn mul_by_t(const GridFn& f) {
    return pointwise(f, [](double t, cplx v) { return t * v; });
}

GaussPolyFn mul_by_t(const GaussPolyFn& f) { return mul_by_poly(f, Polynomial({0.0, 1.0})); }

GridFn mul_by_poly(const GridFn& f, const Polynomial& p) {
    return pointwise(f, [&p](double t, cplx v) { return p(t) * v; });
}

GaussPolyFn mul_by_poly(const GaussPolyFn& f, const Polynomial& p) {
    std::vector<GaussAtom> atoms(f.atoms().begin(), f.atoms().end());
    for (auto& a : atoms) a.poly = a.poly * p;
    return GaussPolyFn(std::move(atoms));
}

GridFn mul_by_exp(const GridFn& f, double c) {
    if (c == 0.0) return f;
    return pointwise(f, [c](double t, cplx v) { return std::exp(c * t) * v; });
}

GaussPolyFn mul_by_exp(const GaussPolyFn& f, double c) {
    if (c == 0.0) return f;
    std::vector<GaussAtom> atoms(f.atoms().begin(), f.atoms().end());
    for (auto& a : atoms) {
        a.poly *= std::exp(c * a.mean + 0.5 * c * c * a.variance);
        a.mean += c * a.variance;
    }
    return GaussPolyFn(std::move(atoms));
}

GridFn zero_like(const GridFn& f) { return GridFn::zero(f.t_step(), f.t_start()); }
GaussPolyFn zero_like(const GaussPolyFn&) { return {}; }

double sup_norm(const GridFn& f) {
    double m = 0.0;
    for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
    return m;
}

double sup_norm(const GaussPolyFn& f) {
    if (f.is_zero()) return 0.0;
    double min_var = f.atoms().front().variance;
    for (const auto& a : f.atoms()) min_var = std::min(min_var, a.variance);
    const double h = std::sqrt(min_var) / 16.0;
    const auto [lo, hi] = f.effective_support();
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    double best = -1.0, best_t = lo;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = lo + static_cast<double>(i) * h;
        const double v = std::abs(f(t));
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    return std::max(best, golden_max([&f](double t) { return f(t); }, best_t - h, best_t + h));
}

double l1_norm(const GridFn& f) {
    double acc = 0.0;
    for (const auto& v : f.samples()) acc += std::abs(v);
    return acc * f.t_step();
}

double l2_norm(const GridFn& f) {
    double acc = 0.0;
    for (const auto& v : f.samples()) acc += std::norm(v);
    return std::sqrt(acc * f.t_step());
}

namespace {

// Step fine enough that the trapezoid rule on |f|^q is accurate to ~1e-10.
GridFn dense_grid(const GaussPolyFn& f) {
    double min_var = f.atoms().front().variance;
    for (const auto& a : f.atoms()) min_var = std::min(min_var, a.variance);
    const double h = std::sqrt(min_var) / 64.0;
    const auto [lo, hi] = f.effective_support();
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
    std::vector<cplx> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = f(lo + static_cast<double>(i) * h);
    return GridFn(GridFn::Unchecked{}, lo, h, std::move(s));
}

}  // namespace

double l1_norm(const GaussPolyFn& f) { return f.is_zero() ? 0.0 : l1_norm(dense_grid(f)); }
double l2_norm(const GaussPolyFn& f) { return f.is_zero() ? 0.0 : l2_norm(dense_grid(f)); }

double sup_distance(const GridFn& f, const GridFn& g) {
    const double h = std::min(f.t_step(), g.t_step());
    const double lo = std::min(f.t_start(), g.t_start());
    const double hi = std::max(f.t_end(), g.t_end());
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9)) + 1;
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = lo + static_cast<double>(i) * h;
        m = std::max(m, std::abs(f(t) - g(t)));
    }
    return m;
}

double sup_distance(const GaussPolyFn& f, const GaussPolyFn& g) { return sup_norm(subtract(f, g)); }

bool approx_eq(const GridFn& f, const GridFn& g, double tol) {
    return sup_distance(f, g) <= tol * std::max(sup_norm(f), sup_norm(g));
}

bool approx_eq(const GaussPolyFn& f, const GaussPolyFn& g, double tol) {
    return sup_distance(f, g) <= tol * std::max(sup_norm(f), sup_norm(g));
}

// ---------------------------------------------------------------- I/O

void write_csv(std::ostream& os, const GridFn& f) {
    os << "t,re,im\n";
    os.precision(17);
    for (std::size_t i = 0; i < f.size(); ++i)
        os << f.t_at(i) << ',' << f.samples()[i].real() << ',' << f.samples()[i].imag() << '\n';
}

void write_binary(std::ostream& os, const GridFn& f) {
    binary::put_f64(os, f.t_start());
    binary::put_f64(os, f.t_step());
    binary::put_u64(os, f.size());
    for (const auto& v : f.samples()) {
        binary::put_f64(os, v.real());
        binary::put_f64(os, v.imag());
    }
}

GridFn read_binary(std::istream& is) {
    const double t0 = binary::get_f64(is);
    const double dt = binary::get_f64(is);
    const auto n = binary::get_u64(is);
    std::vector<cplx> s(n);
    for (auto& v : s) {
        const double re = binary::get_f64(is);
        v = {re, binary::get_f64(is)};
    }
    return GridFn(t0, dt, std::move(s));
}

}  // namespace folab

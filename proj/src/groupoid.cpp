#include "folab/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "folab/binary_io.hpp"
#include "folab/errors.hpp"
#include "folab/interp.hpp"
#include "folab/parallel.hpp"

namespace folab {

namespace {

constexpr double kLatticeTol = 1e-9;

long lattice_index(double t, double step) {
    const double r = std::round(t / step);
    if (std::abs(r * step - t) > kLatticeTol * step)
        throw RepresentationMismatch("t grid is not on the lattice j * t_step");
    return static_cast<long>(r);
}

void validate_grid(const UniformGrid& g, const char* name) {
    if (!(g.step > 0.0) || !std::isfinite(g.step)) throw std::invalid_argument(std::string(name) + " step must be positive");
    if (g.count == 0) throw std::invalid_argument(std::string(name) + " must be nonempty");
}

// Inclusive lattice range of columns holding a nonzero sample.
std::optional<std::pair<long, long>> column_support(const GroupoidKernel& f) {
    const auto nt = f.t_grid().count;
    long lo = std::numeric_limits<long>::max(), hi = std::numeric_limits<long>::min();
    for (std::size_t ix = 0; ix < f.x_grid().count; ++ix)
        for (std::size_t it = 0; it < nt; ++it)
            if (f.at(ix, it) != cplx{}) {
                lo = std::min(lo, f.t_offset() + static_cast<long>(it));
                hi = std::max(hi, f.t_offset() + static_cast<long>(it));
            }
    if (lo > hi) return std::nullopt;
    return std::pair{lo, hi};
}

void require_same_x_and_flow(const GroupoidKernel& f, const GroupoidKernel& g) {
    if (!(f.flow() == g.flow())) throw RepresentationMismatch("kernels belong to different flows");
    if (!(f.x_grid() == g.x_grid())) throw RepresentationMismatch("kernels have different x grids");
    if (std::abs(f.t_grid().step - g.t_grid().step) > 1e-12 * f.t_grid().step)
        throw RepresentationMismatch("kernels have different t steps");
}

cplx interp_column(const GroupoidKernel& f, double x, std::size_t it) {
    const auto& xg = f.x_grid();
    const auto s = lagrange_stencil((x - xg.start) / xg.step, xg.count, kFlowInterpPoints);
    return apply_stencil(s, [&](std::size_t ix) { return f.at(ix, it); });
}

GroupoidKernel zero_kernel(const GroupoidKernel& like) {
    return {GroupoidKernel::Unchecked{}, like.flow(), like.x_grid(), UniformGrid{0.0, like.t_grid().step, 1},
            std::vector<cplx>(like.x_grid().count)};
}

template <class Op>
GroupoidKernel combine(const GroupoidKernel& f, const GroupoidKernel& g, Op op) {
    require_same_x_and_flow(f, g);
    const double dt = f.t_grid().step;
    const long lo = std::min(f.t_offset(), g.t_offset());
    const long hi = std::max(f.t_offset() + static_cast<long>(f.t_grid().count),
                             g.t_offset() + static_cast<long>(g.t_grid().count)) - 1;
    const auto nt = static_cast<std::size_t>(hi - lo + 1);
    const auto nx = f.x_grid().count;
    std::vector<cplx> out(nx * nt);
    auto read = [](const GroupoidKernel& h, std::size_t ix, long j) {
        const long it = j - h.t_offset();
        if (it < 0 || it >= static_cast<long>(h.t_grid().count)) return cplx{};
        return h.at(ix, static_cast<std::size_t>(it));
    };
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (long j = lo; j <= hi; ++j)
            out[ix * nt + static_cast<std::size_t>(j - lo)] = op(read(f, ix, j), read(g, ix, j));
    return {GroupoidKernel::Unchecked{}, f.flow(), f.x_grid(), UniformGrid{static_cast<double>(lo) * dt, dt, nt},
            std::move(out)};
}

template <class Fn>
GroupoidKernel map_admissible(const GroupoidKernel& f, Fn weight) {
    const auto& xg = f.x_grid();
    const auto& tg = f.t_grid();
    std::vector<cplx> out(f.samples().begin(), f.samples().end());
    for (std::size_t ix = 0; ix < xg.count; ++ix)
        for (std::size_t it = 0; it < tg.count; ++it) {
            auto& v = out[ix * tg.count + it];
            if (v == cplx{}) continue;
            const double x = xg.at(ix), t = tg.at(it);
            v = f.flow().admissible(x, t) ? v * weight(x, t) : cplx{};
        }
    return {GroupoidKernel::Unchecked{}, f.flow(), xg, tg, std::move(out)};
}

double row_l1_sup(const GroupoidKernel& f, bool weighted) {
    double best = 0.0;
    for (std::size_t ix = 0; ix < f.x_grid().count; ++ix) {
        double acc = 0.0;
        const double x = f.x_grid().at(ix);
        for (std::size_t it = 0; it < f.t_grid().count; ++it) {
            const double a = std::abs(f.at(ix, it));
            if (a == 0.0) continue;
            const double t = f.t_grid().at(it);
            acc += weighted ? a * beta_cocycle(f.flow(), x, t) : a;
        }
        best = std::max(best, acc * f.t_grid().step);
    }
    return best;
}

std::uint64_t variant_code(const FlowModel& m) {
    return (m.variant == FlowVariant::CompleteRescaled ? 1u : 0u) | (m.direction < 0 ? 2u : 0u);
}

}  // namespace

UniformGrid UniformGrid::symmetric(double step, double radius) {
    if (!(step > 0.0) || !(radius >= 0.0)) throw std::invalid_argument("symmetric grid: bad step or radius");
    const auto half = static_cast<long>(std::ceil(radius / step - 1e-9));
    return {-static_cast<double>(half) * step, step, static_cast<std::size_t>(2 * half + 1)};
}

double smooth_bump(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double plateau_cutoff(double u, double inner) {
    if (!(inner > 0.0 && inner < 1.0)) throw std::invalid_argument("plateau_cutoff: inner must lie in (0, 1)");
    u = std::abs(u);
    if (u <= inner) return 1.0;
    if (u >= 1.0) return 0.0;
    // 1 - S(s) with S the degree-13 smoothstep, S(s) = s^7 sum_j C(6+j, j) C(13, 6-j) (-s)^j.
    static constexpr double c[7] = {1716.0, -9009.0, 20020.0, -24024.0, 16380.0, -6006.0, 924.0};
    const double s = (u - inner) / (1.0 - inner);
    double acc = 0.0;
    for (int j = 6; j >= 0; --j) acc = acc * s + c[j];
    return 1.0 - std::pow(s, 7) * acc;
}

GroupoidKernel::GroupoidKernel(Unchecked, FlowModel flow, UniformGrid x_grid, UniformGrid t_grid,
                               std::vector<cplx> samples)
    : flow_(flow), x_(x_grid), t_(t_grid), samples_(std::move(samples)) {
    validate_grid(x_, "x grid");
    validate_grid(t_, "t grid");
    if (samples_.size() != x_.count * t_.count) throw std::invalid_argument("kernel sample count disagrees with grids");
    t_offset_ = lattice_index(t_.start, t_.step);
}

GroupoidKernel::GroupoidKernel(FlowModel flow, UniformGrid x_grid, UniformGrid t_grid, std::vector<cplx> samples,
                               double support_tol)
    : GroupoidKernel(Unchecked{}, flow, x_grid, t_grid, std::move(samples)) {
    const auto nx = x_.count, nt = t_.count;
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t it = 0; it < nt; ++it) {
            const double a = std::abs(at(ix, it));
            if (a <= support_tol) continue;
            if (ix == 0 || ix + 1 == nx || it == 0 || it + 1 == nt)
                throw std::invalid_argument("kernel does not vanish on the window boundary");
            if (!flow_.admissible(x_.at(ix), t_.at(it)))
                throw OutOfDomain("kernel support leaves the flow domain");
        }
}

GroupoidKernel GroupoidKernel::sample(const FlowModel& flow, const UniformGrid& x_grid, const UniformGrid& t_grid,
                                      const std::function<cplx(double, double)>& fn, double support_tol) {
    std::vector<cplx> s(x_grid.count * t_grid.count);
    for (std::size_t ix = 0; ix < x_grid.count; ++ix)
        for (std::size_t it = 0; it < t_grid.count; ++it) {
            const double x = x_grid.at(ix), t = t_grid.at(it);
            if (flow.admissible(x, t)) s[ix * t_grid.count + it] = fn(x, t);
        }
    return {flow, x_grid, t_grid, std::move(s), support_tol};
}

cplx GroupoidKernel::operator()(double x, double t) const {
    const auto sx = cubic_stencil((x - x_.start) / x_.step, x_.count);
    const auto st = cubic_stencil((t - t_.start) / t_.step, t_.count);
    if (sx.empty || st.empty) return {};
    return apply_stencil(sx, [&](std::size_t ix) { return apply_stencil(st, [&](std::size_t it) { return at(ix, it); }); });
}

BaseFn BaseFn::constant(double c) {
    BaseFn a;
    a.kind_ = Kind::Constant;
    a.a_ = c;
    return a;
}

BaseFn BaseFn::power(int p) {
    if (p < 0) throw std::invalid_argument("BaseFn::power: negative exponent");
    BaseFn a;
    a.kind_ = Kind::Power;
    a.power_ = p;
    return a;
}

BaseFn BaseFn::bump(double center, double radius, double height) {
    if (!(radius > 0.0)) throw std::invalid_argument("BaseFn::bump: radius must be positive");
    BaseFn a;
    a.kind_ = Kind::Bump;
    a.a_ = center;
    a.b_ = radius;
    a.c_ = height;
    return a;
}

BaseFn BaseFn::sampled(const UniformGrid& grid, std::vector<double> values) {
    validate_grid(grid, "BaseFn grid");
    if (values.size() != grid.count) throw std::invalid_argument("BaseFn::sampled: value count disagrees with grid");
    BaseFn a;
    a.kind_ = Kind::Sampled;
    a.grid_ = grid;
    a.values_ = std::move(values);
    return a;
}

double BaseFn::operator()(double x) const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::Power: return std::pow(x, power_);
        case Kind::Bump: return c_ * smooth_bump((x - a_) / b_);
        case Kind::Sampled: {
            const auto s = cubic_stencil((x - grid_.start) / grid_.step, grid_.count);
            return apply_stencil(s, [&](std::size_t i) { return values_[i]; });
        }
    }
    return 0.0;
}

GroupoidKernel convolve(const GroupoidKernel& f, const GroupoidKernel& g) {
    require_same_x_and_flow(f, g);
    const auto fs = column_support(f), gs = column_support(g);
    if (!fs || !gs) return zero_kernel(f);
    const auto [fa, fb] = *fs;
    const auto [ga, gb] = *gs;
    const double dt = f.t_grid().step;
    const long lo = fa + ga - 1, hi = fb + gb + 1;
    const auto nt = static_cast<std::size_t>(hi - lo + 1);
    const auto& xg = f.x_grid();
    const auto& flow = f.flow();
    std::vector<cplx> out(xg.count * nt);

    parallel_for(xg.count, [&](std::size_t ix) {
        const double x = xg.at(ix);
        cplx* row = out.data() + ix * nt;
        for (long js = ga; js <= gb; ++js) {
            const cplx gv = g.at(ix, static_cast<std::size_t>(js - g.t_offset()));
            if (gv == cplx{}) continue;
            const double s = static_cast<double>(js) * dt;
            if (!flow.admissible(x, s)) {
                if (std::abs(gv) > kSupportTol) throw OutOfDomain("convolution quadrature leaves the flow domain");
                continue;
            }
            const double y = flow_eval(flow, x, s);
            const auto st = lagrange_stencil((y - xg.start) / xg.step, xg.count, kFlowInterpPoints);
            if (st.empty) continue;
            const cplx w = gv * dt;
            for (long jf = fa; jf <= fb; ++jf) {
                const auto it = static_cast<std::size_t>(jf - f.t_offset());
                const cplx fv = apply_stencil(st, [&](std::size_t jx) { return f.at(jx, it); });
                row[jf + js - lo] += w * fv;
            }
        }
    });
    return {GroupoidKernel::Unchecked{}, flow, xg, UniformGrid{static_cast<double>(lo) * dt, dt, nt}, std::move(out)};
}

GroupoidKernel adjoint(const GroupoidKernel& f) {
    const auto& xg = f.x_grid();
    const auto nt = f.t_grid().count;
    const double dt = f.t_grid().step;
    const long off = -(f.t_offset() + static_cast<long>(nt) - 1);
    std::vector<bool> live(nt, false);
    for (std::size_t ix = 0; ix < xg.count; ++ix)
        for (std::size_t it = 0; it < nt; ++it) {
            const cplx v = f.at(ix, it);
            if (v == cplx{}) continue;
            live[it] = true;
            if (std::abs(v) <= kSupportTol) continue;
            // The arrow (x, t) reappears in f* at its target phi_t(x).
            const double target = flow_eval(f.flow(), xg.at(ix), f.t_grid().at(it));
            if (!(target > xg.start && target < xg.end())) throw OutOfDomain("adjoint support leaves the x window");
        }
    std::vector<cplx> out(xg.count * nt);
    parallel_for(xg.count, [&](std::size_t ix) {
        const double x = xg.at(ix);
        for (std::size_t jt = 0; jt < nt; ++jt) {
            const std::size_t src = nt - 1 - jt;
            if (!live[src]) continue;
            const double t = static_cast<double>(off + static_cast<long>(jt)) * dt;
            // Outside the groupoid: no arrow with source x and length t.
            if (!f.flow().admissible(x, t)) continue;
            out[ix * nt + jt] = std::conj(interp_column(f, flow_eval(f.flow(), x, t), src));
        }
    });
    return {GroupoidKernel::Unchecked{}, f.flow(), xg, UniformGrid{static_cast<double>(off) * dt, dt, nt}, std::move(out)};
}

GroupoidKernel add(const GroupoidKernel& f, const GroupoidKernel& g) {
    return combine(f, g, [](cplx a, cplx b) { return a + b; });
}

GroupoidKernel subtract(const GroupoidKernel& f, const GroupoidKernel& g) {
    return combine(f, g, [](cplx a, cplx b) { return a - b; });
}

GroupoidKernel module_mult_left(const BaseFn& a, const GroupoidKernel& g) {
    return map_admissible(g, [&](double x, double t) { return a(flow_eval(g.flow(), x, t)); });
}

GroupoidKernel module_mult_right(const GroupoidKernel& g, const BaseFn& a) {
    return map_admissible(g, [&](double x, double) { return a(x); });
}

GroupoidKernel delta_multiply(const GroupoidKernel& f) {
    return map_admissible(f, [&](double x, double t) { return cocycle_delta(f.flow(), x, t); });
}

double sup_norm(const GroupoidKernel& f) {
    double m = 0.0;
    for (auto v : f.samples()) m = std::max(m, std::abs(v));
    return m;
}

double sup_distance(const GroupoidKernel& f, const GroupoidKernel& g) { return sup_norm(subtract(f, g)); }

double relative_distance(const GroupoidKernel& f, const GroupoidKernel& g) {
    const double scale = std::max(sup_norm(f), sup_norm(g));
    return scale == 0.0 ? 0.0 : sup_distance(f, g) / scale;
}

double l1_groupoid_norm(const GroupoidKernel& f) { return std::max(row_l1_sup(f, false), row_l1_sup(adjoint(f), false)); }

double l1_as_norm(const GroupoidKernel& f) { return std::max(row_l1_sup(f, true), row_l1_sup(adjoint(f), true)); }

GridJet taylor_map(const GroupoidKernel& f, int p, int max_order) {
    if (p < 0) throw std::invalid_argument("taylor_map: negative order");
    if (p > max_order) throw ResolutionError("taylor_map: order exceeds the configured maximum");
    const auto& xg = f.x_grid();
    const double pos = -xg.start / xg.step;
    if (!(pos > 0.0 && pos < static_cast<double>(xg.count - 1)))
        throw std::invalid_argument("taylor_map: x = 0 is not inside the x grid");
    const int half = p + 2;
    const long centre = std::lround(pos);
    if (centre - half < 0 || centre + half >= static_cast<long>(xg.count))
        throw ResolutionError("taylor_map: x grid too small for the fitting stencil");

    const int rows = 2 * half + 1, cols = p + 3;
    Eigen::MatrixXd vander(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const double u = xg.at(static_cast<std::size_t>(centre - half + r)) / xg.step;
        double pw = 1.0;
        for (int c = 0; c < cols; ++c, pw *= u) vander(r, c) = pw;
    }
    const Eigen::MatrixXd fit = vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(rows, rows));

    const auto nt = f.t_grid().count;
    std::vector<std::vector<cplx>> coeffs(static_cast<std::size_t>(p) + 1, std::vector<cplx>(nt));
    for (std::size_t it = 0; it < nt; ++it)
        for (int n = 0; n <= p; ++n) {
            cplx acc{};
            for (int r = 0; r < rows; ++r) acc += fit(n, r) * f.at(static_cast<std::size_t>(centre - half + r), it);
            coeffs[static_cast<std::size_t>(n)][it] = acc / std::pow(xg.step, n);
        }
    std::vector<GridFn> out;
    for (auto& c : coeffs) out.emplace_back(GridFn::Unchecked{}, f.t_grid().start, f.t_grid().step, std::move(c));
    return {f.flow().k, std::move(out)};
}

GroupoidKernel random_kernel(std::mt19937_64& rng, const FlowModel& flow, const UniformGrid& x_grid,
                             const UniformGrid& t_grid, double x_radius, double t_radius, KernelWindow window) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double c[4][4] = {};
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) c[i][j] = coef(rng);
    return GroupoidKernel::sample(flow, x_grid, t_grid, [&](double x, double t) {
        double p = 0.0;
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; i + j <= 3; ++j) p += c[i][j] * std::pow(x, i) * std::pow(t / t_radius, j);
        const double sigma = x_radius / 4.0;
        const double w = window == KernelWindow::Plateau ? plateau_cutoff(x / x_radius)
                                                         : std::exp(-x * x / (2.0 * sigma * sigma));
        return cplx{p * w * smooth_bump(t / t_radius), 0.0};
    });
}

void write_binary(std::ostream& os, const GroupoidKernel& f) {
    using namespace binary;
    put_f64(os, f.x_grid().start);
    put_f64(os, f.x_grid().step);
    put_u64(os, f.x_grid().count);
    put_f64(os, f.t_grid().start);
    put_f64(os, f.t_grid().step);
    put_u64(os, f.t_grid().count);
    put_u64(os, static_cast<std::uint64_t>(f.flow().k));
    put_u64(os, variant_code(f.flow()));
    for (auto v : f.samples()) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
}

GroupoidKernel read_binary_kernel(std::istream& is) {
    using namespace binary;
    UniformGrid xg, tg;
    xg.start = get_f64(is);
    xg.step = get_f64(is);
    xg.count = get_u64(is);
    tg.start = get_f64(is);
    tg.step = get_f64(is);
    tg.count = get_u64(is);
    const auto k = get_u64(is);
    const auto code = get_u64(is);
    if (k < 1 || k > 64 || code > 3) throw std::invalid_argument("kernel record: bad flow descriptor");
    if (xg.count == 0 || tg.count == 0 || xg.count > (1u << 24) || tg.count > (1u << 24) / xg.count)
        throw std::invalid_argument("kernel record: bad grid size");
    FlowModel flow(static_cast<int>(k), (code & 1u) ? FlowVariant::CompleteRescaled : FlowVariant::Monomial,
                   (code & 2u) ? -1 : 1);
    std::vector<cplx> s(xg.count * tg.count);
    for (auto& v : s) {
        const double re = get_f64(is);
        v = {re, get_f64(is)};
    }
    return {GroupoidKernel::Unchecked{}, flow, xg, tg, std::move(s)};
}

void write_csv(std::ostream& os, const GroupoidKernel& f) {
    const auto old = os.precision(17);
    os << "x,t,re,im\n";
    for (std::size_t ix = 0; ix < f.x_grid().count; ++ix)
        for (std::size_t it = 0; it < f.t_grid().count; ++it) {
            const auto v = f.at(ix, it);
            os << f.x_grid().at(ix) << ',' << f.t_grid().at(it) << ',' << v.real() << ',' << v.imag() << '\n';
        }
    os.precision(old);
}

}  // namespace folab

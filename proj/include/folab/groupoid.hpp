#pragma once

// Sampled kernels on the transformation groupoid of a flow on the line, with
// the convolution product for the Lebesgue Haar system
//
//     (f * g)(x, t) = int f(phi_s(x), t - s) g(x, s) ds,
//
// the involution f*(x, t) = conj f(phi_t(x), -t), the actions of functions on
// the base, the two L1 norms and the Taylor map at x = 0 onto jets.

#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include "folab/coeff_ring.hpp"
#include "folab/flow.hpp"
#include "folab/jet.hpp"

namespace folab {

struct UniformGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double end() const { return at(count - 1); }
    bool operator==(const UniformGrid&) const = default;

    // [-radius, radius] rounded outward to the lattice j * step.
    static UniformGrid symmetric(double step, double radius);
};

// Smooth bump exp(1 - 1/(1 - u^2)) on |u| < 1, equal to 1 at u = 0.
double smooth_bump(double u);
// C^6 cutoff equal to 1 on |u| <= inner and 0 on |u| >= 1, polynomial in between.
double plateau_cutoff(double u, double inner = 1.0 / 3.0);

class GroupoidKernel {
public:
    // Samples are row-major in x: index ix * t_grid.count + it. The t grid must
    // lie on the lattice j * t_step. Throws std::invalid_argument on bad grids
    // or nonvanishing window boundary, OutOfDomain if a sample above the
    // support tolerance sits at an inadmissible point.
    GroupoidKernel(FlowModel flow, UniformGrid x_grid, UniformGrid t_grid, std::vector<cplx> samples,
                   double support_tol = kSupportTol);

    // Inadmissible points are left at zero without calling fn.
    static GroupoidKernel sample(const FlowModel& flow, const UniformGrid& x_grid, const UniformGrid& t_grid,
                                 const std::function<cplx(double, double)>& fn, double support_tol = kSupportTol);

    const FlowModel& flow() const { return flow_; }
    const UniformGrid& x_grid() const { return x_; }
    const UniformGrid& t_grid() const { return t_; }
    std::span<const cplx> samples() const { return samples_; }
    cplx at(std::size_t ix, std::size_t it) const { return samples_[ix * t_.count + it]; }
    // Lattice index of t_grid.start.
    long t_offset() const { return t_offset_; }

    // Separable cubic interpolation; zero outside the window.
    cplx operator()(double x, double t) const;

    // Results of arithmetic skip the boundary and domain checks.
    struct Unchecked {};
    GroupoidKernel(Unchecked, FlowModel flow, UniformGrid x_grid, UniformGrid t_grid, std::vector<cplx> samples);

private:
    FlowModel flow_;
    UniformGrid x_;
    UniformGrid t_;
    long t_offset_ = 0;
    std::vector<cplx> samples_;
};

// Lagrange nodes used when convolution and adjoint read a kernel off the x grid.
inline constexpr int kFlowInterpPoints = 8;

// A function of x alone acting on kernels.
class BaseFn {
public:
    static BaseFn constant(double c);
    static BaseFn identity() { return power(1); }
    static BaseFn power(int p);
    // height * smooth_bump((x - center) / radius)
    static BaseFn bump(double center, double radius, double height = 1.0);
    static BaseFn sampled(const UniformGrid& grid, std::vector<double> values);

    double operator()(double x) const;

private:
    enum class Kind { Constant, Power, Bump, Sampled };
    Kind kind_ = Kind::Constant;
    double a_ = 0.0, b_ = 0.0, c_ = 0.0;
    int power_ = 0;
    UniformGrid grid_;
    std::vector<double> values_;
};

// Operands must share flow, x grid and t step. Throws RepresentationMismatch
// otherwise and OutOfDomain if the quadrature leaves the flow domain.
GroupoidKernel convolve(const GroupoidKernel& f, const GroupoidKernel& g);
GroupoidKernel adjoint(const GroupoidKernel& f);
GroupoidKernel add(const GroupoidKernel& f, const GroupoidKernel& g);
GroupoidKernel subtract(const GroupoidKernel& f, const GroupoidKernel& g);

// (a . g)(x, t) = a(phi_t(x)) g(x, t)
GroupoidKernel module_mult_left(const BaseFn& a, const GroupoidKernel& g);
// (g . a)(x, t) = a(x) g(x, t)
GroupoidKernel module_mult_right(const GroupoidKernel& g, const BaseFn& a);
// (Delta f)(x, t) = (phi_t(x) / x) f(x, t)
GroupoidKernel delta_multiply(const GroupoidKernel& f);

double sup_norm(const GroupoidKernel& f);
// sup |f - g| over the union of the windows.
double sup_distance(const GroupoidKernel& f, const GroupoidKernel& g);
// sup_distance / max(sup f, sup g); 0 when both vanish.
double relative_distance(const GroupoidKernel& f, const GroupoidKernel& g);

// max(sup_x int |f(x, t)| dt, sup_x int |f*(x, t)| dt)
double l1_groupoid_norm(const GroupoidKernel& f);
// Same with the integrands weighted by beta(x, t).
double l1_as_norm(const GroupoidKernel& f);

inline constexpr int kMaxTaylorOrder = 6;

// Jet of x-Taylor coefficients at x = 0, f_n(t) = (1/n!) d^n f/dx^n (0, t), from
// a least-squares polynomial fit of degree p + 2 over the 2p + 5 grid points
// nearest 0. Throws ResolutionError if p exceeds max_order or the grid cannot
// hold the stencil.
GridJet taylor_map(const GroupoidKernel& f, int p, int max_order = kMaxTaylorOrder);

// Plateau: plateau_cutoff(x / x_radius), polynomial in x near 0.
// Gaussian: exp(-x^2 / (2 sigma^2)) with sigma = x_radius / 4, analytic.
enum class KernelWindow { Plateau, Gaussian };

// Random kernel P(x, t / t_radius) w(x) bump(t / t_radius) with P a bivariate
// polynomial of total degree <= 3, coefficients in [-1, 1].
GroupoidKernel random_kernel(std::mt19937_64& rng, const FlowModel& flow, const UniformGrid& x_grid,
                             const UniformGrid& t_grid, double x_radius = 0.6, double t_radius = 0.5,
                             KernelWindow window = KernelWindow::Plateau);

// Little-endian: f64 x_start, f64 x_step, u64 x_count, f64 t_start, f64 t_step,
// u64 t_count, u64 k, u64 variant code (bit 0: complete rescaled, bit 1:
// reversed direction), then x_count * t_count (re, im) f64 pairs, row-major in x.
void write_binary(std::ostream& os, const GroupoidKernel& f);
GroupoidKernel read_binary_kernel(std::istream& is);
// Header "x,t,re,im".
void write_csv(std::ostream& os, const GroupoidKernel& f);

}  // namespace folab

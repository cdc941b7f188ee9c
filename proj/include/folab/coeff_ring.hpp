#pragma once

// The coefficient ring of jets: functions of the time variable under
// convolution, with multiplication by t and by e^{ct}. Two representations:
// GridFn (sampled, numerical) and GaussPolyFn (sums of polynomial-times-Gaussian
// atoms, closed under every operation here and evaluated exactly).

#include <complex>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "folab/polynomial.hpp"

namespace folab {

using cplx = std::complex<double>;

inline constexpr double kSupportTol = 1e-10;
inline constexpr double kEqualityTol = 1e-8;

class GridFn {
public:
    // Throws std::invalid_argument if the step is not positive, the samples are
    // empty, or either window endpoint exceeds `support_tol` in modulus.
    GridFn(double t_start, double t_step, std::vector<cplx> samples,
           double support_tol = kSupportTol);

    static GridFn sample(const std::function<cplx(double)>& fn, double t_start, double t_step,
                         std::size_t count, double support_tol = kSupportTol);
    // Symmetric window [-radius, radius] rounded outward to the lattice j * t_step.
    static GridFn sample_on_lattice(const std::function<cplx(double)>& fn, double t_step,
                                    double radius, double support_tol = kSupportTol);
    static GridFn zero(double t_step, double t_start = 0.0);

    double t_start() const { return t_start_; }
    double t_step() const { return t_step_; }
    double t_end() const { return t_at(samples_.size() - 1); }
    std::size_t size() const { return samples_.size(); }
    double t_at(std::size_t i) const { return t_start_ + static_cast<double>(i) * t_step_; }
    std::span<const cplx> samples() const { return samples_; }

    // Cubic interpolation; zero outside the window.
    cplx operator()(double t) const;
    GridFn resample(double t_start, double t_step, std::size_t count) const;

    // Results of arithmetic skip the endpoint check.
    struct Unchecked {};
    GridFn(Unchecked, double t_start, double t_step, std::vector<cplx> samples);

private:
    double t_start_;
    double t_step_;
    std::vector<cplx> samples_;
};

struct GaussAtom {
    Polynomial poly;
    double mean = 0.0;
    double variance = 1.0;

    double operator()(double t) const;
};

class GaussPolyFn {
public:
    GaussPolyFn() = default;
    // Atoms sharing (mean, variance) are merged; zero polynomials dropped.
    explicit GaussPolyFn(std::vector<GaussAtom> atoms);

    static GaussPolyFn gaussian(double amplitude, double mean, double variance);

    std::span<const GaussAtom> atoms() const { return atoms_; }
    bool is_zero() const { return atoms_.empty(); }
    double operator()(double t) const;

    // Window [lo, hi] outside which every atom is below 1e-30 relative.
    std::pair<double, double> effective_support() const;
    GridFn to_grid(double t_start, double t_step, std::size_t count) const;
    // Lattice window covering the effective support.
    GridFn to_grid(double t_step) const;

private:
    std::vector<GaussAtom> atoms_;
};

// Random element with `atoms` atoms: polynomial coefficients uniform in
// [-1, 1] up to `degree`, means in [-2, 2], variances in [0.5, 2].
GaussPolyFn random_gauss_poly(std::mt19937_64& rng, int atoms = 2, int degree = 2);

// Ring operations. GridFn operands must share t_step; add/subtract additionally
// require both windows to sit on a common lattice. Violations throw
// RepresentationMismatch.
GridFn convolve(const GridFn& f, const GridFn& g);
GaussPolyFn convolve(const GaussPolyFn& f, const GaussPolyFn& g);

GridFn add(const GridFn& f, const GridFn& g);
GaussPolyFn add(const GaussPolyFn& f, const GaussPolyFn& g);
GridFn subtract(const GridFn& f, const GridFn& g);
GaussPolyFn subtract(const GaussPolyFn& f, const GaussPolyFn& g);
GridFn scale(const GridFn& f, cplx s);
GaussPolyFn scale(const GaussPolyFn& f, double s);

GridFn mul_by_t(const GridFn& f);
GaussPolyFn mul_by_t(const GaussPolyFn& f);
GridFn mul_by_poly(const GridFn& f, const Polynomial& p);
GaussPolyFn mul_by_poly(const GaussPolyFn& f, const Polynomial& p);
// Pointwise e^{ct} f(t).
GridFn mul_by_exp(const GridFn& f, double c);
GaussPolyFn mul_by_exp(const GaussPolyFn& f, double c);

GridFn zero_like(const GridFn& f);
GaussPolyFn zero_like(const GaussPolyFn& f);

double sup_norm(const GridFn& f);
double sup_norm(const GaussPolyFn& f);
double l1_norm(const GridFn& f);
double l1_norm(const GaussPolyFn& f);
double l2_norm(const GridFn& f);
double l2_norm(const GaussPolyFn& f);

// sup|f - g| <= tol * max(sup|f|, sup|g|). GridFn operands are resampled to a
// common grid (finest step, union window) first.
bool approx_eq(const GridFn& f, const GridFn& g, double tol = kEqualityTol);
bool approx_eq(const GaussPolyFn& f, const GaussPolyFn& g, double tol = kEqualityTol);
double sup_distance(const GridFn& f, const GridFn& g);
double sup_distance(const GaussPolyFn& f, const GaussPolyFn& g);

// CSV with header "t,re,im".
void write_csv(std::ostream& os, const GridFn& f);
// Little-endian record: f64 t_start, f64 t_step, u64 count, then count pairs of
// f64 (re, im).
void write_binary(std::ostream& os, const GridFn& f);
GridFn read_binary(std::istream& is);

}  // namespace folab

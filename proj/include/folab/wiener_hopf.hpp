#pragma once

// Operator-side computations: Fourier transform on the line, symbol loops and
// their winding numbers, Toeplitz finite sections, the Cayley basis of the line
// Hardy space, the source/sink bi-index of a flow, and the numerical witness
// that the Wiener-Hopf algebra is not preserved by a diffeomorphism with
// unbounded derivative.
//
// Sign chain. With fhat(s) = int f(t) e^{-2 pi i s t} dt, transforms of
// functions supported on [0, inf) extend holomorphically to Im s < 0, whose
// boundary is the real line traversed from s = +inf to s = -inf. Line loops are
// sampled in that direction, so 1 - bhat for b(t) = e^{-t/2} 1_{t >= 0} has
// winding +1 and boundary index -1.

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "folab/coeff_ring.hpp"
#include "folab/flow.hpp"

namespace folab {

// fhat(s) for each s, integrating the piecewise cubic interpolant of f over its
// window exactly against e^{-2 pi i s t}. One window end may be a jump (a
// one-sided support); throws NotDecaying if both ends exceed 1e-8 of the peak.
std::vector<cplx> fourier_transform_line(const GridFn& f, const std::vector<double>& s);

class SymbolLoop {
public:
    enum class Kind { Circle, Line };

    // Values at z_j = exp(2 pi i j / n), counterclockwise.
    static SymbolLoop circle(std::vector<cplx> samples, std::string id = "circle");
    static SymbolLoop circle(const std::function<cplx(cplx)>& f, std::size_t n, std::string id = "circle");
    // Samples at s_j = scale cot(theta_j / 2), theta_j = 2 pi j / n (j = 0 is
    // s = inf and takes the common limit). Throws std::invalid_argument if the
    // limits at +inf and -inf differ by more than limit_tol.
    static SymbolLoop line(const std::function<cplx(double)>& f, cplx limit_plus, cplx limit_minus, std::size_t n,
                           double scale = 1.0, std::string id = "line", double limit_tol = 1e-8);

    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<cplx>& values() const { return values_; }
    // Line loops only: the s value of each sample (+inf for j = 0).
    std::vector<double> line_points() const;
    double scale() const { return scale_; }
    double min_modulus() const;

    SymbolLoop map(const std::function<cplx(cplx)>& fn, std::string id) const;

private:
    SymbolLoop(Kind kind, std::vector<cplx> values, double scale, std::string id);

    Kind kind_;
    std::vector<cplx> values_;
    double scale_;
    std::string id_;
};

// Pointwise product of loops sampled at the same points.
SymbolLoop pointwise_product(const SymbolLoop& a, const SymbolLoop& b);

// Line loop of fhat for a sampled f; fhat vanishes at +-inf.
SymbolLoop fourier_loop(const GridFn& f, std::size_t n, double scale = 1.0, std::string id = "fourier");

struct WindingReport {
    std::string symbol_id;
    int winding = 0;
    int boundary_index = 0;  // -winding
    double min_modulus = 0.0;
    double residual = 0.0;   // |spectral argument integral - winding|
};

inline constexpr double kFredholmTol = 1e-12;
inline constexpr double kWindingResidualTol = 0.05;

// Argument principle with a spectral derivative in the loop parameter. Throws
// NotFredholm if the symbol gets within fredholm_tol of 0, ResolutionError if
// the residual exceeds residual_tol or the sampled argument increments disagree.
WindingReport winding_number(const SymbolLoop& loop, double residual_tol = kWindingResidualTol,
                             double fredholm_tol = kFredholmTol);

struct FiniteSection {
    Eigen::MatrixXcd matrix;
    std::string provenance;
    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

// (T_f)_{jk} = fhat(j - k) for 0 <= j, k < n, with circle Fourier coefficients
// from the DFT of the samples. Needs a circle loop with at least 2n - 1 samples.
FiniteSection toeplitz_finite_section(const SymbolLoop& loop, std::size_t n);

struct KernelCounts {
    std::size_t kernel = 0;
    std::size_t cokernel = 0;
};

// Singular values below tol of the matrix and of its adjoint. A diagnostic:
// finite sections of shift-like symbols carry spurious kernel vectors.
KernelCounts finite_section_kernel_counts(const FiniteSection& section, double tol);

// Image of z^n / sqrt(2 pi) under the Cayley unitary: (1/sqrt(pi)) w(t)^n / (t + i),
// w(t) = (t - i)/(t + i). For n < 0 this is the family
// (1/sqrt(pi)) ((t + i)/(t - i))^{-n-1} / (t - i).
std::function<cplx(double)> cayley_basis_image(int n);

// Gram matrix of the images of z^n for the given n, via t = tan(u), which
// turns each integrand into a trigonometric polynomial on (-pi/2, pi/2).
Eigen::MatrixXcd cayley_gram(const std::vector<int>& indices, std::size_t nodes = 512);

struct FlowBiIndex {
    int left = 1;   // +1 if 0 is a source for the left half-line, -1 if a sink
    int right = 1;
    bool operator==(const FlowBiIndex&) const = default;
};

FlowBiIndex flow_bi_index(const FlowModel& model);
inline int parity_invariant(const FlowBiIndex& e) { return e.left + e.right; }

// Orientation-preserving diffeomorphism of the line with its inverse and derivative.
struct Diffeomorphism {
    std::string name;
    std::function<double(double)> map;
    std::function<double(double)> inverse;
    std::function<double(double)> derivative;

    static Diffeomorphism sinh();
    static Diffeomorphism identity();
};

// f(x) = amplitude exp(-pi x^2 / width^2), so that fhat(t) = amplitude width exp(-pi width^2 t^2).
struct GaussianSymbol {
    double amplitude = 1.0;
    double width = 1.0;

    double operator()(double x) const;
    double transform(double t) const;
    bool is_zero() const { return amplitude == 0.0; }
};

struct NonpreservationRow {
    int n = 0;
    double norm = 0.0;           // ||(T_1 - U^{-1} T_2 U) xi_n||_2
    double pulled_back = 0.0;    // ||U^{-1} T_2 U xi_n||_2
    double eta_sup_bound = 0.0;  // ||U xi_n||_1 >= ||eta_n||_inf
};

struct NonpreservationResult {
    std::string diffeomorphism;
    double a = 0.0;              // ||T_1 xi||_2, independent of n
    double translation = 0.0;    // xi_n = xi(. - n * translation)
    std::vector<NonpreservationRow> rows;
};

// T_i = lambda(fhat_i) P with lambda(fhat) the convolution by fhat and P the
// projection onto L^2[0, inf). xi is a smooth bump on [0, 1] normalized in L^2.
// Throws std::invalid_argument if u is not orientation preserving or its
// inverse is inconsistent.
NonpreservationResult nonpreservation_demo(const Diffeomorphism& u, const GaussianSymbol& f1,
                                           const GaussianSymbol& f2, int n_max, double translation = 2.0);

// JSON reports.
void write_json(std::ostream& os, const WindingReport& r);
void write_json(std::ostream& os, const FlowModel& model, const FlowBiIndex& e);

}  // namespace folab

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "folab/errors.hpp"
#include "folab/groupoid.hpp"

using namespace folab;

namespace {

UniformGrid xs(double h, double r = 1.8) { return UniformGrid::symmetric(h, r); }
UniformGrid ts(double h, double r = 0.5) { return UniformGrid::symmetric(h, r); }

GroupoidKernel separable(const FlowModel& flow, double h, double (*a)(double), double (*b)(double),
                         double x_radius = 1.8, double t_radius = 0.5) {
    return GroupoidKernel::sample(flow, xs(h, x_radius), ts(h, t_radius),
                                  [&](double x, double t) { return cplx{a(x) * b(t), 0.0}; });
}

double cut(double x) { return plateau_cutoff(x / 0.6); }
double bump_t(double t) { return smooth_bump(t / 0.5); }

// Simpson's rule on [lo, hi] with n (even) panels.
template <class F>
double simpson(F f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST(GroupoidKernel, RejectsNonvanishingBoundary) {
    const FlowModel flow(1);
    const auto xg = xs(0.1, 1.0), tg = ts(0.1);
    std::vector<cplx> s(xg.count * tg.count, cplx{1.0, 0.0});
    EXPECT_THROW(GroupoidKernel(flow, xg, tg, s), std::invalid_argument);
}

TEST(GroupoidKernel, RejectsSupportOutsideFlowDomain) {
    // Monomial k = 2 is undefined where t x >= 1.
    const FlowModel flow(2);
    const auto xg = xs(0.1, 3.0), tg = ts(0.1, 2.0);
    std::vector<cplx> s(xg.count * tg.count);
    const std::size_t ix = 50, it = 35;  // x = 2.0, t = 1.5
    ASSERT_NEAR(xg.at(ix) * tg.at(it), 3.0, 1e-12);
    s[ix * tg.count + it] = 1.0;
    EXPECT_THROW(GroupoidKernel(flow, xg, tg, s), OutOfDomain);
}

TEST(GroupoidKernel, RejectsOffLatticeTimeGrid) {
    const UniformGrid tg{0.05, 0.1, 5};
    EXPECT_THROW(GroupoidKernel(FlowModel(1), xs(0.1, 1.0), tg, std::vector<cplx>(21 * 5)), RepresentationMismatch);
}

TEST(Convolve, ZeroAnnihilates) {
    std::mt19937_64 rng(1);
    const FlowModel flow(2);
    const auto f = random_kernel(rng, flow, xs(0.04), ts(0.04));
    const auto z = GroupoidKernel::sample(flow, xs(0.04), ts(0.04), [](double, double) { return cplx{}; });
    EXPECT_EQ(sup_norm(convolve(f, z)), 0.0);
    EXPECT_EQ(sup_norm(convolve(z, f)), 0.0);
}

TEST(Convolve, MismatchedOperandsRejected) {
    std::mt19937_64 rng(2);
    const auto f = random_kernel(rng, FlowModel(2), xs(0.04), ts(0.04));
    EXPECT_THROW(convolve(f, random_kernel(rng, FlowModel(3), xs(0.04), ts(0.04))), RepresentationMismatch);
    EXPECT_THROW(convolve(f, random_kernel(rng, FlowModel(2), xs(0.05), ts(0.04))), RepresentationMismatch);
    EXPECT_THROW(convolve(f, random_kernel(rng, FlowModel(2), xs(0.04), ts(0.02))), RepresentationMismatch);
}

TEST(Convolve, SeparableK2MatchesFineGridQuadrature) {
    const FlowModel flow(2);
    auto a = [](double x) { return plateau_cutoff(x / 0.5); };
    auto product = [&](double h) {
        const auto f = GroupoidKernel::sample(flow, xs(h, 0.7), ts(h, 1.0), [&](double x, double t) { return cplx{a(x) * smooth_bump(t)}; });
        const auto g = GroupoidKernel::sample(flow, xs(h, 0.7), ts(h, 1.0), [&](double x, double t) { return cplx{a(x) * t * smooth_bump(t)}; });
        return convolve(f, g);
    };
    const auto coarse = product(0.01), fine = product(0.0025);
    double err = 0.0, sup = 0.0;
    for (std::size_t ix = 0; ix < coarse.x_grid().count; ++ix)
        for (std::size_t it = 0; it < coarse.t_grid().count; ++it) {
            const cplx r = fine(coarse.x_grid().at(ix), coarse.t_grid().at(it));
            err = std::max(err, std::abs(r - coarse.at(ix, it)));
            sup = std::max(sup, std::abs(r));
        }
    EXPECT_LT(err / sup, 1e-6);
}

TEST(Convolve, AssociativeOnRandomKernels) {
    std::mt19937_64 rng(3);
    for (int k = 1; k <= 3; ++k) {
        const FlowModel flow(k);
        double prev = 0.0;
        for (double h : {0.02, 0.01}) {
            const auto f = random_kernel(rng, flow, xs(h), ts(h));
            const auto g = random_kernel(rng, flow, xs(h), ts(h));
            const auto q = random_kernel(rng, flow, xs(h), ts(h));
            const double d = relative_distance(convolve(convolve(f, g), q), convolve(f, convolve(g, q)));
            if (h == 0.01) {
                EXPECT_LT(d, 1e-6) << "k=" << k;
                EXPECT_GT(prev / d, 4.0) << "k=" << k;
            }
            prev = d;
        }
    }
}

TEST(Convolve, ThreadCountDoesNotChangeResult) {
    std::mt19937_64 rng(4);
    const FlowModel flow(2, FlowVariant::CompleteRescaled);
    const auto f = random_kernel(rng, flow, xs(0.04), ts(0.04));
    const auto g = random_kernel(rng, flow, xs(0.04), ts(0.04));
    ::setenv("FOLIATION_LAB_THREADS", "1", 1);
    const auto serial = convolve(f, g);
    ::setenv("FOLIATION_LAB_THREADS", "4", 1);
    const auto threaded = convolve(f, g);
    ::unsetenv("FOLIATION_LAB_THREADS");
    EXPECT_EQ(sup_distance(serial, threaded), 0.0);
}

TEST(Adjoint, IsAnInvolution) {
    std::mt19937_64 rng(5);
    for (const auto& flow : {FlowModel(1), FlowModel(2), FlowModel(3, FlowVariant::CompleteRescaled)}) {
        const auto f = random_kernel(rng, flow, xs(0.005), ts(0.005));
        EXPECT_LT(relative_distance(adjoint(adjoint(f)), f), 1e-8) << flow.k;
    }
}

TEST(Adjoint, AntiMultiplicative) {
    std::mt19937_64 rng(6);
    for (int k = 1; k <= 3; ++k) {
        const FlowModel flow(k);
        const auto f = random_kernel(rng, flow, xs(0.01), ts(0.01));
        const auto g = random_kernel(rng, flow, xs(0.01), ts(0.01));
        EXPECT_LT(relative_distance(adjoint(convolve(f, g)), convolve(adjoint(g), adjoint(f))), 1e-6) << k;
    }
}

TEST(Adjoint, ReflectsTimeWhereFlowIsNearlyTrivial) {
    // For k = 6 and |x| <= 0.1, |phi_t(x) - x| <= 1e-6.
    const FlowModel flow(6);
    const auto f = GroupoidKernel::sample(flow, xs(0.01, 0.2), ts(0.01), [](double x, double t) {
        return cplx{plateau_cutoff(x / 0.1) * (1.0 + t) * smooth_bump(t / 0.5), 0.0};
    });
    const auto fa = adjoint(f);
    double err = 0.0;
    for (std::size_t ix = 0; ix < f.x_grid().count; ++ix)
        for (std::size_t it = 0; it < f.t_grid().count; ++it)
            err = std::max(err, std::abs(fa.at(ix, f.t_grid().count - 1 - it) - f.at(ix, it)));
    EXPECT_LT(err / sup_norm(f), 1e-4);
}

TEST(Adjoint, RaisesWhenSupportLeavesWindow) {
    const FlowModel flow(1);
    // phi_t(0.5) = 0.5 e^{0.4} lies beyond the window edge 0.6.
    const auto f = GroupoidKernel::sample(flow, xs(0.02, 0.6), ts(0.02), [](double x, double t) {
        return cplx{plateau_cutoff(x / 0.55) * smooth_bump(t / 0.5), 0.0};
    });
    EXPECT_THROW(adjoint(f), OutOfDomain);
}

TEST(ModuleAction, ConstantOneIsIdentity) {
    std::mt19937_64 rng(7);
    const auto g = random_kernel(rng, FlowModel(2), xs(0.04), ts(0.04));
    EXPECT_EQ(sup_distance(module_mult_left(BaseFn::constant(1.0), g), g), 0.0);
    EXPECT_EQ(sup_distance(module_mult_right(g, BaseFn::constant(1.0)), g), 0.0);
}

TEST(ModuleAction, AssociativeWithConvolution) {
    std::mt19937_64 rng(8);
    const auto a = BaseFn::bump(0.1, 1.5, 2.0);
    for (int k = 1; k <= 3; ++k) {
        const FlowModel flow(k);
        const auto g = random_kernel(rng, flow, xs(0.01), ts(0.01));
        const auto h = random_kernel(rng, flow, xs(0.01), ts(0.01));
        EXPECT_LT(relative_distance(module_mult_left(a, convolve(g, h)), convolve(module_mult_left(a, g), h)), 1e-6) << k;
        EXPECT_LT(relative_distance(module_mult_right(convolve(g, h), a), convolve(g, module_mult_right(h, a))), 1e-6) << k;
    }
}

TEST(ModuleAction, XTimesFEqualsDeltaFTimesX) {
    std::mt19937_64 rng(9);
    for (const auto& flow : {FlowModel(1), FlowModel(2), FlowModel(3, FlowVariant::CompleteRescaled)}) {
        const auto f = random_kernel(rng, flow, xs(0.02), ts(0.02));
        const auto lhs = module_mult_left(BaseFn::identity(), f);
        const auto rhs = module_mult_right(delta_multiply(f), BaseFn::identity());
        EXPECT_LT(relative_distance(lhs, rhs), 1e-8) << flow.k;
    }
}

TEST(ModuleAction, SampledBaseFunctionMatchesClosedForm) {
    const auto grid = UniformGrid::symmetric(0.01, 2.0);
    std::vector<double> v;
    for (std::size_t i = 0; i < grid.count; ++i) v.push_back(std::sin(grid.at(i)));
    const auto a = BaseFn::sampled(grid, v);
    for (double x : {-1.234, 0.0, 0.5555}) EXPECT_NEAR(a(x), std::sin(x), 1e-9);
}

TEST(TaylorMap, ExactMonomialInX) {
    const FlowModel flow(2);
    const auto f = GroupoidKernel::sample(flow, xs(0.02, 0.7), ts(0.02), [](double x, double t) {
        return cplx{x * plateau_cutoff(x / 0.6) * bump_t(t), 0.0};
    });
    const auto jet = taylor_map(f, 3);
    ASSERT_EQ(jet.order(), 3);
    for (std::size_t it = 0; it < f.t_grid().count; ++it) {
        const double b = bump_t(f.t_grid().at(it));
        EXPECT_NEAR(std::abs(jet[0].samples()[it]), 0.0, 1e-12);
        EXPECT_NEAR(jet[1].samples()[it].real(), b, 1e-12);
        EXPECT_NEAR(std::abs(jet[2].samples()[it]), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(jet[3].samples()[it]), 0.0, 1e-7);
    }
}

TEST(TaylorMap, GaussianProfileOrderTwo) {
    // exp(-x^2) = 1 - x^2 + x^4/2 - ...
    const FlowModel flow(1);
    const auto f = GroupoidKernel::sample(flow, xs(0.02, 1.8), ts(0.02), [](double x, double t) {
        return cplx{std::exp(-x * x) * plateau_cutoff(x / 1.5) * bump_t(t), 0.0};
    });
    const auto jet = taylor_map(f, 2);
    for (std::size_t it = 0; it < f.t_grid().count; ++it) {
        const double b = bump_t(f.t_grid().at(it));
        EXPECT_NEAR(jet[0].samples()[it].real(), b, 1e-8);
        EXPECT_NEAR(std::abs(jet[1].samples()[it]), 0.0, 1e-10);
        EXPECT_NEAR(jet[2].samples()[it].real(), -b, 1e-5);
    }
}

TEST(TaylorMap, HighOrderVanishingGivesZeroJet) {
    const FlowModel flow(3);
    for (int p = 0; p <= 4; ++p) {
        const auto f = GroupoidKernel::sample(flow, xs(0.02, 0.7), ts(0.02), [&](double x, double t) {
            return cplx{std::pow(x, p + 1) * plateau_cutoff(x / 0.6) * bump_t(t), 0.0};
        });
        EXPECT_LT(jet_sup_norm(taylor_map(f, p)), 1e-9) << p;
    }
}

TEST(TaylorMap, ResolutionLimits) {
    const auto f = separable(FlowModel(1), 0.1, [](double x) { return plateau_cutoff(x / 0.3); }, bump_t, 0.4);
    EXPECT_THROW(taylor_map(f, 3), ResolutionError);  // 11-point stencil on a 9-point grid
    EXPECT_NO_THROW(taylor_map(f, 2));
    const auto g = separable(FlowModel(1), 0.02, cut, bump_t);
    EXPECT_THROW(taylor_map(g, kMaxTaylorOrder + 1), ResolutionError);
}

TEST(TaylorMap, HomomorphismOntoJets) {
    std::mt19937_64 rng(10);
    for (int k = 1; k <= 3; ++k) {
        const FlowModel flow(k);
        const auto f = random_kernel(rng, flow, xs(0.01), ts(0.01));
        const auto g = random_kernel(rng, flow, xs(0.01), ts(0.01));
        const auto lhs = taylor_map(convolve(f, g), 2);
        const auto rhs = jet_mul(taylor_map(f, 2), taylor_map(g, 2));
        for (int n = 0; n <= 2; ++n) {
            const double scale = std::max(sup_norm(lhs[n]), sup_norm(rhs[n]));
            EXPECT_LT(sup_distance(lhs[n], rhs[n]) / scale, 1e-4) << "k=" << k << " n=" << n;
        }
    }
}

TEST(Norms, ZeroKernel) {
    const auto z = GroupoidKernel::sample(FlowModel(2), xs(0.05), ts(0.05), [](double, double) { return cplx{}; });
    EXPECT_EQ(l1_groupoid_norm(z), 0.0);
    EXPECT_EQ(l1_as_norm(z), 0.0);
}

TEST(Norms, SeparableKernelPeakedAtFixedPoint) {
    // sup_x |a(x)| int |b| is attained at x = 0, which every flow fixes.
    const double b_l1 = simpson(bump_t, -0.5, 0.5, 20000);
    for (const auto& flow : {FlowModel(1), FlowModel(2), FlowModel(3, FlowVariant::CompleteRescaled)}) {
        const auto f = separable(flow, 0.01, cut, bump_t);
        EXPECT_NEAR(l1_groupoid_norm(f), b_l1, 1e-6 * b_l1) << flow.k;
    }
}

TEST(Norms, AdjointHasSameNorm) {
    std::mt19937_64 rng(11);
    const auto f = random_kernel(rng, FlowModel(2), xs(0.01), ts(0.01));
    EXPECT_NEAR(l1_groupoid_norm(adjoint(f)), l1_groupoid_norm(f), 1e-6 * l1_groupoid_norm(f));
    EXPECT_NEAR(l1_as_norm(adjoint(f)), l1_as_norm(f), 1e-6 * l1_as_norm(f));
}

TEST(Norms, SubmultiplicativeOnRandomPairs) {
    std::mt19937_64 rng(12);
    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i < 3; ++i) {
            const FlowModel flow(k);
            const auto f = random_kernel(rng, flow, xs(0.02), ts(0.02));
            const auto g = random_kernel(rng, flow, xs(0.02), ts(0.02));
            EXPECT_LE(l1_groupoid_norm(convolve(f, g)), l1_groupoid_norm(f) * l1_groupoid_norm(g) * (1 + 1e-6));
        }
}

TEST(Norms, AsNormWeightsByBeta) {
    // k = 1: beta = e^{t/2} off x = 0, so the AS norm of a kernel supported in
    // x > 0 is bracketed by the groupoid norm times the extreme weights.
    const FlowModel flow(1);
    const auto f = GroupoidKernel::sample(flow, xs(0.01), ts(0.01), [](double x, double t) {
        return cplx{smooth_bump((x - 0.4) / 0.2) * bump_t(t), 0.0};
    });
    const double g = l1_groupoid_norm(f), as = l1_as_norm(f);
    EXPECT_GT(as, g * std::exp(-0.25));
    EXPECT_LT(as, g * std::exp(0.25));
    EXPECT_GT(std::abs(as - g), 1e-6 * g);
}

TEST(KernelIo, BinaryRoundTripAndHeader) {
    std::mt19937_64 rng(13);
    const auto f = random_kernel(rng, FlowModel(3, FlowVariant::CompleteRescaled).reversed(), xs(0.05), ts(0.05));
    std::stringstream ss;
    write_binary(ss, f);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 64 + 16 * f.samples().size());
    EXPECT_EQ(static_cast<unsigned char>(bytes[48]), 3u);  // k
    EXPECT_EQ(static_cast<unsigned char>(bytes[56]), 3u);  // rescaled | reversed
    const auto g = read_binary_kernel(ss);
    EXPECT_TRUE(g.flow() == f.flow());
    EXPECT_TRUE(g.x_grid() == f.x_grid());
    EXPECT_TRUE(g.t_grid() == f.t_grid());
    EXPECT_EQ(sup_distance(f, g), 0.0);
}

TEST(KernelIo, CsvLayout) {
    const auto f = separable(FlowModel(1), 0.5, [](double x) { return plateau_cutoff(x / 0.9); }, bump_t, 1.0);
    std::stringstream ss;
    write_csv(ss, f);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "x,t,re,im");
    std::size_t rows = 0;
    while (std::getline(ss, line)) ++rows;
    EXPECT_EQ(rows, f.samples().size());
}

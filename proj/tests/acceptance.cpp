#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "folab/jet.hpp"
#include "folab/suites.hpp"
#include "folab/wiener_hopf.hpp"

using namespace folab;

namespace {

struct Outcome {
    bool passed;
    std::string measured;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = o.passed && secs < limit_s;
    if (!ok) ++failures;
    std::printf("[%s] %d. %s | %s | runtime %.2f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", id, title, o.measured.c_str(),
                secs, limit_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

GridSpec grid_at(double step) {
    GridSpec g;
    g.x_step = g.t_step = step;
    return g;
}

}  // namespace

int main() {
    constexpr double kPi = std::numbers::pi;
    constexpr std::uint64_t kSeed = 20240601;

    criterion(1, "cocycle identity, k=1..4, n<=m<=6, 100 (t,s) pairs", 5.0, [] {
        std::mt19937_64 rng(kSeed);
        double m = 0.0;
        for (int k = 1; k <= 4; ++k) m = std::max(m, cocycle_residual(k, 6, 100, rng));
        return Outcome{m <= 1e-10, fmt("max residual %.3g (tol 1e-10)", m)};
    });

    criterion(2, "jet commutativity dichotomy, k=1..3", 10.0, [] {
        std::mt19937_64 rng(kSeed);
        double below = 0.0, witness = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 3; ++k)
            for (const auto& row : commutativity_report(k, k, 10, rng)) {
                if (row.order <= k - 1) below = std::max(below, row.max_commutator);
                if (row.order == k) witness = std::min(witness, row.witness_norm);
            }
        return Outcome{below <= 1e-10 && witness >= 1e-3,
                       fmt("max commutator below order k %.3g (tol 1e-10), min witness at order k %.4g (floor 1e-3)", below,
                           witness)};
    });

    criterion(3, "x-multiplication relations, 20 random f per k=1..3", 5.0, [] {
        std::mt19937_64 rng(kSeed);
        double m = 0.0;
        for (int k = 1; k <= 3; ++k) m = std::max(m, relation_residual(k, 20, rng));
        return Outcome{m <= 1e-12, fmt("max sup residual %.3g (tol 1e-12)", m)};
    });

    criterion(4, "Taylor map homomorphism, k=1..3, p<=3, 5 pairs, step 0.02", 120.0, [] {
        double coarse = 0.0, ratio = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 3; ++k) {
            const auto r = taylor_homomorphism_error(k, 3, grid_at(0.02), 5, kSeed + static_cast<std::uint64_t>(k));
            coarse = std::max(coarse, r.coarse);
            ratio = std::min(ratio, r.ratio());
        }
        return Outcome{coarse <= 1e-4 && ratio >= 4.0,
                       fmt("max mismatch %.3g at step 0.02 (tol 1e-4), min improvement at 0.01 %.2fx (need 4x)", coarse, ratio)};
    });

    criterion(5, "groupoid *-algebra axioms, k=1..3, step 0.02", 120.0, [] {
        double assoc = 0.0, anti = 0.0, ratio = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 3; ++k) {
            const auto seed = kSeed + static_cast<std::uint64_t>(k);
            const auto a = associativity_error(k, grid_at(0.02), 5, seed);
            const auto b = anti_multiplicativity_error(k, grid_at(0.02), 5, seed);
            assoc = std::max(assoc, a.coarse);
            anti = std::max(anti, b.coarse);
            ratio = std::min({ratio, a.ratio(), b.ratio()});
        }
        return Outcome{assoc <= 1e-6 && anti <= 1e-6 && ratio >= 4.0,
                       fmt("associativity %.3g, anti-multiplicativity %.3g (tol 1e-6), min refinement ratio %.1f (need 4)",
                           assoc, anti, ratio)};
    });

    criterion(6, "index generator 1 - bhat", 5.0, [kPi] {
        const double step = 0.01;
        const auto n = static_cast<std::size_t>(std::lround(80.0 / step)) + 1;
        std::vector<cplx> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = std::exp(-0.5 * static_cast<double>(j) * step);
        const GridFn b(0.0, step, std::move(v), 2.0);
        std::vector<double> s;
        for (int i = -40; i <= 40; ++i) s.push_back(0.125 * i);
        const auto got = fourier_transform_line(b, s);
        double err = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            err = std::max(err, std::abs(got[i] - 1.0 / (0.5 + 2.0 * kPi * cplx{0.0, 1.0} * s[i])));
        const auto loop = fourier_loop(b, 256, 0.2).map([](cplx z) { return 1.0 - z; }, "1-bhat");
        const auto w = winding_number(loop);
        return Outcome{w.winding == 1 && w.boundary_index == -1 && w.residual <= 0.05 && err <= 1e-8,
                       fmt("winding %.0f, boundary index %.0f, residual %.3g (tol 0.05), transform error %.3g (tol 1e-8)",
                           w.winding, w.boundary_index, w.residual, err)};
    });

    criterion(7, "parity classification, k=1..6", 1.0, [] {
        bool ok = true;
        for (int k = 1; k <= 6; ++k) {
            const FlowModel m(k);
            const auto e = flow_bi_index(m);
            const auto r = flow_bi_index(m.reversed());
            ok = ok && std::abs(parity_invariant(e)) == 2 * (k % 2);
            ok = ok && flow_bi_index(FlowModel(k, FlowVariant::CompleteRescaled)) == e;
            ok = ok && r.left == -e.left && r.right == -e.right;
        }
        return Outcome{ok, ok ? "all 6 flows classified as expected" : "mismatch"};
    });

    criterion(8, "non-preservation, u = sinh, Gaussian symbols", 30.0, [] {
        const GaussianSymbol g{1.0, 1.0};
        const auto res = nonpreservation_demo(Diffeomorphism::sinh(), g, g, 150);
        int n0 = -1;
        bool monotone = true;
        double floor = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            const auto& r = res.rows[i];
            if (i > 0 && r.eta_sup_bound > res.rows[i - 1].eta_sup_bound) monotone = false;
            if (n0 < 0 && r.eta_sup_bound < res.a / 10) n0 = r.n;
            if (n0 >= 0) floor = std::min(floor, r.norm / res.a);
        }
        return Outcome{n0 >= 0 && monotone && floor >= 0.5,
                       fmt("a = %.4f, n0 = %.0f, min norm/a from n0 = %.4f (need 0.5), ", res.a, n0, floor) +
                           (monotone ? "sup bound monotone" : "sup bound not monotone")};
    });

    criterion(9, "Cayley images of z^0..z^5 orthonormal", 5.0, [] {
        const auto g = cayley_gram({0, 1, 2, 3, 4, 5});
        const double err = (g - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff();
        return Outcome{err <= 1e-6, fmt("max |G - I| %.3g (tol 1e-6)", err)};
    });

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

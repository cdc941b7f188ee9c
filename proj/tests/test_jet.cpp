#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "folab/jet.hpp"

using namespace folab;

namespace {

const GaussPolyFn kUnit = GaussPolyFn::gaussian(1.0, 0.0, 1.0);  // exp(-t^2/2)

double rel_dist(const GaussPolyFn& a, const GaussPolyFn& b) {
    const double s = std::max(sup_norm(a), sup_norm(b));
    return s == 0.0 ? 0.0 : sup_distance(a, b) / s;
}

double jet_rel_dist(const ExactJet& a, const ExactJet& b) {
    double m = 0.0;
    for (int n = 0; n <= a.order(); ++n) m = std::max(m, rel_dist(a[n], b[n]));
    return m;
}

ExactJet jet_of(int k, std::vector<GaussPolyFn> c) { return {k, std::move(c)}; }

// int exp(-(t-s)^2/2) s exp(-s^2/2) ds = (t/2) sqrt(pi) exp(-t^2/4), by completing the square.
double twist_closed_form(double t) { return 0.5 * t * std::sqrt(std::numbers::pi) * std::exp(-t * t / 4.0); }

}  // namespace

TEST(JetMul, CauchyProductBelowK) {
    std::mt19937_64 rng(3);
    const auto f = random_exact_jet(rng, 3, 2), g = random_exact_jet(rng, 3, 2);
    const auto h = jet_mul(f, g);
    for (int q = 0; q <= 2; ++q) {
        GaussPolyFn cauchy;
        for (int n = 0; n <= q; ++n) cauchy = add(cauchy, convolve(f[n], g[q - n]));
        EXPECT_LT(rel_dist(h[q], cauchy), 1e-12) << "order " << q;
    }
}

TEST(JetMul, TwistTermForK2) {
    const auto f = jet_of(2, {GaussPolyFn{}, kUnit, GaussPolyFn{}});
    const auto g = jet_of(2, {kUnit, GaussPolyFn{}, GaussPolyFn{}});
    const auto h = jet_mul(f, g);
    EXPECT_TRUE(h[0].is_zero());
    for (double t : {-3.0, -1.0, 0.0, 0.5, 1.41, 4.0}) {
        EXPECT_NEAR(h[1](t), std::sqrt(std::numbers::pi) * std::exp(-t * t / 4.0), 1e-13);
        EXPECT_NEAR(h[2](t), twist_closed_form(t), 1e-13);
    }
}

TEST(JetMul, ZeroJetAnnihilates) {
    std::mt19937_64 rng(4);
    const auto f = random_exact_jet(rng, 2, 3);
    const auto z = ExactJet::zero(2, 3, kUnit);
    for (const auto& h : {jet_mul(f, z), jet_mul(z, f)})
        for (const auto& c : h.coeffs) EXPECT_TRUE(c.is_zero());
}

TEST(JetMul, RejectsMismatchedOperands) {
    std::mt19937_64 rng(5);
    EXPECT_THROW(jet_mul(random_exact_jet(rng, 2, 2), random_exact_jet(rng, 3, 2)), std::invalid_argument);
    EXPECT_THROW(jet_mul(random_exact_jet(rng, 2, 2), random_exact_jet(rng, 2, 3)), std::invalid_argument);
}

TEST(JetMul, AssociativeOnRandomTriples) {
    std::mt19937_64 rng(6);
    for (int k = 1; k <= 3; ++k)
        for (int p = 0; p <= 4; ++p) {
            const auto f = random_exact_jet(rng, k, p), g = random_exact_jet(rng, k, p), h = random_exact_jet(rng, k, p);
            EXPECT_LT(jet_rel_dist(jet_mul(jet_mul(f, g), h), jet_mul(f, jet_mul(g, h))), 1e-12)
                << "k=" << k << " p=" << p;
        }
}

TEST(JetMul, TruncationRespectsIdeals) {
    std::mt19937_64 rng(7);
    for (int k = 1; k <= 3; ++k) {
        const auto f = random_exact_jet(rng, k, 4), g = random_exact_jet(rng, k, 4);
        for (int q = 0; q < 4; ++q)
            EXPECT_LT(jet_rel_dist(truncate(jet_mul(f, g), q), jet_mul(truncate(f, q), truncate(g, q))), 1e-13);
    }
}

TEST(XMult, LeftMinusRightIsDerivationForK2) {
    const auto f = jet_of(2, {kUnit, GaussPolyFn{}, GaussPolyFn{}});
    const auto d = jet_subtract(x_mult_left(f), x_mult_right(f));
    EXPECT_TRUE(d[0].is_zero());
    EXPECT_TRUE(d[1].is_zero());
    for (double t : {-2.0, 0.3, 1.7}) EXPECT_NEAR(d[2](t), t * std::exp(-t * t / 2.0), 1e-15);
}

TEST(XMult, LeftIsExponentialTwistForK1) {
    const auto f = jet_of(1, {kUnit, GaussPolyFn{}});
    const auto l = x_mult_left(f);
    EXPECT_TRUE(l[0].is_zero());
    for (double t : {-2.0, 0.0, 0.8, 3.0}) EXPECT_NEAR(l[1](t), std::exp(t) * std::exp(-t * t / 2.0), 1e-14);
}

TEST(XMult, ZeroStaysZeroAndOrderZeroRejected) {
    const auto z = ExactJet::zero(2, 3, kUnit);
    for (const auto& c : x_mult_left(z).coeffs) EXPECT_TRUE(c.is_zero());
    for (const auto& c : x_mult_right(z).coeffs) EXPECT_TRUE(c.is_zero());
    EXPECT_THROW(x_mult_left(ExactJet::zero(2, 0, kUnit)), std::invalid_argument);
    EXPECT_THROW(x_mult_right(ExactJet::zero(2, 0, kUnit)), std::invalid_argument);
}

TEST(XMult, K1IteratesToPowersOfTheTwist) {
    const int p = 4;
    std::vector<GaussPolyFn> c(p + 1);
    c[0] = kUnit;
    auto f = jet_of(1, c);
    for (int n = 1; n <= p; ++n) {
        f = x_mult_left(f);
        for (double t : {-1.0, 0.5, 2.0})
            EXPECT_NEAR(f[n](t), std::exp(n * t) * std::exp(-t * t / 2.0), 1e-12 * std::exp(n * t));
    }
}

TEST(XMult, LeftActionAgreesWithProductByLiftedX) {
    // x f with f = b x^0 equals the Taylor data of (x . F); for k = 2 that is b x + t b x^2 + t^2 b x^3.
    const auto f = jet_of(2, {kUnit, GaussPolyFn{}, GaussPolyFn{}, GaussPolyFn{}});
    const auto l = x_mult_left(f);
    for (double t : {-1.5, 0.7}) {
        const double b = std::exp(-t * t / 2.0);
        EXPECT_NEAR(l[1](t), b, 1e-15);
        EXPECT_NEAR(l[2](t), t * b, 1e-15);
        EXPECT_NEAR(l[3](t), t * t * b, 1e-15);
    }
}

TEST(Commutator, VanishesBelowOrderK) {
    // Truncation order p models the quotient by x^{p+1}: orders <= k - 1 are
    // the commutative quotients by x^p with p <= k.
    std::mt19937_64 rng(8);
    for (int k = 1; k <= 4; ++k)
        for (int p = 0; p <= k - 1; ++p) {
            const auto f = random_exact_jet(rng, k, p), g = random_exact_jet(rng, k, p);
            EXPECT_LE(jet_sup_norm(commutator(f, g)), 1e-10) << "k=" << k << " p=" << p;
        }
}

TEST(Commutator, WitnessAtOrderKForK2) {
    const auto [f, g] = commutator_witness(2, 2);
    const auto c = commutator(f, g);
    EXPECT_TRUE(c[0].is_zero());
    EXPECT_TRUE(c[1].is_zero());
    for (double t : {-2.0, 0.0, 1.0, 2.5}) EXPECT_NEAR(c[2](t), twist_closed_form(t), 1e-13);
}

TEST(Commutator, SelfCommutatorVanishes) {
    std::mt19937_64 rng(9);
    for (int k = 1; k <= 3; ++k) {
        const auto f = random_exact_jet(rng, k, 4);
        EXPECT_LE(jet_sup_norm(commutator(f, f)), 1e-12);
    }
}

TEST(CommutativityReport, DichotomyForK3) {
    std::mt19937_64 rng(10);
    const auto rows = commutativity_report(3, 4, 3, rng);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.expected_commutative, r.order <= 2);
        if (r.expected_commutative) EXPECT_LE(r.max_commutator, 1e-10) << r.order;
        else EXPECT_GE(r.max_commutator, 1e-3) << r.order;
    }
}

TEST(CommutativityReport, OrderZeroCommutesForK1) {
    std::mt19937_64 rng(11);
    const auto rows = commutativity_report(1, 1, 3, rng);
    EXPECT_LE(rows[0].max_commutator, 1e-10);
    EXPECT_GE(rows[1].witness_norm, 1e-3);
}

TEST(CommutativityReport, WitnessNormMatchesClosedForm) {
    // sup_t (t/2) sqrt(pi) exp(-t^2/4) is attained at t = sqrt(2).
    const double expected = std::sqrt(2.0 * std::numbers::pi) / 2.0 * std::exp(-0.5);
    std::mt19937_64 rng(12);
    for (int k = 2; k <= 3; ++k) {
        const auto rows = commutativity_report(k, k, 1, rng);
        EXPECT_NEAR(rows[static_cast<std::size_t>(k)].witness_norm, expected, 1e-9) << k;
    }
    // k = 1: b * (e^t c) - b * c = sqrt(pi) (e^{1/2} e^{-(t-1)^2/4} - e^{-t^2/4}).
    double sup = 0.0;
    for (double t = -10.0; t <= 10.0; t += 1e-4)
        sup = std::max(sup, std::abs(std::sqrt(std::numbers::pi) *
                                     (std::exp(0.5 - (t - 1) * (t - 1) / 4.0) - std::exp(-t * t / 4.0))));
    EXPECT_NEAR(commutativity_report(1, 1, 1, rng)[1].witness_norm, sup, 1e-8);
}

TEST(JetJson, ExactRoundTrip) {
    std::mt19937_64 rng(13);
    const auto f = random_exact_jet(rng, 2, 3);
    std::stringstream ss;
    write_json(ss, f);
    const auto doc = nlohmann::json::parse(ss.str());
    EXPECT_EQ(doc.at("k"), 2);
    EXPECT_EQ(doc.at("p"), 3);
    EXPECT_EQ(doc.at("coeffs").size(), 4u);
    ss.seekg(0);
    const auto g = read_exact_jet_json(ss);
    EXPECT_EQ(jet_rel_dist(f, g), 0.0);
}

TEST(JetJson, GridRoundTrip) {
    const auto b = GridFn::sample([](double t) { return cplx{std::exp(-t * t), t * std::exp(-t * t)}; }, -8.0, 0.5, 33, 1.0);
    const GridJet f(1, {b, scale(b, cplx{0.0, 2.0})});
    std::stringstream ss;
    write_json(ss, f);
    const auto g = read_grid_jet_json(ss);
    ASSERT_EQ(g.order(), 1);
    EXPECT_EQ(sup_distance(f[1], g[1]), 0.0);
}

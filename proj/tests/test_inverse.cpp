#include "knds/errors.hpp"
#include "knds/inverse.hpp"
#include "knds/sl_spectrum.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace knds;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

TraceSet quad(double g0e, double g1e, double g0c, double g1c) {
    TraceSet t;
    t.event.gamma0 = g0e;
    t.event.gammak[1] = g1e;
    t.cosmological.gamma0 = g0c;
    t.cosmological.gammak[1] = g1c;
    return t;
}

}  // namespace

TEST(Inverse, RoundTripGenericSpacetimes) {
    const double cases[][4] = {{1, 0.1, 0.1, 0.05}, {1, 0.3, 0.2, 0.03}, {2.5, 0.8, 0.6, 0.004}, {1, 0.45, 0.35, 0.09}};
    for (const auto& c : cases) {
        const SpacetimeParams p(c[0], c[1], c[2], c[3]);
        const ReconstructionResult r = reconstruct(forward_traces(p));
        EXPECT_LT(rel(r.cosmological_constant, c[3]), 1e-10);
        EXPECT_LT(rel(r.mass, c[0]), 1e-9);
        EXPECT_LT(rel(std::sqrt(r.spin_sq), c[1]), 1e-10);
        EXPECT_LT(rel(std::sqrt(r.charge_sq), c[2]), 1e-7);
        EXPECT_TRUE(r.flags.empty());
        EXPECT_TRUE(r.diagnostics.horizons_consistent);
        EXPECT_LE(r.diagnostics.residual_event, r.diagnostics.residual_tolerance);
    }
}

TEST(Inverse, LambdaIsScaleCovariant) {
    // Traces scale like length^2, so Lambda scales like 1/length^2.
    const TraceSet t = forward_traces(SpacetimeParams(1, 0.3, 0.2, 0.03));
    const double s = 4.0;
    const TraceSet scaled = quad(s * t.event.gamma0, s * t.event.gamma1(), s * t.cosmological.gamma0,
                                 s * t.cosmological.gamma1());
    EXPECT_NEAR(lambda_from_traces(scaled), lambda_from_traces(t) / s, 1e-13);
    const ReconstructionResult r = reconstruct(scaled);
    EXPECT_NEAR(r.mass, 2.0, 1e-8);
    EXPECT_NEAR(r.spin_sq, 0.09 * s, 1e-10);
}

TEST(Inverse, UsesAnyAvailableK) {
    TraceSet t = forward_traces(SpacetimeParams(1, 0.3, 0.2, 0.03), 3);
    const double lambda = lambda_from_traces(t);
    t.event.gammak.erase(1);
    t.cosmological.gammak.erase(1);
    EXPECT_NEAR(lambda_from_traces(t), lambda, 1e-14);
}

TEST(Inverse, InvertHRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-6, 0.999);
    for (int i = 0; i < 200; ++i) {
        const double xi = u(rng);
        EXPECT_NEAR(invert_h(h_of_xi(xi)), xi, 1e-10) << xi;
        EXPECT_NEAR(invert_h_excess(h_excess_of_xi(xi)), xi, 1e-13 * (1 + 1 / xi) * xi);
    }
    EXPECT_THROW((void)invert_h(1.0), OutOfRange);
    EXPECT_THROW((void)invert_h(0.5), OutOfRange);
    EXPECT_THROW((void)invert_h(std::nan("")), OutOfRange);
}

TEST(Inverse, InvertHMatchesBisectionOracle) {
    for (double target : {1.001, 1.3, 2.0, 9.0}) {
        EXPECT_NEAR(invert_h(target), oracle::h_inverse_bisect(oracle::Real(target)), 1e-13);
    }
}

TEST(Inverse, SimplifiedRadiusEqualsLiteralNestedForm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a(0.02, 0.6), q(0.0, 0.5), l(0.005, 0.1);
    int checked = 0;
    while (checked < 100) {
        const SpacetimeParams p(1, a(rng), q(rng), l(rng));
        if (!validate_regime(p).ok()) continue;
        const TraceSet t = forward_traces(p, 1);
        using oracle::Real;
        const Real g0e = t.event.gamma0, g1e = t.event.gamma1(), g0c = t.cosmological.gamma0,
                   g1c = t.cosmological.gamma1();
        const Real hinv = oracle::h_inverse_bisect((g0e - g0c) / (g1e - g1c));
        const Real tail = hinv / (1 - hinv) * (g1c * g0e - g1e * g0c) / (g0e - g1e + g1c - g0c);
        const double re2 = static_cast<double>(g1e / (1 - hinv) - tail);
        const double rc2 = static_cast<double>(g1c / (1 - hinv) - tail);

        const double xi = invert_h_excess(h_excess_target(t));
        const double spin_sq = spin_sq_from_traces(t, xi, lambda_from_traces(t));
        const HorizonRadii r = radii_from_traces(t, xi, spin_sq);
        EXPECT_LT(rel(r.event * r.event, re2), 1e-9);
        EXPECT_LT(rel(r.cosmological * r.cosmological, rc2), 1e-10);
        ++checked;
    }
}

TEST(Inverse, MassChargeFromExactRadii) {
    const SpacetimeParams p(1.3, 0.4, 0.3, 0.02);
    const HorizonSet h = find_horizons(p);
    const MassCharge mc = mass_charge_from_radii(0.02, 0.16, h.event, h.cosmological);
    EXPECT_NEAR(mc.mass, 1.3, 1e-12);
    EXPECT_NEAR(mc.charge_sq, 0.09, 1e-11);
    EXPECT_THROW((void)mass_charge_from_radii(0.02, 0.16, 3.0, 3.0), SingularSystem);
}

TEST(Inverse, IdenticalHorizonTracesAreDegenerate) {
    const TraceSet t = quad(4.6, 4.7, 4.6, 4.7);
    try {
        (void)reconstruct(t);
        FAIL() << "expected DegenerateTraces";
    } catch (const DegenerateTraces& e) {
        EXPECT_EQ(e.stage(), "lambda_from_traces");
    }
}

TEST(Inverse, EqualGamma1FailsAtHDenominator) {
    const TraceSet t = quad(4.6, 4.7, 41.3, 4.7);
    try {
        (void)reconstruct(t);
        FAIL() << "expected DegenerateTraces";
    } catch (const DegenerateTraces& e) {
        EXPECT_EQ(e.stage(), "invert_h/denominator");
        EXPECT_EQ(std::string(e.what()).rfind("invert_h/denominator: ", 0), 0u);
    }
}

TEST(Inverse, NonPositiveLambda) {
    EXPECT_THROW((void)lambda_from_traces(quad(1.0, 2.0, 3.0, 5.0)), NonPositiveLambda);
}

TEST(Inverse, PerturbedTracesAreRejectedOrFlagged) {
    const TraceSet exact = forward_traces(SpacetimeParams(1, 0.1, 0.1, 0.05), 1);
    TraceSet t = exact;
    t.event.gamma0 *= 1.01;
    try {
        const ReconstructionResult r = reconstruct(t);
        EXPECT_FALSE(r.flags.empty());
    } catch (const ReconstructionError& e) {
        EXPECT_FALSE(e.stage().empty());
    }
}

TEST(Inverse, MissingEquivariantTrace) {
    TraceSet t = quad(1, 2, 3, 4);
    t.event.gammak.clear();
    try {
        (void)lambda_from_traces(t);
        FAIL();
    } catch (const ReconstructionError& e) {
        EXPECT_EQ(e.stage(), "lambda_from_traces");
    }
}

TEST(Inverse, RecoversFromNumericalTraces) {
    const SpacetimeParams p(1, 0.3, 0.2, 0.03);
    const ReconstructionResult r = reconstruct(spectral_traces(p, 1, 2048, 256));
    // Spectral traces carry ~1e-7 errors; the reconstruction magnifies them.
    EXPECT_LT(rel(r.cosmological_constant, 0.03), 0.05);
    EXPECT_LT(rel(r.mass, 1.0), 0.05);
}

#include "knds/errors.hpp"
#include "knds/sl_spectrum.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace knds;

namespace {

const MetricProfile kGeneric = MetricProfile::make(0.3, 0.45);

}  // namespace

TEST(SlSpectrum, RoundSphereEigenvalues) {
    for (int k = 0; k <= 3; ++k) {
        const auto e = eigenvalues(assemble_operator({MetricProfile::round_sphere(), k, 2048}), 10);
        ASSERT_EQ(e.values.size(), 10u);
        const int first = std::max(k, 1);
        for (int j = 0; j < 10; ++j) {
            const double n = first + j;
            EXPECT_NEAR(e.values[j], n * (n + 1), 1e-6 * n * (n + 1)) << "k=" << k << " j=" << j;
        }
    }
}

TEST(SlSpectrum, OperatorIsSymmetricTridiagonal) {
    const DiscreteOperator op = assemble_operator({kGeneric, 2, 128});
    EXPECT_EQ(op.diagonal.size(), 128u);
    EXPECT_EQ(op.off_diagonal.size(), 127u);
    for (double d : op.diagonal) EXPECT_TRUE(std::isfinite(d));
}

TEST(SlSpectrum, GridAndCountLimits) {
    EXPECT_THROW((void)assemble_operator({kGeneric, 0, 32}), DomainError);
    const DiscreteOperator op = assemble_operator({kGeneric, 1, 64});
    EXPECT_THROW((void)eigenvalues(op, 17), DomainError);
    EXPECT_NO_THROW((void)eigenvalues(op, 16));
}

TEST(SlSpectrum, SimpleAndIncreasingInK) {
    // k^2 / f grows with k, so the ground state of L_k does for k >= 1.
    std::vector<double> first;
    for (int k = 0; k <= 4; ++k) {
        const auto e = eigenvalues(assemble_operator({kGeneric, k, 512}), 40);
        for (std::size_t j = 1; j < e.values.size(); ++j) EXPECT_GT(e.values[j], e.values[j - 1]);
        first.push_back(e.values.front());
    }
    for (std::size_t k = 2; k < first.size(); ++k) EXPECT_GT(first[k], first[k - 1]);
}

TEST(SlSpectrum, GridConvergenceWithinErrorEstimate) {
    for (int k : {0, 1, 3}) {
        const auto coarse = eigenvalues(assemble_operator({kGeneric, k, 512}), 30);
        const auto fine = eigenvalues(assemble_operator({kGeneric, k, 2048}), 30);
        for (int j = 0; j < 30; ++j) {
            EXPECT_LE(std::abs(coarse.values[j] - fine.values[j]), 4 * coarse.errors[j] + 1e-12 * fine.values[j])
                << "k=" << k << " j=" << j;
        }
    }
}

TEST(SlSpectrum, HomothetyScalesSpectrumAndTrace) {
    const double c = 7.5;
    const SpectrumResult base = compute_spectrum({kGeneric, 1, 1024, 1.0}, 128);
    const SpectrumResult scaled = compute_spectrum({kGeneric, 1, 1024, c}, 128);
    for (std::size_t j = 0; j < base.eigenvalues.size(); ++j) {
        EXPECT_NEAR(scaled.eigenvalues[j] * c, base.eigenvalues[j], 1e-12 * base.eigenvalues[j]);
    }
    EXPECT_NEAR(scaled.trace_total, c * base.trace_total, 1e-12 * scaled.trace_total);
}

TEST(SlSpectrum, RoundSphereTraceTelescopes) {
    const SpectrumResult s = compute_spectrum({MetricProfile::round_sphere(), 1, 2048}, 256);
    EXPECT_NEAR(s.trace_total, 1.0, 1e-6);
    EXPECT_LE(std::abs(s.trace_total - 1.0), s.error_bound);
    EXPECT_NEAR(s.trace_total, s.trace_partial + s.trace_tail_estimate, 1e-15);
    EXPECT_EQ(s.count_converged, 256);
}

TEST(SlSpectrum, TracesIndependentOfK) {
    const std::vector<int> ks{1, 2, 3};
    const auto spectra = compute_spectra(kGeneric, ks, 2048, 256);
    ASSERT_EQ(spectra.size(), 3u);
    for (const auto& s : spectra) {
        EXPECT_NEAR(s.k * s.trace_total, 1.0, s.k * s.error_bound) << s.k;
    }
    EXPECT_EQ(spectra[2].k, 3);
}

TEST(SlSpectrum, Gamma0FromSpectrum) {
    const SpectrumResult s = compute_spectrum({kGeneric, 0, 2048}, 256);
    const double closed = gamma0_normalized_closed(kGeneric);
    EXPECT_NEAR(s.trace_total, closed, 5e-3 * closed);
    EXPECT_LE(std::abs(s.trace_total - closed), s.error_bound);
}

TEST(SlSpectrum, TailModelNeedsEnoughEigenvalues) {
    const std::vector<double> few{2, 6, 12, 20};
    EXPECT_THROW((void)trace_estimate(few, 0, 1.0), TailModelError);
}

TEST(SlSpectrum, TailOfExactSphereSpectrum) {
    // lambda_n = n (n + 1): the fitted tail is exact, so the total telescopes to 1.
    std::vector<double> exact;
    for (int n = 1; n <= 60; ++n) exact.push_back(n * (n + 1.0));
    const SpectrumResult s = trace_estimate(exact, 0, 1.0);
    EXPECT_NEAR(s.trace_total, 1.0, 1e-12);
    EXPECT_NEAR(s.weyl_a, 1.0, 1e-12);
    EXPECT_NEAR(s.weyl_b, 1.0, 1e-10);
}

TEST(SlSpectrum, SphereMultiplicities) {
    const FullSpectrum full = assemble_full_spectrum(MetricProfile::round_sphere(), 3, 12, 1024);
    ASSERT_GE(full.levels.size(), 3u);
    EXPECT_NEAR(full.levels[0].value, 2.0, 1e-8);
    EXPECT_EQ(full.levels[0].multiplicity, 3);
    EXPECT_NEAR(full.levels[1].value, 6.0, 1e-8);
    EXPECT_EQ(full.levels[1].multiplicity, 5);
    EXPECT_NEAR(full.levels[2].value, 12.0, 1e-7);
    EXPECT_EQ(full.levels[2].multiplicity, 7);
    EXPECT_GT(full.complete_below, 12.0);
}

TEST(SlSpectrum, GenericProfileMultiplicities) {
    const FullSpectrum full = assemble_full_spectrum(kGeneric, 4, 20, 512);
    int m = 1;
    for (const auto& level : full.levels) {
        if (level.value >= full.complete_below) break;
        EXPECT_LE(level.multiplicity, 2 * m + 1);
        EXPECT_LE(level.multiplicity, 2);
        ++m;
    }
    EXPECT_GT(m, 6);
}

TEST(SlSpectrum, NumericalTracesOfKnds) {
    const SpacetimeParams p(1, 0.1, 0.1, 0.05);
    const TraceSet t = spectral_traces(p, 2, 1024, 128);
    const TraceSet c = forward_traces(p, 2);
    EXPECT_EQ(t.provenance, TraceProvenance::numerical_spectrum);
    EXPECT_NEAR(t.event.gamma0, c.event.gamma0, 1e-4 * c.event.gamma0);
    EXPECT_NEAR(t.cosmological.gammak.at(2), c.cosmological.gammak.at(2), 1e-4 * c.cosmological.gammak.at(2));
}

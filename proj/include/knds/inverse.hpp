#pragma once

#include "knds/trace_forms.hpp"

#include <string>
#include <vector>

namespace knds {

struct HorizonRadii {
    double event = 0.0;
    double cosmological = 0.0;
};

struct MassCharge {
    double mass = 0.0;
    double charge_sq = 0.0;
};

struct ReconstructionDiagnostics {
    double residual_event = 0.0;   ///< |Delta_r(r_e)| under the recovered parameters
    double residual_cosmo = 0.0;   ///< |Delta_r(r_c)| under the recovered parameters
    double residual_tolerance = 0.0;
    double h_target = 0.0;
    double h_inversion_residual = 0.0;  ///< |h(xi) - target| / target
    double spin_sq_discrepancy = 0.0;   ///< relative gap between the two a^2 routes
    double condition_estimate = 0.0;    ///< 2-norm condition number of the (m, Q^2) system
    /// Recovered r_e, r_c are the event and cosmological roots of the recovered
    /// Delta_r (checked only when Q^2 >= 0).
    bool horizons_consistent = false;
};

struct ReconstructionResult {
    double cosmological_constant = 0.0;
    double xi = 0.0;
    double spin_sq = 0.0;
    double r_event = 0.0;
    double r_cosmo = 0.0;
    double mass = 0.0;
    double charge_sq = 0.0;
    ReconstructionDiagnostics diagnostics;
    std::vector<std::string> flags;

    [[nodiscard]] bool charge_physical() const noexcept;
};

/// Lambda = 3 (g0e - g1e + g1c - g0c) / (g1c g0e - g1e g0c).
///
/// Throws DegenerateTraces when |denominator| < 1e-12 (g1c g0e + g1e g0c) and
/// NonPositiveLambda when the result is not positive.
[[nodiscard]] double lambda_from_traces(const TraceSet& traces);

/// (g0e - g0c) / (g1e - g1c); equals h(xi) for traces of a spacetime.
/// Throws DegenerateTraces (stage "invert_h/denominator") when g1e = g1c.
[[nodiscard]] double h_target(const TraceSet& traces);

/// xi in (0, 1) with h(xi) = target to 1e-12 relative. Throws OutOfRange
/// when target <= 1 + 1e-12 (the a = 0 boundary) or target is not finite.
[[nodiscard]] double invert_h(double target);

/// (g0e - g1e + g1c - g0c) / (g1e - g1c), i.e. h_target - 1 without the
/// cancellation. Same failure modes as h_target.
[[nodiscard]] double h_excess_target(const TraceSet& traces);

/// xi with h(xi) - 1 = excess, solved on h_excess_of_xi. Throws OutOfRange
/// when excess <= 1e-12 or is not finite.
[[nodiscard]] double invert_h_excess(double excess);

/// a^2 = [xi / (1 - xi)] (g1c g0e - g1e g0c) / (g0e - g1e + g1c - g0c),
/// cross-checked against 3 xi / (Lambda (1 - xi)); InconsistentTraces when
/// they differ by more than 1e-9 relative.
[[nodiscard]] double spin_sq_from_traces(const TraceSet& traces, double xi, double lambda);

/// r^2 = g1 / (1 - xi) - a^2 for each horizon. Throws NegativeRadiusSquared
/// if either is not positive and InconsistentTraces unless r_e < r_c.
[[nodiscard]] HorizonRadii radii_from_traces(const TraceSet& traces, double xi, double spin_sq);

/// Solves 2 r m - Q^2 = (r^2 + a^2)(1 - Lambda r^2 / 3) at both radii.
/// Throws SingularSystem when r_c - r_e <= 1e-8 r_c.
[[nodiscard]] MassCharge mass_charge_from_radii(double lambda, double spin_sq, double r_event,
                                                double r_cosmo);

/// Full trace-to-parameter pipeline; every failure is a ReconstructionError
/// naming its stage.
[[nodiscard]] ReconstructionResult reconstruct(const TraceSet& traces);

}  // namespace knds

#pragma once

#include "knds/spacetime.hpp"

namespace knds {

/// Normalized horizon profile
///
///     f(x) = (1 - xi (1 - x^2)) / (1 - beta^2 (1 - x^2)) * (1 - x^2),   x in [-1, 1],
///
/// of the area-4pi metric dx^2 / f + f dphi^2. Stored as (xi, beta^2) and
/// evaluated on demand.
struct MetricProfile {
    double xi = 0.0;
    double beta_sq = 0.0;

    /// Throws DomainError unless 0 <= xi < 1 and 0 <= beta_sq < 1.
    static MetricProfile make(double xi, double beta_sq);
    /// f(x) = 1 - x^2.
    static MetricProfile round_sphere() { return {}; }

    /// Same as profile_eval(*this, x).
    [[nodiscard]] double operator()(double x) const;
};

/// f(x); exactly zero at x = +-1. Throws DomainError outside [-1, 1].
[[nodiscard]] double profile_eval(const MetricProfile& profile, double x);

/// Intrinsic metric eta^2 (1 - xi) (dx^2 / f + f dphi^2) of one horizon.
struct HorizonGeometry {
    double radius = 0.0;
    double eta = 0.0;   ///< sqrt(r0^2 + a^2)
    double beta = 0.0;  ///< a / eta
    double xi = 0.0;
    double area = 0.0;  ///< 4 pi eta^2 (1 - xi)
    /// Lambda of the parent spacetime; enters the curvature through
    /// xi / beta^2 = Lambda eta^2 (1 - xi) / 3.
    double cosmological_constant = 0.0;

    [[nodiscard]] MetricProfile profile() const { return MetricProfile::make(xi, beta * beta); }
    /// Scale factor eta^2 (1 - xi) relating this metric to its normalized profile.
    [[nodiscard]] double homothety() const noexcept { return eta * eta * (1.0 - xi); }
};

/// Pullback of the spacetime metric to r = r0, t = const. Throws NotAHorizon
/// if r0 is not a root of Delta_r within horizon_residual_tolerance.
[[nodiscard]] HorizonGeometry derive_geometry(const SpacetimeParams& params, double r0);

/// Geometry from shape parameters alone (eta > 0, 0 <= beta < 1, 0 <= xi < 1).
/// The cosmological constant is recovered as 3 xi / ((1 - xi) beta^2 eta^2);
/// beta = 0 requires xi = 0.
[[nodiscard]] HorizonGeometry geometry_from_shape(double eta, double beta, double xi);

/// Closed-form Gauss curvature K(x). Throws DomainError outside [-1, 1].
[[nodiscard]] double gauss_curvature(const HorizonGeometry& geometry, double x);

/// 4 pi eta^2 (1 - xi).
[[nodiscard]] double area(const HorizonGeometry& geometry);

}  // namespace knds

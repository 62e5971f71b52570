#include "knds/horizon_geometry.hpp"

#include "knds/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace knds {

namespace {

void require_unit_interval(double x, const char* what) {
    if (!(x >= -1.0 && x <= 1.0)) {
        std::ostringstream msg;
        msg << what << ": x = " << x << " outside [-1, 1]";
        throw DomainError(msg.str());
    }
}

}  // namespace

MetricProfile MetricProfile::make(double xi, double beta_sq) {
    if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("profile requires 0 <= xi < 1");
    if (!(beta_sq >= 0.0 && beta_sq < 1.0)) throw DomainError("profile requires 0 <= beta^2 < 1");
    return MetricProfile{xi, beta_sq};
}

double MetricProfile::operator()(double x) const { return profile_eval(*this, x); }

double profile_eval(const MetricProfile& profile, double x) {
    require_unit_interval(x, "profile_eval");
    const double s = 1.0 - x * x;
    if (s == 0.0) return 0.0;
    const double ratio = (1.0 - profile.xi * s) / (1.0 - profile.beta_sq * s);
    return ratio * s;
}

HorizonGeometry derive_geometry(const SpacetimeParams& params, double r0) {
    if (!(std::isfinite(r0) && r0 > 0.0)) throw NotAHorizon("horizon radius must be positive");
    const double residual = std::abs(delta_r(params, r0));
    if (residual > horizon_residual_tolerance(params, r0)) {
        std::ostringstream msg;
        msg << "r0 = " << r0 << " is not a root of Delta_r (residual " << residual << ")";
        throw NotAHorizon(msg.str());
    }
    const double a = params.spin();
    HorizonGeometry g;
    g.radius = r0;
    g.eta = std::sqrt(r0 * r0 + a * a);
    g.beta = a / g.eta;
    g.xi = params.xi();
    g.cosmological_constant = params.cosmological_constant();
    g.area = area(g);
    return g;
}

HorizonGeometry geometry_from_shape(double eta, double beta, double xi) {
    if (!(std::isfinite(eta) && eta > 0.0)) throw DomainError("eta must be positive");
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("beta must lie in [0, 1)");
    if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("xi must lie in [0, 1)");
    if (beta == 0.0 && xi != 0.0) throw DomainError("beta = 0 forces xi = 0");
    HorizonGeometry g;
    g.eta = eta;
    g.beta = beta;
    g.xi = xi;
    g.radius = eta * std::sqrt(1.0 - beta * beta);
    g.cosmological_constant = beta > 0.0 ? 3.0 * xi / ((1.0 - xi) * beta * beta * eta * eta) : 0.0;
    g.area = area(g);
    return g;
}

double gauss_curvature(const HorizonGeometry& g, double x) {
    require_unit_interval(x, "gauss_curvature");
    const double scale = g.homothety();
    // xi / beta^2, regular as a -> 0.
    const double ratio = g.cosmological_constant * scale / 3.0;
    const double b2 = g.beta * g.beta;
    const double d = 1.0 - b2 * (1.0 - x * x);
    const double shape = (1.0 - b2 * (1.0 + 3.0 * x * x)) / (d * d * d);
    return (ratio + (1.0 - ratio) * shape) / scale;
}

double area(const HorizonGeometry& g) {
    return 4.0 * std::numbers::pi * g.eta * g.eta * (1.0 - g.xi);
}

}  // namespace knds

#include "knds/inverse.hpp"

#include "knds/errors.hpp"

#include <Eigen/SVD>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace knds {

namespace {

constexpr double kDegeneracyTolerance = 1e-8;
constexpr double kSpinCrossCheck = 1e-9;

struct TraceQuad {
    double g0e, g1e, g0c, g1c;
};

TraceQuad unpack(const TraceSet& t, const char* stage) {
    try {
        return {t.event.gamma0, t.event.gamma1(), t.cosmological.gamma0, t.cosmological.gamma1()};
    } catch (const DomainError& e) {
        throw ReconstructionError(stage, e.what());
    }
}

// a b - c d with the rounding error of c d compensated by fma (Kahan).
double difference_of_products(double a, double b, double c, double d) {
    const double cd = c * d;
    const double err = std::fma(-c, d, cd);
    return std::fma(a, b, -cd) + err;
}

// (g1c g0e - g1e g0c) and (g0e - g1e + g1c - g0c). The cross term is a small
// difference of two large products.
double cross_term(const TraceQuad& q) { return difference_of_products(q.g1c, q.g0e, q.g1e, q.g0c); }
double difference_term(const TraceQuad& q) { return (q.g0e - q.g1e) + (q.g1c - q.g0c); }

double horizon_function(double lambda, double spin_sq, double charge_sq, double mass, double r) {
    return (r * r + spin_sq) * (1.0 - lambda * r * r / 3.0) - 2.0 * mass * r + charge_sq;
}

}  // namespace

bool ReconstructionResult::charge_physical() const noexcept {
    return charge_sq >= -1e-9 * (1.0 + spin_sq);
}

double lambda_from_traces(const TraceSet& traces) {
    const TraceQuad q = unpack(traces, "lambda_from_traces");
    const double den = cross_term(q);
    const double scale = std::abs(q.g1c * q.g0e) + std::abs(q.g1e * q.g0c);
    if (!(std::abs(den) >= 1e-12 * scale)) {
        throw DegenerateTraces("lambda_from_traces",
                               "g1c g0e - g1e g0c vanishes; horizons are not distinct");
    }
    const double lambda = 3.0 * difference_term(q) / den;
    if (!(lambda > 0.0)) {
        std::ostringstream msg;
        msg << "recovered Lambda = " << lambda << " is not positive";
        throw NonPositiveLambda("lambda_from_traces", msg.str());
    }
    return lambda;
}

double h_target(const TraceSet& traces) {
    const TraceQuad q = unpack(traces, "invert_h/denominator");
    const double den = q.g1e - q.g1c;
    if (!(std::abs(den) > 1e-14 * (std::abs(q.g1e) + std::abs(q.g1c)))) {
        throw DegenerateTraces("invert_h/denominator", "g1e - g1c vanishes");
    }
    return (q.g0e - q.g0c) / den;
}

double h_excess_target(const TraceSet& traces) {
    const TraceQuad q = unpack(traces, "invert_h/denominator");
    const double den = q.g1e - q.g1c;
    if (!(std::abs(den) > 1e-14 * (std::abs(q.g1e) + std::abs(q.g1c)))) {
        throw DegenerateTraces("invert_h/denominator", "g1e - g1c vanishes");
    }
    return difference_term(q) / den;
}

double invert_h_excess(double excess) {
    if (!std::isfinite(excess) || excess <= 1e-12) {
        std::ostringstream msg;
        msg << "h target 1 + " << excess << " is outside the range (1, inf) of h";
        throw OutOfRange("invert_h", msg.str());
    }
    // h(xi) ~ (pi/2) / sqrt(1 - xi) near xi = 1.
    const double target = 1.0 + excess;
    double gap = std::min(0.5, 0.25 / (target * target));
    while (h_excess_of_xi(1.0 - gap) <= excess) {
        gap *= 0.25;
        if (gap < 4.0 * std::numeric_limits<double>::epsilon()) {
            throw OutOfRange("invert_h", "target exceeds h on the representable range of xi");
        }
    }
    auto f = [excess](double xi) { return h_excess_of_xi(xi) - excess; };
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        f, 0.0, 1.0 - gap, -excess, h_excess_of_xi(1.0 - gap) - excess,
        boost::math::tools::eps_tolerance<double>(), max_iter);
    const double xi = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
    if (!(std::abs(f(xi)) <= 1e-12 * excess) || !(xi > 0.0 && xi < 1.0)) {
        std::ostringstream msg;
        msg << "h inversion residual " << std::abs(f(xi)) << " at xi = " << xi;
        throw OutOfRange("invert_h", msg.str());
    }
    return xi;
}

double invert_h(double target) {
    if (!std::isfinite(target) || target <= 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "h target " << target << " is outside the range (1, inf) of h";
        throw OutOfRange("invert_h", msg.str());
    }
    return invert_h_excess(target - 1.0);
}

double spin_sq_from_traces(const TraceSet& traces, double xi, double lambda) {
    if (!(xi > 0.0 && xi < 1.0)) throw OutOfRange("spin_sq_from_traces", "xi must lie in (0, 1)");
    if (!(lambda > 0.0)) throw NonPositiveLambda("spin_sq_from_traces", "Lambda must be positive");
    const TraceQuad q = unpack(traces, "spin_sq_from_traces");
    const double weight = xi / (1.0 - xi);
    const double from_traces = weight * cross_term(q) / difference_term(q);
    const double from_lambda = 3.0 * weight / lambda;
    const double gap = std::abs(from_traces - from_lambda) / std::abs(from_lambda);
    if (!(gap <= kSpinCrossCheck) || !(from_traces > 0.0)) {
        std::ostringstream msg;
        msg << "a^2 from traces (" << from_traces << ") and from Lambda (" << from_lambda
            << ") disagree";
        throw InconsistentTraces("spin_sq_from_traces", msg.str());
    }
    return from_traces;
}

HorizonRadii radii_from_traces(const TraceSet& traces, double xi, double spin_sq) {
    const TraceQuad q = unpack(traces, "radii_from_traces");
    const double re2 = q.g1e / (1.0 - xi) - spin_sq;
    const double rc2 = q.g1c / (1.0 - xi) - spin_sq;
    if (!(re2 > 0.0) || !(rc2 > 0.0)) {
        std::ostringstream msg;
        msg << "r_e^2 = " << re2 << ", r_c^2 = " << rc2;
        throw NegativeRadiusSquared("radii_from_traces", msg.str());
    }
    HorizonRadii radii{std::sqrt(re2), std::sqrt(rc2)};
    if (!(radii.event < radii.cosmological)) {
        throw InconsistentTraces("radii_from_traces", "event radius is not below the cosmological radius");
    }
    return radii;
}

MassCharge mass_charge_from_radii(double lambda, double spin_sq, double r_event, double r_cosmo) {
    if (!(r_cosmo - r_event > kDegeneracyTolerance * std::abs(r_cosmo))) {
        throw SingularSystem("mass_charge_from_radii", "r_e and r_c coincide; determinant 2(r_c - r_e) vanishes");
    }
    // Elimination of 2 r m - Q^2 = (r^2 + a^2)(1 - Lambda r^2/3) at r_e, r_c,
    // with the common factor (r_c - r_e) divided out analytically.
    const long double l3 = static_cast<long double>(lambda) / 3.0L;
    const long double re = r_event;
    const long double rc = r_cosmo;
    const long double a2 = spin_sq;
    const long double sum = re + rc;
    const long double prod = re * rc;
    const long double sum_sq = re * re + rc * rc;
    MassCharge out;
    out.mass = static_cast<double>(0.5L * sum * (1.0L - l3 * (sum_sq + a2)));
    out.charge_sq = static_cast<double>(prod - a2 - l3 * prod * (sum_sq + prod) - l3 * a2 * prod);
    return out;
}

ReconstructionResult reconstruct(const TraceSet& traces) {
    ReconstructionResult result;
    result.cosmological_constant = lambda_from_traces(traces);
    const double excess = h_excess_target(traces);
    const double target = 1.0 + excess;
    result.xi = invert_h_excess(excess);
    result.spin_sq = spin_sq_from_traces(traces, result.xi, result.cosmological_constant);
    const HorizonRadii radii = radii_from_traces(traces, result.xi, result.spin_sq);
    result.r_event = radii.event;
    result.r_cosmo = radii.cosmological;
    const MassCharge mc =
        mass_charge_from_radii(result.cosmological_constant, result.spin_sq, radii.event, radii.cosmological);
    result.mass = mc.mass;
    result.charge_sq = mc.charge_sq;

    auto& d = result.diagnostics;
    d.h_target = target;
    d.h_inversion_residual = std::abs(h_excess_of_xi(result.xi) - excess) / target;
    d.spin_sq_discrepancy =
        std::abs(result.spin_sq - 3.0 * result.xi / (result.cosmological_constant * (1.0 - result.xi))) /
        result.spin_sq;
    d.residual_event = std::abs(horizon_function(result.cosmological_constant, result.spin_sq,
                                                 result.charge_sq, result.mass, result.r_event));
    d.residual_cosmo = std::abs(horizon_function(result.cosmological_constant, result.spin_sq,
                                                 result.charge_sq, result.mass, result.r_cosmo));
    d.residual_tolerance = 1e-8 * (result.spin_sq + std::abs(result.charge_sq) + 1.0);

    Eigen::Matrix2d system;
    system << 2.0 * result.r_event, -1.0, 2.0 * result.r_cosmo, -1.0;
    const Eigen::JacobiSVD<Eigen::Matrix2d> svd(system);
    d.condition_estimate = svd.singularValues()(0) / svd.singularValues()(1);

    if (d.residual_event > d.residual_tolerance || d.residual_cosmo > d.residual_tolerance) {
        result.flags.emplace_back("horizon-residual-above-tolerance");
    }
    if (!(result.mass > 0.0)) result.flags.emplace_back("non-positive-mass");
    if (!result.charge_physical()) {
        result.flags.emplace_back("unphysical-charge: Q^2 < 0");
    } else if (result.mass > 0.0) {
        try {
            const SpacetimeParams recovered(result.mass, std::sqrt(result.spin_sq),
                                            std::sqrt(std::max(result.charge_sq, 0.0)),
                                            result.cosmological_constant);
            const HorizonSet h = find_horizons(recovered);
            d.horizons_consistent = std::abs(h.event - result.r_event) <= 1e-8 * result.r_event &&
                                    std::abs(h.cosmological - result.r_cosmo) <= 1e-8 * result.r_cosmo;
        } catch (const Error&) {
            d.horizons_consistent = false;
        }
        if (!d.horizons_consistent) result.flags.emplace_back("recovered-radii-not-event-cosmological-pair");
    }
    return result;
}

}  // namespace knds

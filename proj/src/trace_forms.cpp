#include "knds/trace_forms.hpp"

#include "knds/errors.hpp"
#include "knds/quadrature.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace knds {

namespace {

// Below this xi the direct g formula loses more than ~1e-14 to cancellation.
constexpr double kSeriesThreshold = 0.05;

// arctan(u)/u for u^2 = w, by its alternating Taylor series (w small).
double atan_ratio_series(double w) {
    double sum = 0.0;
    double power = 1.0;
    for (int n = 0; n < 60; ++n) {
        const double term = power / (2.0 * n + 1.0);
        sum += (n % 2 == 0) ? term : -term;
        if (term < 1e-18 * std::abs(sum)) break;
        power *= w;
    }
    return sum;
}

// (arctan(u)/u - 1) / u^2 for u^2 = w: -1/3 + w/5 - w^2/7 + ...
double atan_ratio_excess_series(double w) {
    double sum = 0.0;
    double power = 1.0;
    for (int n = 1; n < 60; ++n) {
        const double term = power / (2.0 * n + 1.0);
        sum += (n % 2 == 1) ? -term : term;
        if (term < 1e-18 * std::abs(sum)) break;
        power *= w;
    }
    return sum;
}

// Horizon radius refined in extended precision, so that the traces below are
// close to correctly rounded; the inversion amplifies trace errors by ~1/xi.
long double refine_radius(const SpacetimeParams& p, double r0) {
    const long double a2 = static_cast<long double>(p.spin()) * p.spin();
    const long double q2 = static_cast<long double>(p.charge()) * p.charge();
    const long double l3 = static_cast<long double>(p.cosmological_constant()) / 3.0L;
    const long double m = p.mass();
    long double r = r0;
    for (int i = 0; i < 4; ++i) {
        const long double r2 = r * r;
        const long double f = (r2 + a2) * (1.0L - l3 * r2) - 2.0L * m * r + q2;
        const long double df = 2.0L * r * (1.0L - l3 * r2) - 2.0L * l3 * r * (r2 + a2) - 2.0L * m;
        if (df == 0.0L) break;
        r -= f / df;
    }
    return std::abs(r - r0) <= 1e-12L * r0 ? r : static_cast<long double>(r0);
}

}  // namespace

std::string_view to_string(TraceProvenance p) noexcept {
    switch (p) {
        case TraceProvenance::closed_form: return "closed-form";
        case TraceProvenance::numerical_spectrum: return "numerical-spectrum";
        case TraceProvenance::external_input: return "external-input";
    }
    return "unknown";
}

double HorizonTraces::gamma1() const {
    if (gammak.empty()) throw DomainError("no equivariant trace gamma_k (k >= 1) available");
    const auto& [k, value] = *gammak.begin();
    return static_cast<double>(k) * value;
}

double g_of_xi(double xi) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("g(xi) requires 0 <= xi <= 1");
    if (xi == 1.0) return -1.0;
    const double w = xi / (1.0 - xi);
    if (xi < kSeriesThreshold) {
        // g = (T - 1)/xi with T = arctan(u)/u, and (T - 1)/xi = excess(w) / (1 - xi).
        return atan_ratio_excess_series(w) / (1.0 - xi);
    }
    const double u = std::sqrt(w);
    return (std::atan(u) / u - 1.0) / xi;
}

double h_of_xi(double xi) {
    if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("h(xi) requires 0 <= xi < 1");
    // 1 + xi g(xi) = arctan(u)/u, u^2 = xi/(1 - xi).
    const double w = xi / (1.0 - xi);
    const double ratio = xi < kSeriesThreshold ? atan_ratio_series(w)
                                               : std::atan(std::sqrt(w)) / std::sqrt(w);
    return ratio / (1.0 - xi);
}

double h_excess_of_xi(double xi) {
    if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("h(xi) requires 0 <= xi < 1");
    return xi * (1.0 + g_of_xi(xi)) / (1.0 - xi);
}

double gamma0_closed(const HorizonGeometry& g) {
    const double b2 = g.beta * g.beta;
    return g.eta * g.eta * (1.0 - b2 + (g.xi - b2) * g_of_xi(g.xi));
}

double gamma0_normalized_closed(const MetricProfile& profile) {
    const double b2 = profile.beta_sq;
    return (1.0 - b2 + (profile.xi - b2) * g_of_xi(profile.xi)) / (1.0 - profile.xi);
}

double gammak_closed(const HorizonGeometry& g, int k) {
    if (k == 0) throw ZeroModeError("gamma_k is defined for k != 0; use gamma0_closed for k = 0");
    return g.homothety() / static_cast<double>(std::abs(k));
}

double gamma0_integral(const MetricProfile& profile) {
    auto integrand = [&profile](double x) { return 0.5 * (1.0 - x * x) / profile_eval(profile, x); };
    return integrate(integrand, -1.0, 1.0, 1e-10);
}

TraceSet forward_traces(const SpacetimeParams& params, int k_max) {
    if (k_max < 1) throw DomainError("k_max must be at least 1");
    const HorizonSet horizons = find_horizons(params);

    const long double a2 = static_cast<long double>(params.spin()) * params.spin();
    const long double chi_minus_one = a2 * params.cosmological_constant() / 3.0L;
    const long double xi = chi_minus_one / (1.0L + chi_minus_one);
    const long double one_minus_xi = 1.0L / (1.0L + chi_minus_one);
    const long double g = g_of_xi(static_cast<double>(xi));

    // eta^2 (1 - beta^2) = r^2, so gamma_0 = r^2 + (xi eta^2 - a^2) g.
    auto horizon_traces = [&](double r0) {
        static_cast<void>(derive_geometry(params, r0));
        const long double r = refine_radius(params, r0);
        const long double eta2 = r * r + a2;
        const long double gamma1 = eta2 * one_minus_xi;
        HorizonTraces t;
        t.gamma0 = static_cast<double>(r * r + (xi * eta2 - a2) * g);
        for (int k = 1; k <= k_max; ++k) t.gammak[k] = static_cast<double>(gamma1 / k);
        return t;
    };

    TraceSet set;
    set.event = horizon_traces(horizons.event);
    set.cosmological = horizon_traces(horizons.cosmological);
    set.provenance = TraceProvenance::closed_form;
    if (params.spin() == 0.0) set.flags.emplace_back("inverse-not-applicable: a=0");
    return set;
}

}  // namespace knds

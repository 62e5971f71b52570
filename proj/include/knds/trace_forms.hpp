#pragma once

#include "knds/horizon_geometry.hpp"
#include "knds/spacetime.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace knds {

enum class TraceProvenance { closed_form, numerical_spectrum, external_input };

[[nodiscard]] std::string_view to_string(TraceProvenance p) noexcept;

/// Green's-operator traces of one horizon.
struct HorizonTraces {
    double gamma0 = 0.0;
    /// gamma_k keyed by |k| >= 1.
    std::map<int, double> gammak;

    /// gamma_1, or k gamma_k for the smallest k present. Throws DomainError
    /// when no equivariant trace is available.
    [[nodiscard]] double gamma1() const;
};

struct TraceSet {
    HorizonTraces event;
    HorizonTraces cosmological;
    TraceProvenance provenance = TraceProvenance::closed_form;
    std::vector<std::string> flags;
};

/// g(xi) = [sqrt((1 - xi)/xi) arctan(sqrt(xi/(1 - xi))) - 1] / xi on [0, 1],
/// with g(0) = -1/3 and g(1) = -1. Small xi uses the Taylor series of
/// arctan(u)/u in u^2 = xi/(1 - xi).
[[nodiscard]] double g_of_xi(double xi);

/// h(xi) = (1 + xi g(xi)) / (1 - xi) on [0, 1); h(0) = 1, strictly increasing,
/// unbounded as xi -> 1.
[[nodiscard]] double h_of_xi(double xi);

/// h(xi) - 1 = xi (1 + g(xi)) / (1 - xi), accurate to full relative precision
/// for small xi.
[[nodiscard]] double h_excess_of_xi(double xi);

/// eta^2 [1 - beta^2 + (xi - beta^2) g(xi)].
[[nodiscard]] double gamma0_closed(const HorizonGeometry& geometry);

/// gamma_0 of the normalized (area 4 pi) metric of `profile`:
/// [1 - beta^2 + (xi - beta^2) g(xi)] / (1 - xi).
[[nodiscard]] double gamma0_normalized_closed(const MetricProfile& profile);

/// eta^2 (1 - xi) / |k|. Throws ZeroModeError for k = 0.
[[nodiscard]] double gammak_closed(const HorizonGeometry& geometry, int k);

/// (1/2) * integral over (-1, 1) of (1 - x^2) / f(x), by adaptive quadrature.
[[nodiscard]] double gamma0_integral(const MetricProfile& profile);

/// Closed-form traces gamma_0 and gamma_k (1 <= k <= k_max) of both horizons.
/// Propagates RegimeError. A spacetime with a = 0 is computed on the xi = 0
/// branch and flagged as unsuitable for the inverse problem.
[[nodiscard]] TraceSet forward_traces(const SpacetimeParams& params, int k_max = 3);

}  // namespace knds

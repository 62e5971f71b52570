#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace knds {

/// Physical parameters of a Kerr-Newman-de Sitter spacetime in geometric
/// units (G = c = 1). Construction enforces mass > 0, cosmological constant
/// > 0, spin >= 0 and charge >= 0; spin = 0 and charge = 0 are admitted as
/// degenerate limits.
class SpacetimeParams {
public:
    SpacetimeParams(double mass, double spin, double charge, double cosmological_constant);

    [[nodiscard]] double mass() const noexcept { return mass_; }
    [[nodiscard]] double spin() const noexcept { return spin_; }
    [[nodiscard]] double charge() const noexcept { return charge_; }
    [[nodiscard]] double cosmological_constant() const noexcept { return lambda_; }

    /// chi = 1 + Lambda a^2 / 3.
    [[nodiscard]] double chi() const noexcept;
    /// xi = (Lambda a^2 / 3) / (1 + Lambda a^2 / 3), in [0, 1).
    [[nodiscard]] double xi() const noexcept;

private:
    double mass_;
    double spin_;
    double charge_;
    double lambda_;
};

/// Delta_r = (r^2 + a^2)(1 - Lambda r^2 / 3) - 2 m r + Q^2.
[[nodiscard]] double delta_r(const SpacetimeParams& params, double r);

/// d Delta_r / dr.
[[nodiscard]] double delta_r_derivative(const SpacetimeParams& params, double r);

/// Largest |Delta_r(r)| accepted for a horizon radius: 1e-10 max(1, a^2 + Q^2),
/// widened to a few ulps of the quartic's term magnitude when that is larger.
[[nodiscard]] double horizon_residual_tolerance(const SpacetimeParams& params, double r);

struct RootResiduals {
    double negative = 0.0;
    std::optional<double> cauchy;
    double event = 0.0;
    double cosmological = 0.0;
};

/// Classified real roots of Delta_r = 0.
struct HorizonSet {
    double negative_root = 0.0;
    std::optional<double> cauchy;
    double event = 0.0;
    double cosmological = 0.0;
    RootResiduals residuals;
    /// Every real root, ascending (includes r = 0 when a = Q = 0).
    std::vector<double> real_roots;
    /// Complex-conjugate roots, reported for diagnostics only.
    std::vector<std::complex<double>> complex_roots;
};

/// Locates the roots of Delta_r through the eigenvalues of the companion
/// matrix of the monic quartic, polished by Newton iteration.
///
/// The two largest positive real roots become the event and cosmological
/// horizons and a third positive root, when present, the Cauchy horizon.
/// Throws RegimeError when fewer than two positive real roots exist or when
/// (r_c - r_e) <= 1e-8 r_c.
[[nodiscard]] HorizonSet find_horizons(const SpacetimeParams& params);

struct RegimeReport {
    bool mass_positive = false;
    bool spin_positive = false;
    bool charge_positive = false;
    bool lambda_positive = false;
    bool horizons_found = false;
    bool horizons_distinct = false;
    /// (r_c - r_e) / r_c when horizons were found, otherwise 0.
    double degeneracy_margin = 0.0;
    /// Whether the closed-form cosmological-constant formula applies (needs a != 0).
    bool lambda_formula_applicable = false;
    std::vector<std::string> flags;

    /// True when every standing assumption of the inverse problem holds.
    [[nodiscard]] bool ok() const noexcept;
};

[[nodiscard]] RegimeReport validate_regime(const SpacetimeParams& params);

}  // namespace knds

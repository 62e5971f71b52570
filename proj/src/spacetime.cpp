#include "knds/spacetime.hpp"

#include "knds/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace knds {

namespace {

constexpr double kRealnessTolerance = 1e-10;
constexpr double kDegeneracyTolerance = 1e-8;
constexpr int kMaxNewtonSteps = 30;

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

double polish_root(const SpacetimeParams& p, double r) {
    double best = r;
    double best_residual = std::abs(delta_r(p, r));
    for (int i = 0; i < kMaxNewtonSteps && best_residual > 0.0; ++i) {
        const double d = delta_r_derivative(p, r);
        if (d == 0.0 || !std::isfinite(d)) break;
        r -= delta_r(p, r) / d;
        const double res = std::abs(delta_r(p, r));
        if (!std::isfinite(res)) break;
        if (res < best_residual) {
            best = r;
            best_residual = res;
        } else if (i > 2) {
            break;
        }
    }
    return best;
}

}  // namespace

SpacetimeParams::SpacetimeParams(double mass, double spin, double charge,
                                 double cosmological_constant)
    : mass_(mass), spin_(spin), charge_(charge), lambda_(cosmological_constant) {
    if (!(std::isfinite(mass) && mass > 0.0)) {
        throw DomainError("mass must be finite and positive");
    }
    if (!finite_nonnegative(spin)) throw DomainError("spin must be finite and nonnegative");
    if (!finite_nonnegative(charge)) throw DomainError("charge must be finite and nonnegative");
    if (!(std::isfinite(cosmological_constant) && cosmological_constant > 0.0)) {
        throw DomainError("cosmological constant must be finite and positive");
    }
}

double SpacetimeParams::chi() const noexcept { return 1.0 + lambda_ * spin_ * spin_ / 3.0; }

double SpacetimeParams::xi() const noexcept {
    const double s = lambda_ * spin_ * spin_ / 3.0;
    return s / (1.0 + s);
}

double delta_r(const SpacetimeParams& p, double r) {
    const double a2 = p.spin() * p.spin();
    const double q2 = p.charge() * p.charge();
    return (r * r + a2) * (1.0 - p.cosmological_constant() * r * r / 3.0) - 2.0 * p.mass() * r + q2;
}

double delta_r_derivative(const SpacetimeParams& p, double r) {
    const double a2 = p.spin() * p.spin();
    const double lam = p.cosmological_constant();
    // d/dr [(r^2 + a^2)(1 - L r^2/3)] = 2r(1 - L r^2/3) - (2/3) L r (r^2 + a^2)
    return 2.0 * r * (1.0 - lam * r * r / 3.0) - 2.0 * lam * r * (r * r + a2) / 3.0 - 2.0 * p.mass();
}

double horizon_residual_tolerance(const SpacetimeParams& p, double r) {
    const double a2 = p.spin() * p.spin();
    const double q2 = p.charge() * p.charge();
    const double r2 = r * r;
    const double magnitude = p.cosmological_constant() * r2 * (r2 + a2) / 3.0 + r2 + a2 +
                             2.0 * p.mass() * std::abs(r) + q2;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
    return std::max(1e-10 * std::max(1.0, a2 + q2), floor);
}

HorizonSet find_horizons(const SpacetimeParams& p) {
    const double lam = p.cosmological_constant();
    const double a2 = p.spin() * p.spin();
    const double q2 = p.charge() * p.charge();

    // Monic form: r^4 + c2 r^2 + c1 r + c0 (the cubic coefficient vanishes).
    const double c2 = -(3.0 / lam) * (1.0 - lam * a2 / 3.0);
    const double c1 = 6.0 * p.mass() / lam;
    const double c0 = -3.0 * (a2 + q2) / lam;

    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(3, 2) = 1.0;
    companion(0, 3) = -c0;
    companion(1, 3) = -c1;
    companion(2, 3) = -c2;
    companion(3, 3) = 0.0;

    Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw RegimeError("companion-matrix eigenvalue computation failed");
    }

    HorizonSet set;
    for (const auto& z : solver.eigenvalues()) {
        if (std::abs(z.imag()) < kRealnessTolerance * (1.0 + std::abs(z.real()))) {
            set.real_roots.push_back(polish_root(p, z.real()));
        } else {
            set.complex_roots.push_back(z);
        }
    }
    std::sort(set.real_roots.begin(), set.real_roots.end());

    double scale = 0.0;
    for (double r : set.real_roots) scale = std::max(scale, std::abs(r));
    const double zero_cut = 1e-12 * scale;

    std::vector<double> positive;
    for (double r : set.real_roots) {
        if (r > zero_cut) positive.push_back(r);
    }
    if (positive.size() < 2) {
        std::ostringstream msg;
        msg << "Delta_r has " << positive.size()
            << " positive real root(s); distinct event and cosmological horizons are required";
        throw RegimeError(msg.str());
    }

    const std::size_t n = positive.size();
    set.cosmological = positive[n - 1];
    set.event = positive[n - 2];
    if (n >= 3) set.cauchy = positive[n - 3];
    if (set.real_roots.front() < -zero_cut) {
        set.negative_root = set.real_roots.front();
    } else {
        set.negative_root = std::numeric_limits<double>::quiet_NaN();
    }

    if (!(set.cosmological - set.event > kDegeneracyTolerance * set.cosmological)) {
        throw RegimeError("event and cosmological horizons coincide (degenerate, Nariai-type case)");
    }

    auto residual = [&](double r) { return std::abs(delta_r(p, r)); };
    set.residuals.event = residual(set.event);
    set.residuals.cosmological = residual(set.cosmological);
    if (set.cauchy) set.residuals.cauchy = residual(*set.cauchy);
    set.residuals.negative = std::isnan(set.negative_root) ? 0.0 : residual(set.negative_root);

    for (double r : set.real_roots) {
        if (residual(r) > horizon_residual_tolerance(p, r)) {
            std::ostringstream msg;
            msg << "root r = " << r << " has residual " << residual(r) << " above tolerance";
            throw RegimeError(msg.str());
        }
    }
    return set;
}

bool RegimeReport::ok() const noexcept {
    return mass_positive && spin_positive && lambda_positive && horizons_found &&
           horizons_distinct && lambda_formula_applicable;
}

RegimeReport validate_regime(const SpacetimeParams& p) {
    RegimeReport report;
    report.mass_positive = p.mass() > 0.0;
    report.spin_positive = p.spin() > 0.0;
    report.charge_positive = p.charge() > 0.0;
    report.lambda_positive = p.cosmological_constant() > 0.0;
    report.lambda_formula_applicable = report.spin_positive;

    if (!report.spin_positive) report.flags.emplace_back("lambda-formula-inapplicable: a=0");
    if (!report.charge_positive) report.flags.emplace_back("uncharged: Q=0 (Kerr-de Sitter)");

    try {
        const HorizonSet h = find_horizons(p);
        report.horizons_found = true;
        report.horizons_distinct = true;
        report.degeneracy_margin = (h.cosmological - h.event) / h.cosmological;
    } catch (const RegimeError& e) {
        const std::string what = e.what();
        if (what.find("coincide") != std::string::npos) {
            report.horizons_found = true;
            report.flags.emplace_back("degenerate-horizons: r_e = r_c");
        } else {
            report.flags.emplace_back(std::string("no-horizon-pair: ") + what);
        }
    }
    return report;
}

}  // namespace knds

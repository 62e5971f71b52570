#include "knds/sl_spectrum.hpp"

#include "knds/errors.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

namespace knds {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kZeroModeCut = 1e-8;
constexpr double kClusterTolerance = 1e-6;
constexpr int kMinTraceEigenvalues = 20;

struct Coefficients {
    double xi;
    double b2;
    int k;

    [[nodiscard]] double ratio(double sigma) const { return (1.0 - xi * sigma) / (1.0 - b2 * sigma); }

    // Q / W for the substituted problem; exact k(k + 1) on the round sphere.
    [[nodiscard]] double potential(double theta) const {
        if (k == 0) return 0.0;
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double sigma = s * s;
        const double dk = k;
        const double r = ratio(sigma);
        const double db = 1.0 - b2 * sigma;
        const double dx = 1.0 - xi * sigma;
        const double drift = -2.0 * dk * c * c * (b2 - xi) / (db * db);
        const double centrifugal = dk * dk * ((xi - b2) * (2.0 - (xi + b2) * sigma) / (dx * db) + r);
        return dk * r + drift + centrifugal;
    }
};

std::vector<double> lowest_eigenvalues(std::vector<double> diagonal, std::vector<double> off_diagonal,
                                       int count) {
    const auto n = static_cast<lapack_int>(diagonal.size());
    if (count > n) throw DomainError("requested more eigenvalues than grid cells");
    off_diagonal.resize(diagonal.size());
    std::vector<double> w(diagonal.size());
    std::vector<lapack_int> support(2 * diagonal.size());
    lapack_int found = 0;
    double dummy_z = 0.0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', n, diagonal.data(), off_diagonal.data(), 0.0, 0.0,
                       1, count, abstol, &found, w.data(), &dummy_z, 1, support.data());
    if (info != 0 || found != count) {
        std::ostringstream msg;
        msg << "tridiagonal eigensolver failed (info = " << info << ", found " << found << " of "
            << count << ")";
        throw ConvergenceError(msg.str());
    }
    w.resize(static_cast<std::size_t>(count));
    return w;
}

double fit_tail(std::span<const double> values, int first_degree, std::size_t window,
                double& a_out, double& b_out) {
    const std::size_t n = values.size();
    const std::size_t start = n - window;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        const double degree = first_degree + static_cast<double>(i);
        const double y = values[i] / degree;
        sx += degree;
        sy += y;
        sxx += degree * degree;
        sxy += degree * y;
    }
    const auto m = static_cast<double>(window);
    const double a = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double b = (sy - a * sx) / m;
    if (!(a > 0.0)) {
        std::ostringstream msg;
        msg << "Weyl fit has non-positive leading coefficient A = " << a;
        throw TailModelError(msg.str());
    }
    const double last = first_degree + static_cast<double>(n - 1);
    const double shift = b / a;
    if (!(last + 1.0 + shift > 0.0)) throw TailModelError("Weyl fit has a pole beyond the computed spectrum");
    a_out = a;
    b_out = b;
    if (std::abs(shift) < 1e-10) return boost::math::trigamma(last + 1.0) / a;
    return (boost::math::digamma(last + 1.0 + shift) - boost::math::digamma(last + 1.0)) / b;
}

std::vector<EigenvalueEstimates> parallel_eigenvalues(const MetricProfile& profile,
                                                      std::span<const int> ks, int grid_size,
                                                      int count) {
    std::vector<std::future<EigenvalueEstimates>> jobs;
    jobs.reserve(ks.size());
    for (int k : ks) {
        jobs.push_back(std::async(std::launch::async, [profile, k, grid_size, count] {
            return eigenvalues(assemble_operator(OperatorSpec{profile, k, grid_size, 1.0}), count);
        }));
    }
    std::vector<EigenvalueEstimates> out;
    out.reserve(ks.size());
    for (auto& job : jobs) out.push_back(job.get());
    return out;
}

}  // namespace

DiscreteOperator assemble_operator(const OperatorSpec& spec) {
    if (spec.grid_size < kMinGridSize) {
        std::ostringstream msg;
        msg << "grid_size " << spec.grid_size << " is below the minimum " << kMinGridSize;
        throw DomainError(msg.str());
    }
    if (!(std::isfinite(spec.homothety) && spec.homothety > 0.0)) {
        throw DomainError("homothety factor must be positive");
    }
    const MetricProfile profile = MetricProfile::make(spec.profile.xi, spec.profile.beta_sq);
    const int n = spec.grid_size;
    const int k = std::abs(spec.k);
    const Coefficients coeff{profile.xi, profile.beta_sq, k};
    const double h = std::numbers::pi / n;
    const double inv_h2 = 1.0 / (h * h);
    const double power = k + 0.5;

    std::vector<double> s_cell(n);
    for (int i = 0; i < n; ++i) s_cell[i] = std::sin((i + 0.5) * h);

    // Interior faces i + 1/2 between cells i and i + 1; the pole faces carry
    // zero flux.
    std::vector<double> s_face(n - 1), r_face(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        s_face[i] = std::sin((i + 1) * h);
        r_face[i] = coeff.ratio(s_face[i] * s_face[i]);
    }

    DiscreteOperator op;
    op.spec = spec;
    op.diagonal.assign(n, 0.0);
    op.off_diagonal.assign(n - 1, 0.0);

    for (int i = 0; i < n; ++i) {
        // P_face / W_i = R_face (s_face / s_i)^(2k+1)
        double flux = 0.0;
        if (i > 0) flux += r_face[i - 1] * std::pow(s_face[i - 1] / s_cell[i], 2.0 * power);
        if (i + 1 < n) flux += r_face[i] * std::pow(s_face[i] / s_cell[i], 2.0 * power);
        op.diagonal[i] = flux * inv_h2 + coeff.potential((i + 0.5) * h);
    }
    for (int i = 0; i + 1 < n; ++i) {
        // P_face / sqrt(W_i W_{i+1}), evaluated from each neighbour's side.
        const double upper = r_face[i] * std::pow(s_face[i] / s_cell[i], power) *
                             std::pow(s_face[i] / s_cell[i + 1], power);
        const double lower = r_face[i] * std::pow(s_face[i] / s_cell[i + 1], power) *
                             std::pow(s_face[i] / s_cell[i], power);
        if (std::abs(upper - lower) > kSymmetryTolerance * std::max(std::abs(upper), std::abs(lower))) {
            throw DiscretizationError("assembled operator is not symmetric");
        }
        op.off_diagonal[i] = -0.5 * (upper + lower) * inv_h2;
    }

    for (double v : op.diagonal) {
        if (!std::isfinite(v)) throw DiscretizationError("non-finite diagonal entry");
    }
    for (double v : op.off_diagonal) {
        if (!std::isfinite(v)) throw DiscretizationError("non-finite off-diagonal entry");
    }
    return op;
}

EigenvalueEstimates eigenvalues(const DiscreteOperator& op, int count, double tolerance) {
    const int n = op.spec.grid_size;
    if (count < 1) throw DomainError("eigenvalue count must be positive");
    if (count > n / 4) {
        std::ostringstream msg;
        msg << "count " << count << " exceeds the trusted quarter of grid " << n;
        throw DomainError(msg.str());
    }
    const bool invariant = op.spec.k == 0;
    const int wanted = count + (invariant ? 1 : 0);

    OperatorSpec fine_spec = op.spec;
    fine_spec.grid_size = 2 * n;
    const DiscreteOperator fine_op = assemble_operator(fine_spec);

    std::vector<double> coarse = lowest_eigenvalues(op.diagonal, op.off_diagonal, wanted);
    std::vector<double> fine = lowest_eigenvalues(fine_op.diagonal, fine_op.off_diagonal, wanted);

    if (invariant) {
        for (const auto* list : {&coarse, &fine}) {
            if (!(std::abs((*list)[0]) < kZeroModeCut * (*list)[1])) {
                throw DiscretizationError("k = 0 operator has no constant null mode");
            }
        }
        coarse.erase(coarse.begin());
        fine.erase(fine.begin());
    }

    EigenvalueEstimates out;
    out.k = op.spec.k;
    out.grid_size = n;
    out.values.reserve(count);
    out.errors.reserve(count);
    for (int j = 0; j < count; ++j) {
        const double change = std::abs(fine[j] - coarse[j]);
        if (!(fine[j] > 0.0) || change > tolerance * fine[j]) {
            std::ostringstream msg;
            msg << "eigenvalue " << j + 1 << " of L_" << op.spec.k << " moved by " << change
                << " under grid doubling (value " << fine[j] << ", tolerance " << tolerance << ")";
            throw ConvergenceError(msg.str());
        }
        out.values.push_back((4.0 * fine[j] - coarse[j]) / 3.0);
        out.errors.push_back(change / 3.0);
    }
    return out;
}

SpectrumResult trace_estimate(const EigenvalueEstimates& eigs, double homothety) {
    if (!(homothety > 0.0)) throw DomainError("homothety factor must be positive");
    const std::size_t n = eigs.values.size();
    if (n < static_cast<std::size_t>(kMinTraceEigenvalues)) {
        throw TailModelError("trace estimate needs at least 20 converged eigenvalues");
    }
    if (!eigs.errors.empty() && eigs.errors.size() != n) {
        throw DomainError("eigenvalue and error lists differ in length");
    }
    const int first_degree = eigs.k == 0 ? 1 : std::abs(eigs.k);

    double partial = 0.0;
    double propagated = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = eigs.values[j];
        if (!(v > 0.0)) throw DomainError("trace estimate needs positive eigenvalues");
        partial += 1.0 / v;
        if (!eigs.errors.empty()) propagated += eigs.errors[j] / (v * v);
    }

    SpectrumResult result;
    const double tail_third = fit_tail(eigs.values, first_degree, n / 3, result.weyl_a, result.weyl_b);
    double a_half = 0.0, b_half = 0.0;
    const double tail_half = fit_tail(eigs.values, first_degree, n / 2, a_half, b_half);

    result.k = eigs.k;
    result.count_converged = static_cast<int>(n);
    result.eigenvalues.reserve(n);
    result.error_estimates.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        result.eigenvalues.push_back(eigs.values[j] / homothety);
        result.error_estimates.push_back(eigs.errors.empty() ? 0.0 : eigs.errors[j] / homothety);
    }
    result.trace_partial = homothety * partial;
    result.trace_tail_estimate = homothety * tail_third;
    result.trace_total = result.trace_partial + result.trace_tail_estimate;
    result.error_bound = homothety * (std::abs(tail_third - tail_half) + propagated);
    return result;
}

SpectrumResult trace_estimate(std::span<const double> eigs, int k, double homothety) {
    EigenvalueEstimates e;
    e.k = k;
    e.values.assign(eigs.begin(), eigs.end());
    return trace_estimate(e, homothety);
}

SpectrumResult compute_spectrum(const OperatorSpec& spec, int count) {
    return trace_estimate(eigenvalues(assemble_operator(spec), count), spec.homothety);
}

std::vector<SpectrumResult> compute_spectra(const MetricProfile& profile, std::span<const int> ks,
                                            int grid_size, int count, double homothety) {
    std::vector<std::future<SpectrumResult>> jobs;
    jobs.reserve(ks.size());
    for (int k : ks) {
        jobs.push_back(std::async(std::launch::async, [=] {
            return compute_spectrum(OperatorSpec{profile, k, grid_size, homothety}, count);
        }));
    }
    std::vector<SpectrumResult> out;
    out.reserve(ks.size());
    for (auto& job : jobs) out.push_back(job.get());
    return out;
}

FullSpectrum assemble_full_spectrum(const MetricProfile& profile, int k_max, int count_per_k,
                                    int grid_size) {
    if (k_max < 0) throw DomainError("k_max must be nonnegative");
    std::vector<int> ks(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) ks[k] = k;
    const std::vector<EigenvalueEstimates> per_mode =
        parallel_eigenvalues(profile, ks, grid_size, count_per_k);

    FullSpectrum full;
    full.complete_below = std::numeric_limits<double>::infinity();
    if (k_max >= 1) {
        const int next = k_max + 1;
        const double first_next =
            eigenvalues(assemble_operator(OperatorSpec{profile, next, grid_size, 1.0}), 1).values.front();
        full.complete_below = first_next * (1.0 - kClusterTolerance);
    }

    std::vector<std::pair<double, int>> entries;
    for (const auto& mode : per_mode) {
        full.complete_below = std::min(full.complete_below, mode.values.back());
        for (double v : mode.values) entries.emplace_back(v, mode.k);
    }
    std::sort(entries.begin(), entries.end());

    for (const auto& [value, k] : entries) {
        if (!full.levels.empty()) {
            SpectralLevel& last = full.levels.back();
            if (std::abs(value - last.value) < kClusterTolerance * value) {
                last.multiplicity += k == 0 ? 1 : 2;
                last.modes.push_back(k);
                continue;
            }
        }
        full.levels.push_back(SpectralLevel{value, k == 0 ? 1 : 2, {k}});
    }
    return full;
}

TraceSet spectral_traces(const SpacetimeParams& params, int k_max, int grid_size, int count) {
    if (k_max < 1) throw DomainError("k_max must be at least 1");
    const HorizonSet horizons = find_horizons(params);
    std::vector<int> ks(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) ks[k] = k;

    auto horizon_traces = [&](double r0) {
        const HorizonGeometry g = derive_geometry(params, r0);
        const std::vector<SpectrumResult> spectra =
            compute_spectra(g.profile(), ks, grid_size, count, g.homothety());
        HorizonTraces t;
        t.gamma0 = spectra.front().trace_total;
        for (int k = 1; k <= k_max; ++k) t.gammak[k] = spectra[k].trace_total;
        return t;
    };

    TraceSet set;
    set.event = horizon_traces(horizons.event);
    set.cosmological = horizon_traces(horizons.cosmological);
    set.provenance = TraceProvenance::numerical_spectrum;
    if (params.spin() == 0.0) set.flags.emplace_back("inverse-not-applicable: a=0");
    return set;
}

}  // namespace knds

#pragma once

#include "knds/horizon_geometry.hpp"
#include "knds/trace_forms.hpp"

#include <span>
#include <vector>

namespace knds {

inline constexpr int kMinGridSize = 64;

/// One Fourier mode L_k = -(f u')' + k^2/f u of a normalized profile.
struct OperatorSpec {
    MetricProfile profile;
    int k = 0;
    int grid_size = 2048;
    /// eta^2 (1 - xi); eigenvalues of the physical metric are the normalized
    /// ones divided by this factor.
    double homothety = 1.0;
};

/// Symmetric tridiagonal discretization of L_k on a cell-centred uniform grid
/// in theta (x = -cos theta). For k != 0 the unknown is v = u / sin^|k| theta,
/// which carries the regular behaviour of eigenfunctions at the poles; for
/// k = 0 the flux vanishes at the poles so constants are an exact null vector.
struct DiscreteOperator {
    OperatorSpec spec;
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;
};

/// Throws DomainError if grid_size < kMinGridSize, DiscretizationError if the
/// assembled matrix is not finite or not symmetric to 1e-12.
[[nodiscard]] DiscreteOperator assemble_operator(const OperatorSpec& spec);

/// Lowest eigenvalues of a normalized operator (no homothety applied).
struct EigenvalueEstimates {
    int k = 0;
    std::vector<double> values;
    /// Estimated discretization error of each entry of `values`.
    std::vector<double> errors;
    int grid_size = 0;
};

/// The `count` lowest positive eigenvalues of L_k.
///
/// The operator is also solved on the doubled grid and the two results
/// Richardson-extrapolated (second-order scheme). Each error estimate is
/// |lambda_2N - lambda_N| / 3, the predicted error of the fine-grid value,
/// which bounds the extrapolated one. For k = 0 the constant mode is dropped.
///
/// Requires count <= grid_size / 4. Throws ConvergenceError when doubling the
/// grid moves any requested eigenvalue by more than `tolerance` (relative).
[[nodiscard]] EigenvalueEstimates eigenvalues(const DiscreteOperator& op, int count,
                                              double tolerance = 0.1);

struct SpectrumResult {
    int k = 0;
    /// Ascending, homothety applied, zero mode excluded.
    std::vector<double> eigenvalues;
    std::vector<double> error_estimates;
    int count_converged = 0;
    double trace_partial = 0.0;
    double trace_tail_estimate = 0.0;
    double trace_total = 0.0;
    double error_bound = 0.0;
    /// Weyl fit lambda ~ A n^2 + B n over the last third of the normalized
    /// eigenvalues, n the spherical degree.
    double weyl_a = 0.0;
    double weyl_b = 0.0;
};

/// Trace sum_j 1/lambda_j: explicit partial sum plus a Weyl-law tail.
///
/// Eigenvalues are indexed by spherical degree n (n = j for k = 0 and
/// n = j + |k| - 1 otherwise). lambda_n ~ A n^2 + B n is fitted by least
/// squares over the last third of the values and the tail
/// sum_{n > N} 1/(A n^2 + B n) = [psi(N + 1 + B/A) - psi(N + 1)] / B is added.
/// error_bound is the change of the tail when fitting over the last half,
/// plus the propagated eigenvalue errors sum_j e_j / lambda_j^2.
///
/// Needs at least 20 eigenvalues. Throws TailModelError when A <= 0.
[[nodiscard]] SpectrumResult trace_estimate(const EigenvalueEstimates& eigs, double homothety);

/// Overload for a bare eigenvalue list (errors taken as zero).
[[nodiscard]] SpectrumResult trace_estimate(std::span<const double> eigs, int k, double homothety);

/// assemble_operator -> eigenvalues -> trace_estimate.
[[nodiscard]] SpectrumResult compute_spectrum(const OperatorSpec& spec, int count);

/// compute_spectrum for each mode in `ks`, evaluated concurrently; results are
/// returned in the order of `ks`.
[[nodiscard]] std::vector<SpectrumResult> compute_spectra(const MetricProfile& profile,
                                                          std::span<const int> ks, int grid_size,
                                                          int count, double homothety = 1.0);

struct SpectralLevel {
    double value = 0.0;
    int multiplicity = 0;
    /// Modes k >= 0 contributing to this level.
    std::vector<int> modes;
};

struct FullSpectrum {
    /// Distinct positive eigenvalues of the normalized metric, ascending.
    std::vector<SpectralLevel> levels;
    /// Levels below this value are complete: every mode that can contribute
    /// was computed. Bounded by the first eigenvalue of mode k_max + 1 and by
    /// the largest eigenvalue computed for each k <= k_max.
    double complete_below = 0.0;
};

/// Union of Spec L_k over |k| <= k_max with multiplicities: 1 for k = 0 and 2
/// for k != 0 (W_k = W_-k). Eigenvalues closer than 1e-6 relative merge.
[[nodiscard]] FullSpectrum assemble_full_spectrum(const MetricProfile& profile, int k_max,
                                                  int count_per_k, int grid_size = 2048);

/// Traces gamma_0 and gamma_k (k = 1..k_max) of both horizons computed from
/// the numerical spectra (provenance numerical_spectrum).
[[nodiscard]] TraceSet spectral_traces(const SpacetimeParams& params, int k_max, int grid_size,
                                       int count);

}  // namespace knds

#pragma once

#include <functional>

namespace knds {

/// Adaptive Gauss-Kronrod integral of `f` over [a, b]. Never samples the
/// endpoints, so integrands with removable endpoint singularities are fine.
/// Throws QuadratureFailure when the error estimate exceeds
/// `rel_tol` times the L1 norm of the integrand.
[[nodiscard]] double integrate(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-10);

}  // namespace knds

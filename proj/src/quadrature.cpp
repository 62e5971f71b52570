#include "knds/quadrature.hpp"

#include "knds/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace knds {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    constexpr unsigned kMaxDepth = 20;
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, kMaxDepth, rel_tol, &error, &l1);
    if (!std::isfinite(value) || error > rel_tol * l1) {
        std::ostringstream msg;
        msg << "quadrature on [" << a << ", " << b << "] reached error estimate " << error
            << " against tolerance " << rel_tol * l1;
        throw QuadratureFailure(msg.str());
    }
    return value;
}

}  // namespace knds

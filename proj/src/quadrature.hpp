#pragma once
// Thin wrappers over Boost.Math quadrature that raise NumericError when the
// requested tolerance is not reached.

#include <functional>

namespace rgdist::detail {

/// Double-exponential (tanh-sinh) rule on [a, b]; tolerates integrable
/// endpoint singularities.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12);

/// Adaptive Gauss-Kronrod (61-point) on [a, b].
double integrate_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-12);

/// ∫ |f| over [a, b] where f is continuous on the open interval. Sign changes
/// are located on a probe grid and refined by bisection, and each sign-stable
/// piece is integrated with the tanh-sinh rule.
double integrate_abs(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12);

}  // namespace rgdist::detail

#include "quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "rgdist/capacities.hpp"

namespace rgdist::detail {
namespace {

// Absolute floor below which an error estimate is never a failure.
constexpr double kAbsFloor = 1e-13;

void check(double error, double l1, double rel_tol, const char* what) {
  if (!std::isfinite(error) || error > std::max(100.0 * rel_tol * l1, kAbsFloor)) {
    throw NumericError(std::string(what) + ": quadrature did not converge (error estimate " +
                           std::to_string(error) + ")",
                       error);
  }
}

}  // namespace

double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double rel_tol) {
  if (!(b > a)) return 0.0;
  // integrate() over a finite range is non-const (levels are added lazily).
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double error = 0.0;
  double l1 = 0.0;
  const double v = rule.integrate(f, a, b, rel_tol, &error, &l1);
  check(error, l1, rel_tol, "tanh-sinh");
  return v;
}

double integrate_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &error,
                                                                    &l1);
  check(error, l1, rel_tol, "gauss-kronrod");
  return v;
}

double integrate_abs(const std::function<double(double)>& f, double a, double b,
                     double rel_tol) {
  if (!(b > a)) return 0.0;
  constexpr int kProbes = 256;
  std::vector<double> cuts{a};
  // Probe strictly inside (a, b); the endpoints may be singular.
  double prev_x = a + (b - a) * 0.5 / kProbes;
  double prev_v = f(prev_x);
  for (int k = 1; k < kProbes; ++k) {
    const double x = a + (b - a) * (k + 0.5) / kProbes;
    const double v = f(x);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      double lo = prev_x;
      double hi = x;
      const bool lo_neg = prev_v < 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == lo_neg)
          lo = mid;
        else
          hi = mid;
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_v = v;
  }
  cuts.push_back(b);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate_tanh_sinh([&](double x) { return std::abs(f(x)); }, cuts[i], cuts[i + 1],
                                 rel_tol);
  }
  return total;
}

}  // namespace rgdist::detail

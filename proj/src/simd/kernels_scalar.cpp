#include "rgdist/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "log_space_pmf.hpp"

namespace rgdist::simd {

double kernel_value(KernelKind kind, double x) noexcept {
  switch (kind) {
    case KernelKind::poissonian:
      return -std::expm1(-x);
    case KernelKind::expected_degree:
      return std::min(x, 1.0);
    case KernelKind::generalized:
      return x / (1.0 + x);
  }
  return 0.0;
}

namespace scalar {

SumPair sum_and_sum_sq(std::span<const double> x) {
  SumPair r;
  for (double v : x) {
    r.sum += v;
    r.sum_sq += v * v;
  }
  return r;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("abs_diff_sum: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

void poisson_mixture_accumulate(std::span<const double> rates, std::span<double> f_acc,
                                std::span<double> lf_acc) {
  if (f_acc.size() != lf_acc.size())
    throw std::invalid_argument("poisson_mixture_accumulate: accumulator size mismatch");
  const std::size_t len = f_acc.size();
  for (double rate : rates) {
    if (rate > kLogSpaceRate) {
      detail::accumulate_log_space(rate, f_acc, lf_acc);
      continue;
    }
    double term = std::exp(-rate);
    for (std::size_t n = 0; n < len; ++n) {
      f_acc[n] += term;
      lf_acc[n] += rate * term;
      term = term * rate / static_cast<double>(n + 1);
    }
  }
}

double kernel_row_sum(KernelKind kind, double scale, std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += kernel_value(kind, scale * v);
  return s;
}

double kernel_gap_ratio_max(KernelKind a, KernelKind b, double scale, std::span<const double> w) {
  double best = 0.0;
  for (double v : w) {
    const double x = scale * v;
    const double r = std::abs(kernel_value(a, x) - kernel_value(b, x)) / (x * x);
    best = std::max(best, r);
  }
  return best;
}

void exp_values(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]);
}

}  // namespace scalar
}  // namespace rgdist::simd

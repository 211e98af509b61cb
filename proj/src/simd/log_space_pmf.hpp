#pragma once

#include <cmath>
#include <span>

namespace rgdist::simd::detail {

// Poisson pmf for rates whose e^{-rate} underflows; shared by both backends.
inline void accumulate_log_space(double rate, std::span<double> f_acc, std::span<double> lf_acc) {
  const double log_rate = std::log(rate);
  for (std::size_t n = 0; n < f_acc.size(); ++n) {
    const double nn = static_cast<double>(n);
    const double term = std::exp(nn * log_rate - rate - std::lgamma(nn + 1.0));
    f_acc[n] += term;
    lf_acc[n] += rate * term;
  }
}

}  // namespace rgdist::simd::detail

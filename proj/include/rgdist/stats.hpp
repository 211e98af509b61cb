#pragma once
// Small statistical helpers shared by the Monte Carlo routines.

#include <cstdint>
#include <span>
#include <vector>

namespace rgdist {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error (n - 1 denominator).
Estimate mean_se(std::span<const double> x);

/// Ratio Σa_g / Σn_g with a cluster-robust standard error.
Estimate clustered_ratio(std::span<const double> a, std::span<const double> n);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;  // after pooling
};

/// Two-sample chi-square homogeneity test on count histograms over the same
/// categories (a[k], b[k] = observations of value k). Adjacent categories are
/// pooled from the left until each pooled column has expected count at least
/// `min_expected` in both rows.
ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> a,
                                       std::span<const std::uint64_t> b,
                                       double min_expected = 5.0);

/// Histogram of non-negative integer observations.
std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> values);

}  // namespace rgdist

#include "rgdist/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

namespace rgdist {

Estimate mean_se(std::span<const double> x) {
  if (x.empty()) throw std::domain_error("mean_se: empty sample");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  if (x.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate clustered_ratio(std::span<const double> a, std::span<const double> n) {
  if (a.size() != n.size() || a.empty())
    throw std::invalid_argument("clustered_ratio: spans must be non-empty and equal length");
  double sa = 0.0;
  double sn = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    sa += a[g];
    sn += n[g];
  }
  if (!(sn > 0.0)) throw std::domain_error("clustered_ratio: zero denominator");
  const double p = sa / sn;
  if (a.size() < 2) return {p, 0.0};
  double acc = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    const double r = a[g] - p * n[g];
    acc += r * r;
  }
  const double gcount = static_cast<double>(a.size());
  return {p, std::sqrt(gcount / (gcount - 1.0) * acc) / sn};
}

ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> a,
                                       std::span<const std::uint64_t> b, double min_expected) {
  const std::size_t len = std::max(a.size(), b.size());
  double na = 0.0;
  double nb = 0.0;
  for (auto v : a) na += static_cast<double>(v);
  for (auto v : b) nb += static_cast<double>(v);
  if (na == 0.0 || nb == 0.0) throw std::domain_error("chi_square_homogeneity: empty sample");
  const double total = na + nb;
  const double row_min = std::min(na, nb) / total;

  // Pool from the left until the smaller row's expected count is large
  // enough; a short remainder joins the last pooled bin.
  std::vector<std::pair<double, double>> bins;
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    ca += k < a.size() ? static_cast<double>(a[k]) : 0.0;
    cb += k < b.size() ? static_cast<double>(b[k]) : 0.0;
    if ((ca + cb) * row_min >= min_expected) {
      bins.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(ca, cb);
    } else {
      bins.back().first += ca;
      bins.back().second += cb;
    }
  }

  ChiSquareResult r;
  r.bins = bins.size();
  if (bins.size() < 2) return r;
  for (const auto& [x, y] : bins) {
    const double col = x + y;
    const double ea = col * na / total;
    const double eb = col * nb / total;
    r.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  r.dof = static_cast<int>(bins.size()) - 1;
  const boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> h;
  for (auto v : values) {
    if (h.size() <= v) h.resize(v + 1, 0);
    ++h[v];
  }
  return h;
}

}  // namespace rgdist

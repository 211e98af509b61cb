#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rgdist/simd/kernels.hpp"

using namespace rgdist::simd;

namespace {

constexpr KernelKind kKinds[] = {KernelKind::poissonian, KernelKind::expected_degree,
                                 KernelKind::generalized};

std::vector<double> log_uniform(std::mt19937_64& g, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> v(n);
  for (auto& x : v) x = std::exp(u(g));
  return v;
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("scalar kernel values") {
  CHECK(kernel_value(KernelKind::poissonian, 0.0) == 0.0);
  CHECK(kernel_value(KernelKind::expected_degree, 2.0) == 1.0);
  CHECK(kernel_value(KernelKind::generalized, 1.0) == 0.5);
  CHECK(kernel_value(KernelKind::poissonian, 1e-12) == doctest::Approx(1e-12).epsilon(1e-11));
}

TEST_CASE("backend selection") {
  const Backend before = active_backend();
  CHECK(backend_available(Backend::scalar));
  set_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  if (backend_available(Backend::avx2)) {
    set_backend(Backend::avx2);
    CHECK(active_backend() == Backend::avx2);
  } else {
    CHECK_THROWS_AS(set_backend(Backend::avx2), std::invalid_argument);
  }
  set_backend(before);
  CHECK(backend_name(Backend::avx2) == "avx2");
}

#if defined(RGDIST_HAVE_AVX2)

TEST_CASE("avx2 kernels match scalar references") {
  if (!backend_available(Backend::avx2)) {
    MESSAGE("CPU lacks AVX2/FMA; equivalence test skipped");
    return;
  }
  std::mt19937_64 g(11);

  SUBCASE("exp") {
    std::vector<double> x;
    for (double v = -745.0; v <= 709.0; v += 0.0137) x.push_back(v);
    for (double v : {-1e-300, 0.0, 1e-300, 0.5, -0.5, 709.7, -708.3}) x.push_back(v);
    std::vector<double> a(x.size());
    std::vector<double> b(x.size());
    avx2::exp_values(x, a);
    scalar::exp_values(x, b);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < -708.0) {
        CHECK(a[i] <= 1e-300);
      } else {
        CHECK(rel_close(a[i], b[i], 4e-15));
      }
    }
  }

  SUBCASE("sums") {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
      const auto x = log_uniform(g, n, 1e-3, 1e3);
      const auto y = log_uniform(g, n, 1e-3, 1e3);
      const auto sa = avx2::sum_and_sum_sq(x);
      const auto sb = scalar::sum_and_sum_sq(x);
      CHECK(rel_close(sa.sum, sb.sum, 1e-13));
      CHECK(rel_close(sa.sum_sq, sb.sum_sq, 1e-13));
      CHECK(rel_close(avx2::abs_diff_sum(x, y), scalar::abs_diff_sum(x, y), 1e-13));
    }
  }

  SUBCASE("poisson mixture") {
    auto rates = log_uniform(g, 1003, 1e-4, 80.0);
    rates.push_back(650.0);  // log-space path
    rates.push_back(600.0);
    const std::size_t len = 1000;
    std::vector<double> fa(len, 0.0), la(len, 0.0), fb(len, 0.0), lb(len, 0.0);
    avx2::poisson_mixture_accumulate(rates, fa, la);
    scalar::poisson_mixture_accumulate(rates, fb, lb);
    double mass = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
      // Entries far below the peak mass are compared absolutely.
      CHECK(std::abs(fa[n] - fb[n]) <= 1e-12 * std::max(fb[n], 1e-3));
      CHECK(std::abs(la[n] - lb[n]) <= 1e-12 * std::max(lb[n], 1e-3));
      mass += fb[n];
    }
    CHECK(mass == doctest::Approx(static_cast<double>(rates.size())).epsilon(1e-12));
  }

  SUBCASE("connection kernels") {
    const auto w = log_uniform(g, 2051, 1e-6, 1e3);
    for (double scale : {1e-9, 1e-4, 0.01, 1.0}) {
      for (auto k : kKinds) {
        CHECK(rel_close(avx2::kernel_row_sum(k, scale, w), scalar::kernel_row_sum(k, scale, w),
                        1e-13));
      }
    }
    // The gap ratio divides an O(x^2) difference by x^2, so rounding in h is
    // amplified by 1/x; keep x >= 1e-6.
    const auto wg = log_uniform(g, 2051, 1e-2, 1e3);
    for (double scale : {1e-4, 0.01, 1.0}) {
      for (auto k : kKinds)
        for (auto k2 : kKinds) {
          const double a = avx2::kernel_gap_ratio_max(k, k2, scale, wg);
          const double b = scalar::kernel_gap_ratio_max(k, k2, scale, wg);
          CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, b));
        }
    }
  }
}

#endif

// AVX2/FMA variants of the kernels in kernels_scalar.cpp. This translation
// unit is the only one compiled with -mavx2 -mfma; nothing here may run
// unless dispatch.cpp has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "log_space_pmf.hpp"
#include "rgdist/simd/kernels.hpp"

namespace rgdist::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  alignas(32) std::array<double, kLanes> tmp{};
  _mm256_store_pd(tmp.data(), v);
  return std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
}

// exp(x) by range reduction x = k ln2 + r, |r| <= ln2/2, and a degree-13
// Taylor polynomial in r; 2^k is assembled directly in the exponent field.
// Inputs below -708 return 0 (std::exp would return a subnormal).
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d k =
      _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr std::array<double, 14> inv_fact = {
      1.0,
      1.0,
      1.0 / 2.0,
      1.0 / 6.0,
      1.0 / 24.0,
      1.0 / 120.0,
      1.0 / 720.0,
      1.0 / 5040.0,
      1.0 / 40320.0,
      1.0 / 362880.0,
      1.0 / 3628800.0,
      1.0 / 39916800.0,
      1.0 / 479001600.0,
      1.0 / 6227020800.0,
  };
  __m256d p = _mm256_set1_pd(inv_fact[13]);
  for (int i = 12; i >= 0; --i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[i]));

  // k + 1.5*2^52 puts the integer k in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i ki =
      _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  const __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, res);
}

// expm1 keeps full relative precision near zero, which the kernel gap ratio
// |h_a(x) - h_b(x)| / x^2 depends on.
inline __m256d expm1_pd(__m256d x) {
  static constexpr int kDegree = 18;
  static constexpr auto inv_fact = [] {
    std::array<double, kDegree + 1> a{};
    a[0] = 1.0;
    for (int i = 1; i <= kDegree; ++i) a[i] = a[i - 1] / i;
    return a;
  }();

  __m256d p = _mm256_set1_pd(inv_fact[kDegree]);
  for (int i = kDegree - 1; i >= 1; --i) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(inv_fact[i]));
  const __m256d series = _mm256_mul_pd(p, x);

  const __m256d viaexp = _mm256_sub_pd(exp_pd(x), _mm256_set1_pd(1.0));
  const __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  const __m256d small = _mm256_cmp_pd(absx, _mm256_set1_pd(0.5), _CMP_LT_OQ);
  return _mm256_blendv_pd(viaexp, series, small);
}

inline __m256d kernel_pd(KernelKind kind, __m256d x) {
  switch (kind) {
    case KernelKind::poissonian:
      return _mm256_sub_pd(_mm256_setzero_pd(),
                           expm1_pd(_mm256_sub_pd(_mm256_setzero_pd(), x)));
    case KernelKind::expected_degree:
      return _mm256_min_pd(x, _mm256_set1_pd(1.0));
    case KernelKind::generalized:
      return _mm256_div_pd(x, _mm256_add_pd(_mm256_set1_pd(1.0), x));
  }
  return _mm256_setzero_pd();
}

// vf and vlf hold kLanes partial sums per n, lane-interleaved.
void mixture_block(const double* rates, std::size_t len, double* vf, double* vlf) {
  const __m256d r = _mm256_loadu_pd(rates);
  __m256d term = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), r));
  for (std::size_t n = 0; n < len; ++n) {
    double* f = vf + n * kLanes;
    double* lf = vlf + n * kLanes;
    _mm256_storeu_pd(f, _mm256_add_pd(_mm256_loadu_pd(f), term));
    _mm256_storeu_pd(lf, _mm256_fmadd_pd(r, term, _mm256_loadu_pd(lf)));
    term = _mm256_div_pd(_mm256_mul_pd(term, r), _mm256_set1_pd(static_cast<double>(n + 1)));
  }
}

}  // namespace

SumPair sum_and_sum_sq(std::span<const double> x) {
  __m256d s = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= x.size(); i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    s = _mm256_add_pd(s, v);
    s2 = _mm256_fmadd_pd(v, v, s2);
  }
  SumPair r{hsum(s), hsum(s2)};
  for (; i < x.size(); ++i) {
    r.sum += x[i];
    r.sum_sq += x[i] * x[i];
  }
  return r;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("abs_diff_sum: size mismatch");
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= a.size(); i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    s = _mm256_add_pd(s, _mm256_andnot_pd(sign, d));
  }
  double r = hsum(s);
  for (; i < a.size(); ++i) r += std::abs(a[i] - b[i]);
  return r;
}

void poisson_mixture_accumulate(std::span<const double> rates, std::span<double> f_acc,
                                std::span<double> lf_acc) {
  if (f_acc.size() != lf_acc.size())
    throw std::invalid_argument("poisson_mixture_accumulate: accumulator size mismatch");
  const std::size_t len = f_acc.size();
  std::vector<double> vf(len * kLanes, 0.0);
  std::vector<double> vlf(len * kLanes, 0.0);

  alignas(32) std::array<double, kLanes> block{};
  std::size_t filled = 0;
  for (double rate : rates) {
    if (rate > kLogSpaceRate) {
      detail::accumulate_log_space(rate, f_acc, lf_acc);
      continue;
    }
    block[filled++] = rate;
    if (filled == kLanes) {
      mixture_block(block.data(), len, vf.data(), vlf.data());
      filled = 0;
    }
  }
  for (std::size_t n = 0; n < len; ++n) {
    f_acc[n] += hsum(_mm256_loadu_pd(vf.data() + n * kLanes));
    lf_acc[n] += hsum(_mm256_loadu_pd(vlf.data() + n * kLanes));
  }
  if (filled > 0) scalar::poisson_mixture_accumulate({block.data(), filled}, f_acc, lf_acc);
}

double kernel_row_sum(KernelKind kind, double scale, std::span<const double> w) {
  const __m256d sc = _mm256_set1_pd(scale);
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= w.size(); i += kLanes) {
    const __m256d x = _mm256_mul_pd(sc, _mm256_loadu_pd(w.data() + i));
    s = _mm256_add_pd(s, kernel_pd(kind, x));
  }
  double r = hsum(s);
  for (; i < w.size(); ++i) r += kernel_value(kind, scale * w[i]);
  return r;
}

double kernel_gap_ratio_max(KernelKind a, KernelKind b, double scale, std::span<const double> w) {
  const __m256d sc = _mm256_set1_pd(scale);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= w.size(); i += kLanes) {
    const __m256d x = _mm256_mul_pd(sc, _mm256_loadu_pd(w.data() + i));
    const __m256d gap = _mm256_andnot_pd(sign, _mm256_sub_pd(kernel_pd(a, x), kernel_pd(b, x)));
    best = _mm256_max_pd(best, _mm256_div_pd(gap, _mm256_mul_pd(x, x)));
  }
  double r = hmax(best);
  for (; i < w.size(); ++i) {
    const double x = scale * w[i];
    r = std::max(r, std::abs(kernel_value(a, x) - kernel_value(b, x)) / (x * x));
  }
  return r;
}

void exp_values(std::span<const double> x, std::span<double> out) {
  std::size_t i = 0;
  for (; i + kLanes <= x.size(); i += kLanes)
    _mm256_storeu_pd(out.data() + i, exp_pd(_mm256_loadu_pd(x.data() + i)));
  for (; i < x.size(); ++i) out[i] = std::exp(x[i]);
}

}  // namespace rgdist::simd::avx2

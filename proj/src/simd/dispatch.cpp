#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rgdist/simd/kernels.hpp"

namespace rgdist::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(RGDIST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("RGDIST_SIMD")) {
    const std::string v = env;
    if (v == "scalar") return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool backend_available(Backend b) noexcept {
  return b == Backend::scalar || cpu_has_avx2();
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b)) +
                                "' is not available on this build/CPU");
  current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

#if defined(RGDIST_HAVE_AVX2)
#define RGDIST_DISPATCH(fn, ...)                                         \
  (active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define RGDIST_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

SumPair sum_and_sum_sq(std::span<const double> x) { return RGDIST_DISPATCH(sum_and_sum_sq, x); }

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  return RGDIST_DISPATCH(abs_diff_sum, a, b);
}

void poisson_mixture_accumulate(std::span<const double> rates, std::span<double> f_acc,
                                std::span<double> lf_acc) {
  RGDIST_DISPATCH(poisson_mixture_accumulate, rates, f_acc, lf_acc);
}

double kernel_row_sum(KernelKind kind, double scale, std::span<const double> w) {
  return RGDIST_DISPATCH(kernel_row_sum, kind, scale, w);
}

double kernel_gap_ratio_max(KernelKind a, KernelKind b, double scale, std::span<const double> w) {
  return RGDIST_DISPATCH(kernel_gap_ratio_max, a, b, scale, w);
}

#undef RGDIST_DISPATCH

}  // namespace rgdist::simd

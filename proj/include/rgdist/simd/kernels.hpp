#pragma once
// Data-parallel inner loops used by the capacity, generator and coupling code.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds
// with AVX2 support, a vectorised variant. The public entry points dispatch
// to the active backend, which is chosen once at startup from CPUID and can
// be overridden with set_backend() or the RGDIST_SIMD environment variable
// ("scalar" or "avx2"). The two variants agree to rounding, not bitwise:
// reductions are accumulated in a different order.

#include <cstddef>
#include <span>
#include <string_view>

namespace rgdist::simd {

enum class Backend { scalar, avx2 };

/// Connection functions with closed forms that have vectorised variants.
enum class KernelKind { poissonian, expected_degree, generalized };

struct SumPair {
  double sum = 0.0;
  double sum_sq = 0.0;
};

bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
/// Throws std::invalid_argument if the backend is not compiled in or the CPU
/// lacks the instructions.
void set_backend(Backend b);
std::string_view backend_name(Backend b) noexcept;

// ---------------------------------------------------------------------------
// Dispatched kernels
// ---------------------------------------------------------------------------

/// (sum x, sum x^2).
SumPair sum_and_sum_sq(std::span<const double> x);

/// sum |a_i - b_i| over the common length (a and b must have equal size).
double abs_diff_sum(std::span<const double> a, std::span<const double> b);

/// Adds the Poisson pmf of every rate to the accumulators:
///   f_acc[n]  += sum_i e^{-l_i} l_i^n / n!
///   lf_acc[n] += sum_i l_i e^{-l_i} l_i^n / n!
/// for n = 0 .. f_acc.size()-1. Both spans must have the same size.
void poisson_mixture_accumulate(std::span<const double> rates, std::span<double> f_acc,
                                std::span<double> lf_acc);

/// sum_j h(scale * w_j) for a closed-form connection function h.
double kernel_row_sum(KernelKind kind, double scale, std::span<const double> w);

/// max_j |h_a(x_j) - h_b(x_j)| / x_j^2 with x_j = scale * w_j (x_j > 0).
double kernel_gap_ratio_max(KernelKind a, KernelKind b, double scale, std::span<const double> w);

/// Scalar closed form of h; the reference for both backends.
double kernel_value(KernelKind kind, double x) noexcept;

// ---------------------------------------------------------------------------
// Backend-specific entry points, exposed for equivalence tests.
// ---------------------------------------------------------------------------

namespace scalar {
SumPair sum_and_sum_sq(std::span<const double> x);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
void poisson_mixture_accumulate(std::span<const double> rates, std::span<double> f_acc,
                                std::span<double> lf_acc);
double kernel_row_sum(KernelKind kind, double scale, std::span<const double> w);
double kernel_gap_ratio_max(KernelKind a, KernelKind b, double scale, std::span<const double> w);
void exp_values(std::span<const double> x, std::span<double> out);
}  // namespace scalar

#if defined(RGDIST_HAVE_AVX2)
namespace avx2 {
SumPair sum_and_sum_sq(std::span<const double> x);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
void poisson_mixture_accumulate(std::span<const double> rates, std::span<double> f_acc,
                                std::span<double> lf_acc);
double kernel_row_sum(KernelKind kind, double scale, std::span<const double> w);
double kernel_gap_ratio_max(KernelKind a, KernelKind b, double scale, std::span<const double> w);
/// Vectorised exp, exposed so its accuracy can be tested against std::exp.
void exp_values(std::span<const double> x, std::span<double> out);
}  // namespace avx2
#endif

/// Rates above this are handled in log space by both backends; e^{-rate}
/// underflows well before the pmf mass does.
inline constexpr double kLogSpaceRate = 600.0;

}  // namespace rgdist::simd

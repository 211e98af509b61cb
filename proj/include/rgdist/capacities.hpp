#pragma once
// Capacity sequences, their mark law and mixed-Poisson offspring laws, and
// the convergence/moment diagnostics for a sequence against its limit.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rgdist/rng.hpp"

namespace rgdist {

/// Raised when a quadrature fails to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Raised when a truncated pmf leaves more tail mass than allowed.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail)
      : std::runtime_error(what), tail_(tail) {}
  double tail_mass() const noexcept { return tail_; }

 private:
  double tail_;
};

/// Law of a positive capacity, described by its survival function
/// F̄(x) = P(Λ > x).
///
///  - pareto(tau, c):  F̄(x) = min(1, c x^{1-tau}); support starts at
///    x_min = c^{1/(tau-1)}.
///  - constant(l):     point mass at l.
///  - table(points):   right-continuous step function through (x_k, F̄(x_k)),
///    i.e. a discrete law with an atom of mass F̄(x_{k-1}) - F̄(x_k) at x_k.
///    The first value must be 1 and the last 0.
class SurvivalModel {
 public:
  struct Pareto {
    double tau;
    double c;
  };
  struct Constant {
    double lambda;
  };
  struct Table {
    std::vector<std::pair<double, double>> points;
  };
  using Variant = std::variant<Pareto, Constant, Table>;

  static SurvivalModel pareto(double tau, double c);
  static SurvivalModel constant(double lambda);
  static SurvivalModel table(std::vector<std::pair<double, double>> points);

  /// The tau = 3.5 power law used for the distance-ladder experiments,
  /// calibrated so that nu = E[Λ^2]/E[Λ] = 2.231381 (support minimum
  /// 0.7437937).
  static SurvivalModel figure1();

  const Variant& variant() const noexcept { return v_; }

  double survival(double x) const noexcept;
  /// inf{ s : F̄(s) <= u } for u in (0, 1]; u = 1 gives the support minimum.
  double inverse_survival(double u) const;

  double mean() const noexcept;
  double second_moment() const noexcept;
  double nu() const noexcept { return second_moment() / mean(); }
  double support_min() const noexcept;

  /// Points of discontinuity (or of the support edge) of F̄, ascending.
  std::vector<double> x_breakpoints() const;
  /// Values of u in (0,1) at which F̄^{-1} jumps, ascending.
  std::vector<double> u_breakpoints() const;

  std::string describe() const;

 private:
  explicit SurvivalModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Vose alias table over indices 0..n-1.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(Engine& g) const noexcept;
  std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Node weights λ_1..λ_N with cached l_N, μ_N and ν_N. Stored 0-based.
class CapacitySequence {
 public:
  explicit CapacitySequence(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double total() const noexcept { return l_; }
  double mean() const noexcept { return mu_; }
  double nu() const noexcept { return nu_; }
  double sum_sq() const noexcept { return sum_sq_; }
  double max() const noexcept { return max_; }

 private:
  std::vector<double> values_;
  double l_ = 0.0;
  double mu_ = 0.0;
  double nu_ = 0.0;
  double sum_sq_ = 0.0;
  double max_ = 0.0;
};

struct Moments {
  double total;  // l_N
  double mean;   // μ_N
  double nu;     // ν_N
};

/// Truncated pmf p_0..p_{n_max} with the mass beyond n_max kept separately.
struct MixedPoissonLaw {
  std::vector<double> pmf;
  double tail_mass = 0.0;

  std::size_t n_max() const noexcept { return pmf.empty() ? 0 : pmf.size() - 1; }
  /// Mean over the retained support.
  double truncated_mean() const noexcept;
  /// Poisson(rate) truncated at n_max, tail computed exactly.
  static MixedPoissonLaw poisson(double rate, std::size_t n_max);
  /// Point mass at k (tail is 0 when k <= n_max).
  static MixedPoissonLaw point_mass(std::size_t k, std::size_t n_max);
};

/// Offspring laws of the first (f) and later (g) generations.
struct OffspringPair {
  MixedPoissonLaw f;
  MixedPoissonLaw g;
};

/// Finite mixing law: value atoms with probabilities.
class MixingLaw {
 public:
  MixingLaw(std::vector<double> atoms, std::vector<double> weights);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Index of an atom drawn with its weight, O(1).
  std::size_t sample(Engine& g) const noexcept { return alias_.sample(g); }
  /// Σ w_i atom_i.
  double mean() const noexcept;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  AliasTable alias_;
};

struct ConditionConfig {
  double tau = 3.5;
  double epsilon = 0.05;
  double mu = 0.0;
  double nu = 0.0;
  MixedPoissonLaw f;
  MixedPoissonLaw g;
  /// Optional bound B for (1/N) Σ λ^{tau-1-eps}; unset means report-only.
  std::optional<double> moment_bound;

  double gamma() const noexcept { return 1.0 / (tau - 1.0) + epsilon; }
  /// Throws std::invalid_argument unless tau > 3, eps > 0 and gamma < 1/2.
  void validate() const;

  /// Limits taken from the model the sequence is built from.
  static ConditionConfig for_model(const SurvivalModel& model, double tau, double epsilon,
                                   std::size_t n_max);
};

struct ConditionReport {
  double mu_gap = 0.0;        // |μ_N - μ|
  double nu_gap = 0.0;        // |ν_N - ν|
  double f_tv = 0.0;          // d_TV(f^N, f)
  double g_tv = 0.0;          // d_TV(g^N, g)
  double moment_stat = 0.0;   // (1/N) Σ λ^{tau-1-eps}
  double max_lambda = 0.0;
  double max_bound = 0.0;     // N^gamma
  bool pass = false;
};

// --- operations -----------------------------------------------------------

double inverse_survival(const SurvivalModel& model, double u);

/// λ_i = F̄^{-1}(i/N), i = 1..N (non-increasing).
CapacitySequence deterministic_capacities(const SurvivalModel& model, std::size_t n);

/// λ_i = F̄^{-1}(U_i) with U_i drawn in index order from the seeded stream.
CapacitySequence iid_capacities(const SurvivalModel& model, std::size_t n, std::uint64_t seed);

/// Throws std::domain_error on an empty span.
Moments moments(std::span<const double> values);
Moments moments(const CapacitySequence& seq);

/// P(M = m) = λ_m / l_N.
MixingLaw mark_law(const CapacitySequence& seq);

/// Smallest n with P(Poi(rate) > n) < tol.
std::size_t adaptive_n_max(double rate, double tol = 1e-10);

inline constexpr double kDefaultTailCeiling = 1e-10;

/// f^N and g^N truncated at n_max. Throws TruncationError when either tail
/// exceeds `ceiling`.
OffspringPair offspring_laws(const CapacitySequence& seq, std::size_t n_max,
                             double ceiling = kDefaultTailCeiling);
/// Same, with n_max chosen from the largest capacity.
OffspringPair offspring_laws(const CapacitySequence& seq);

/// Limit laws f, g of a model, by quadrature (exact sums for discrete models).
/// Tail masses are reported, not bounded.
OffspringPair limit_offspring_laws(const SurvivalModel& model, std::size_t n_max);

/// Θ_g: weights p_i λ_i / Σ p_j λ_j.
MixingLaw size_bias(const MixingLaw& law);

/// ½ Σ |p_j - q_j| over the common support, with both tails as one extra
/// coordinate.
double total_variation(const MixedPoissonLaw& p, const MixedPoissonLaw& q);

ConditionReport check_conditions(const CapacitySequence& seq, const ConditionConfig& cfg,
                                 std::size_t n_max);

/// (1/N) Σ λ_i^q.
double s_nq(const CapacitySequence& seq, double q);

struct QuantileDistance {
  double via_quantiles;  // ∫_0^1 |Ḡ^{-1}(u) - H̄^{-1}(u)| du
  double via_survivals;  // ∫_0^∞ |Ḡ(x) - H̄(x)| dx
};

QuantileDistance integrated_quantile_distance(const SurvivalModel& g, const SurvivalModel& h);

// --- CSV -------------------------------------------------------------------

/// Header `index,lambda`, 1-based index.
void write_capacities_csv(std::ostream& out, const CapacitySequence& seq);
CapacitySequence read_capacities_csv(std::istream& in);

}  // namespace rgdist

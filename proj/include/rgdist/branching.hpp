#pragma once
// Delayed branching process, its martingale limit W and the limit law of
// the hopcount fluctuations; the marked NR-process with thinning and its
// comparison against BFS shells.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rgdist/capacities.hpp"
#include "rgdist/distances.hpp"
#include "rgdist/graphgen.hpp"
#include "rgdist/stats.hpp"

namespace rgdist {

// --- delayed branching process ----------------------------------------------

struct BPTrajectory {
  std::vector<std::uint64_t> sizes;  // Z_0 .. Z_t
  /// Set when the population passed the cap; sizes stop at that generation.
  bool capped = false;
};

inline constexpr std::uint64_t kPopulationCap = 10'000'000;

/// Z_0 = 1, Z_1 ~ f, later generations i.i.d. g offspring. Truncated laws are
/// renormalised over their retained support. Each generation costs
/// O(n_max) regardless of its size (multinomial split over offspring
/// counts).
BPTrajectory simulate_delayed_bp(const MixedPoissonLaw& f, const MixedPoissonLaw& g,
                                 std::size_t t, std::uint64_t seed,
                                 std::uint64_t population_cap = kPopulationCap);

/// Mean of the renormalised truncated law.
double law_mean(const MixedPoissonLaw& p);

/// Smallest t with μ ν^{t-1} >= 1e3.
std::size_t default_w_depth(double mu, double nu);

/// reps samples of Z_t / (μ ν^{t-1}). A trajectory that hits the population
/// cap at generation k contributes Z_k / (μ ν^{k-1}). Throws
/// std::domain_error when ν <= 1 and std::invalid_argument when
/// μ ν^{t-1} < 1e3.
std::vector<double> estimate_W(const MixedPoissonLaw& f, const MixedPoissonLaw& g, std::size_t t,
                               std::size_t reps, std::uint64_t seed, unsigned threads = 1);

/// P(extinction) of the delayed process: G_f(q) with q the smallest fixed
/// point of G_g.
double extinction_probability(const MixedPoissonLaw& f, const MixedPoissonLaw& g);

/// Samples below this count as zero.
inline constexpr double kZeroW = 1e-9;

struct LimitLawConfig {
  double mu = 0.0;
  double nu = 0.0;
  std::vector<double> w_samples;

  double kappa() const noexcept { return mu / (nu - 1.0); }
  /// Fraction of samples above kZeroW.
  double survival_fraction() const noexcept;
  void validate() const;
};

/// P(R_a > j) = E[exp(-κ ν^{a+j} W1 W2) | W1 W2 > 0], averaged over pairs of
/// positive samples (the k-th with the (k + n/2)-th).
Estimate limit_law_survival_se(const LimitLawConfig& cfg, double a, double j);
double limit_law_survival(const LimitLawConfig& cfg, double a, double j);

struct ModelCurvePoint {
  int t = 0;
  double survival = 0.0;
  double se = 0.0;
};

/// P(H_N > t | H_N < ∞) ≈ P(R_{a_N} > t - σ_N) for t in [t_min, t_max].
std::vector<ModelCurvePoint> model_survival_curve(const LimitLawConfig& cfg, double n, int t_min,
                                                  int t_max);

/// Header `replicate,w`.
void write_w_csv(std::ostream& out, const std::vector<double>& w);
/// Header `t,survival_model`.
void write_limit_curve_csv(std::ostream& out, const std::vector<ModelCurvePoint>& curve);

// --- marked NR-process -------------------------------------------------------

struct NRIndividual {
  NodeId mark = 0;
  std::uint32_t parent = 0;  // index in the previous generation
  bool duplicate = false;    // mark seen anywhere earlier in breadth-first order
  bool kept = false;         // survives thinning
  bool thinning_root = false;  // removed while its parent was kept
};

struct NRState {
  std::vector<std::vector<NRIndividual>> generations;  // 0..t
  std::vector<std::uint64_t> z_raw;   // Z̄_k
  std::vector<std::uint64_t> z_thin;  // Z̲_k
  std::vector<double> c_raw;          // capacity of generation k (C̄_{k+1})
  std::vector<double> c_thin;         // C̲_{k+1}
  std::vector<std::uint64_t> dup;     // |Dup_k|, duplicates in generations 1..k
};

struct NROptions {
  std::optional<std::size_t> root;  // uniform when unset
  /// When false, nothing is thinned (a deliberately wrong variant used as a
  /// negative control).
  bool dedup = true;
  std::uint64_t population_cap = kPopulationCap;
};

/// An individual survives thinning iff its parent survives and its mark is
/// not carried by any earlier surviving individual; this reproduces the BFS
/// shells of the Poissonian graph exactly.
NRState simulate_nr(const CapacitySequence& seq, std::size_t t, std::uint64_t seed,
                    const NROptions& opt = {});

struct MarginalTest {
  std::size_t generation = 0;
  ChiSquareResult chi2;
  double mean_nr = 0.0;
  double mean_graph = 0.0;
};

struct ShellComparison {
  std::vector<MarginalTest> marginals;  // generations 1..t
  bool power_warning = false;
  double min_p_value() const noexcept;
};

struct ShellComparisonOptions {
  std::size_t t = 2;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  bool dedup = true;
  unsigned threads = 1;
};

/// Thinned NR generation sizes against BFS shell sizes of independent
/// Poissonian graphs, one chi-square homogeneity test per generation.
ShellComparison shells_vs_thinned_nr(const CapacitySequence& seq,
                                     const ShellComparisonOptions& opt);

/// P(H_N > t) through the product formula over shell capacities. t = 1 is the
/// exact double sum over distinct pairs (se = 0). For t >= 2 each replicate
/// grows the two shell systems alternately on a fresh Poissonian graph,
/// never entering a node owned by the other side, and contributes
/// Π_k exp(-C1 C2 / l_N); this is an unbiased estimator of P(H_N > t).
Estimate survival_via_capacity_formula(const CapacitySequence& seq, std::size_t t,
                                       std::size_t reps, std::uint64_t seed, unsigned threads = 1);

/// Direct estimate of P(H_N > t): BFS between a uniform distinct pair on
/// independent Poissonian graphs.
Estimate survival_via_bfs(const CapacitySequence& seq, std::size_t t, std::size_t reps,
                          std::uint64_t seed, unsigned threads = 1);

struct DuplicateStats {
  std::vector<double> mean_dup;      // k = 1..t
  std::vector<double> se_dup;
  std::vector<double> p_empty;       // P(Dup_k = ∅)
};

DuplicateStats duplicate_stats(const CapacitySequence& seq, std::size_t t, std::size_t reps,
                               std::uint64_t seed, unsigned threads = 1);

}  // namespace rgdist

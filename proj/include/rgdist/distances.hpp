#pragma once
// Graph distances: bidirectional BFS, neighbourhood shells, hopcount
// sampling over graph replicates, and empirical survival curves.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "rgdist/capacities.hpp"
#include "rgdist/graphgen.hpp"

namespace rgdist {

inline constexpr std::uint32_t kInfiniteDistance = std::numeric_limits<std::uint32_t>::max();

enum class DistanceStatus : std::uint8_t {
  finite,
  disconnected,  // the search exhausted a component
  censored,      // distance exceeds the cap
};

struct Distance {
  DistanceStatus status = DistanceStatus::disconnected;
  std::uint32_t hops = kInfiniteDistance;  // kInfiniteDistance unless finite
  std::uint32_t cap = 0;

  bool finite() const noexcept { return status == DistanceStatus::finite; }
  /// Censored and disconnected results exceed every finite t.
  bool exceeds(std::uint32_t t) const noexcept { return !finite() || hops > t; }
  friend bool operator==(const Distance& a, const Distance& b) noexcept {
    return a.status == b.status && a.hops == b.hops;
  }
};

/// Scratch space reused across BFS queries on graphs of the same size.
class BfsWorkspace {
 public:
  explicit BfsWorkspace(std::size_t n = 0) { resize(n); }
  void resize(std::size_t n);

  Distance distance(const SparseGraph& g, std::size_t a1, std::size_t a2, std::uint32_t cap);

 private:
  std::uint32_t next_epoch();

  std::vector<std::uint32_t> seen_[2];
  std::vector<std::uint32_t> depth_[2];
  std::vector<NodeId> frontier_[2];
  std::vector<NodeId> next_;
  std::uint32_t epoch_ = 0;
};

/// Exact distance between distinct nodes (0-based) when it is at most cap.
/// Throws std::domain_error when a1 == a2.
Distance bfs_distance(const SparseGraph& g, std::size_t a1, std::size_t a2, std::uint32_t cap);

struct ShellDecomposition {
  NodeId root = 0;
  std::vector<std::vector<NodeId>> shells;  // ∂N_0 .. ∂N_{t_max}, each sorted
  std::vector<double> shell_capacities;     // Σ λ over each shell

  std::vector<std::uint64_t> sizes() const;
};

ShellDecomposition shells(const SparseGraph& g, std::size_t root, std::size_t t_max,
                          const CapacitySequence& seq);

struct HopcountEntry {
  NodeId a1 = 0;
  NodeId a2 = 0;
  std::uint32_t graph = 0;  // replicate the pair was drawn from
  Distance distance;
};

struct HopcountSample {
  std::vector<HopcountEntry> entries;
  std::size_t n = 0;
  double nu_used = 0.0;
  std::size_t graphs = 0;
  std::size_t pairs_per_graph = 0;
};

/// Builds replicate r of the graph ensemble; must be deterministic in r.
using GraphFactory = std::function<SparseGraph(std::size_t replicate)>;

struct HopcountOptions {
  std::size_t graphs = 1;
  std::size_t pairs_per_graph = 1;
  std::uint64_t seed = 0;
  std::uint32_t cap = 0;  // 0 selects default_cap(n, nu)
  double nu = 0.0;        // recorded, and used for the default cap
  unsigned threads = 1;
};

/// Uniform ordered distinct pairs, drawn without replacement within each
/// replicate. Results do not depend on the thread count.
HopcountSample sample_hopcounts(const GraphFactory& graphs, const HopcountOptions& opt);

/// 3 ⌈log_ν N⌉ + 20.
std::uint32_t default_cap(std::size_t n, double nu);

struct SigmaA {
  int sigma = 0;
  double a = 0.0;
};

/// σ_N = ⌊log_ν N⌋ and a_N = σ_N − log_ν N ∈ (−1, 0]. Throws
/// std::domain_error for ν <= 1 or N < 2.
SigmaA sigma_a(double n, double nu);

/// N_k = round(M ν^{2k}) for k = 0..k_max; std::range_error on overflow.
std::vector<std::uint64_t> ladder(std::uint64_t m, double nu, std::size_t k_max);
/// max a_{N_k} − min a_{N_k} over the ladder.
double ladder_a_spread(const std::vector<std::uint64_t>& sizes, double nu);

struct SurvivalRow {
  std::uint32_t t = 0;
  double survival = 0.0;
  double se = 0.0;
  std::size_t n_finite = 0;
  std::size_t n_total = 0;
};

/// Hopcount survival curves. Disconnected and censored entries count as
/// exceeding every finite t in the unconditional curve and are dropped from
/// the conditional one. Standard errors are clustered by graph replicate.
class EmpiricalSurvival {
 public:
  explicit EmpiricalSurvival(const HopcountSample& sample);

  std::size_t total() const noexcept { return total_; }
  std::size_t finite_count() const noexcept { return finite_; }
  std::size_t infinite_count() const noexcept { return total_ - finite_; }
  std::uint32_t max_finite() const noexcept { return max_finite_; }
  /// counts()[d] = entries with finite distance d.
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  double survival(std::uint32_t t) const noexcept;
  /// nullopt when no entry is finite.
  std::optional<double> conditional_survival(std::uint32_t t) const noexcept;

  /// Binomial standard errors, treating entries as independent.
  double binomial_se(std::uint32_t t, bool conditional) const noexcept;
  /// Cluster-robust standard error of the ratio estimator.
  double clustered_se(std::uint32_t t, bool conditional) const noexcept;

  /// Rows t = 0..t_max. Throws std::domain_error for a conditional curve of an
  /// all-infinite sample.
  std::vector<SurvivalRow> curve(std::uint32_t t_max, bool conditional) const;

 private:
  struct Cluster {
    std::vector<std::uint32_t> finite_distances;
    std::size_t infinite = 0;
  };
  std::vector<Cluster> clusters_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
  std::size_t finite_ = 0;
  std::uint32_t max_finite_ = 0;
};

EmpiricalSurvival survival(const HopcountSample& sample);

/// max |S_a(t) - S_b(t + shift)| over conditional survival curves, taken over
/// the t at which either value lies in [lo, hi].
double shifted_deviation(const EmpiricalSurvival& a, const EmpiricalSurvival& b, int shift,
                         double lo = 0.05, double hi = 0.95);

/// Header `t,survival,se,n_finite,n_total`.
void write_survival_csv(std::ostream& out, const std::vector<SurvivalRow>& rows);

}  // namespace rgdist

#pragma once
// Edge-by-edge coupling of the Poissonian graph with another rank-1 graph
// on the same capacities, and the resulting mismatch bookkeeping.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rgdist/capacities.hpp"
#include "rgdist/graphgen.hpp"
#include "rgdist/stats.hpp"

namespace rgdist {

struct CoupledEdge {
  bool x = false;        // Poissonian graph
  bool x_prime = false;  // comparison graph
  bool k = false;        // mismatch
};

/// One uniform u decides both indicators: u < min(p, p') gives (1,1),
/// u < max(p, p') gives the edge to the larger probability only, otherwise
/// (0,0). Throws std::domain_error on inputs outside [0,1] / [0,1).
CoupledEdge couple_edge(double p, double p_prime, double u);

inline constexpr double kDefaultXi = 0.1;

struct MismatchReport {
  std::vector<std::uint32_t> k_i;  // per-node mismatch counts K_i
  std::uint64_t total = 0;         // Σ_{i<j} K_ij
  double xi = kDefaultXi;
  double c_n = 0.0;                // N^ξ
  bool a_n = true;                 // no mismatch at a node with λ_i > c_N
};

struct CoupledGraphs {
  SparseGraph g;        // Poissonian
  SparseGraph g_prime;  // kernel_prime
  MismatchReport report;
};

/// Skip-samples pairs under the envelope max(h_P, h') and resolves each hit
/// with a (seed, i, j)-keyed uniform, so each marginal graph has exactly the
/// law of its standalone generator.
CoupledGraphs coupled_generate(const CapacitySequence& seq, const ConnectionKernel& kernel_prime,
                               std::uint64_t seed, double xi = kDefaultXi);

struct CouplingFailureOptions {
  std::size_t reps = 1;
  std::size_t pairs_per_rep = 1;
  std::uint64_t seed = 0;
  std::uint32_t cap = 0;  // 0 selects default_cap(N, ν_N)
  unsigned threads = 1;
};

/// Fraction of sampled pairs whose hopcounts differ between the two coupled
/// graphs (two infinite distances count as equal). The standard error is
/// clustered by replicate.
Estimate estimate_coupling_failure(const CapacitySequence& seq,
                                   const ConnectionKernel& kernel_prime,
                                   const CouplingFailureOptions& opt);

/// max_{i≠j} |h_P(x) - h'(x)| / (λ_i λ_j / l_N)^2 with x = λ_i λ_j / l_N,
/// i.e. the smallest C' with |p_ij - p'_ij| <= C' λ_i² λ_j² / l_N².
double mismatch_bound_check(const CapacitySequence& seq, const ConnectionKernel& kernel_prime,
                            unsigned threads = 1);

/// Header `node,lambda,k_i`.
void write_mismatch_csv(std::ostream& out, const CapacitySequence& seq, const MismatchReport& r);
/// {"total":..,"a_n":..,"xi":..,"c_n":..}
void write_mismatch_summary_json(std::ostream& out, const MismatchReport& r);

}  // namespace rgdist

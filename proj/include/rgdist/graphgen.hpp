#pragma once
// Rank-1 random graphs: p_ij = h(λ_i λ_j / l_N) for a connection function h.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rgdist/capacities.hpp"
#include "rgdist/simd/kernels.hpp"

namespace rgdist {

using NodeId = std::uint32_t;

class ConnectionKernel {
 public:
  enum class Kind { poissonian, expected_degree, generalized, custom };

  static ConnectionKernel poissonian();
  static ConnectionKernel expected_degree();
  static ConnectionKernel generalized();
  /// h must map [0,∞) to [0,1], be non-decreasing with h(0) = 0, and satisfy
  /// |h(x) - x| <= C x^2 on a log grid over [1e-8, 1e-2]. The smallest such C
  /// is measured and kept; a violation of any check throws
  /// std::invalid_argument.
  static ConnectionKernel custom(std::function<double(double)> h, std::string name = "custom",
                                 double max_certificate = 1e6);

  double operator()(double x) const;
  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  /// Measured C for custom kernels; 0.5, 0 and 1 for the built-in ones.
  double certificate() const noexcept { return certificate_; }
  /// Closed-form variant, if any (custom kernels have none).
  std::optional<simd::KernelKind> closed_form() const noexcept;

 private:
  ConnectionKernel(Kind k, std::string name, std::function<double(double)> h, double cert)
      : kind_(k), name_(std::move(name)), h_(std::move(h)), certificate_(cert) {}
  Kind kind_;
  std::string name_;
  std::function<double(double)> h_;
  double certificate_;
};

/// Parses "poissonian", "expected_degree" or "generalized".
ConnectionKernel kernel_from_name(const std::string& name);

/// Undirected simple graph in compressed adjacency form. Nodes are 0-based
/// here; the CSV layer converts to 1-based.
class SparseGraph {
 public:
  SparseGraph() = default;
  /// Edges may be given in any order and orientation, with repeats; self
  /// loops are rejected.
  SparseGraph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adj_.size() / 2; }
  std::span<const NodeId> neighbors(std::size_t i) const noexcept {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(std::size_t i, std::size_t j) const noexcept;
  /// Edges (u, v) with u < v in lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  friend bool operator==(const SparseGraph&, const SparseGraph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adj_;
};

/// h(λ_i λ_j / l_N), 0-based i != j; i == j throws std::domain_error.
double edge_probability(const ConnectionKernel& kernel, const CapacitySequence& seq, std::size_t i,
                        std::size_t j);

/// Poissonian random graph: Poisson multigraph with pair means λ_i λ_j / l_N,
/// collapsed to a simple graph.
SparseGraph generate_prg(const CapacitySequence& seq, std::uint64_t seed);

/// Independent Bernoulli edges with p_ij = h(λ_i λ_j / l_N) for a
/// non-decreasing h; expected O(N + E) by skip sampling over sorted rows.
/// The poissonian kernel is accepted too (its edges are also independent).
SparseGraph generate_bernoulli(const CapacitySequence& seq, const ConnectionKernel& kernel,
                               std::uint64_t seed);

/// Σ_{j≠i} h(λ_i λ_j / l_N).
double expected_degree(const CapacitySequence& seq, const ConnectionKernel& kernel, std::size_t i);

/// Header `u,v`, 1-based, u < v, sorted.
void write_edge_list_csv(std::ostream& out, const SparseGraph& g);
SparseGraph read_edge_list_csv(std::istream& in, std::size_t n);

namespace detail {

/// Capacities sorted descending together with the original index of each.
struct SortedCapacities {
  std::vector<double> values;
  std::vector<NodeId> original;
};
SortedCapacities sort_descending(const CapacitySequence& seq);

/// Number of failures before the next success of a Bernoulli(p) stream.
std::uint64_t geometric_skip(double p, double u) noexcept;

}  // namespace detail

}  // namespace rgdist

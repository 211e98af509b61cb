#include "rgdist/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace rgdist {

// ---------------------------------------------------------------------------
// ConnectionKernel

ConnectionKernel ConnectionKernel::poissonian() {
  return {Kind::poissonian, "poissonian",
          [](double x) { return simd::kernel_value(simd::KernelKind::poissonian, x); }, 0.5};
}

ConnectionKernel ConnectionKernel::expected_degree() {
  return {Kind::expected_degree, "expected_degree",
          [](double x) { return simd::kernel_value(simd::KernelKind::expected_degree, x); }, 0.0};
}

ConnectionKernel ConnectionKernel::generalized() {
  return {Kind::generalized, "generalized",
          [](double x) { return simd::kernel_value(simd::KernelKind::generalized, x); }, 1.0};
}

ConnectionKernel ConnectionKernel::custom(std::function<double(double)> h, std::string name,
                                          double max_certificate) {
  if (!h) throw std::invalid_argument("custom kernel: empty function");
  if (h(0.0) != 0.0) throw std::invalid_argument("custom kernel: h(0) must be 0");

  // Monotonicity and range on a log grid over [1e-10, 1e4].
  double prev = 0.0;
  for (int k = 0; k <= 1400; ++k) {
    const double x = std::pow(10.0, -10.0 + k * 0.01);
    const double v = h(x);
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("custom kernel: h must map into [0,1]");
    if (v < prev) throw std::invalid_argument("custom kernel: h must be non-decreasing");
    prev = v;
  }

  double c = 0.0;
  for (int k = 0; k <= 600; ++k) {
    const double x = std::pow(10.0, -8.0 + k * 0.01);
    c = std::max(c, std::abs(h(x) - x) / (x * x));
  }
  if (!std::isfinite(c) || c > max_certificate)
    throw std::invalid_argument("custom kernel: |h(x)-x| <= C x^2 fails near 0 (C=" +
                                std::to_string(c) + ")");
  return {Kind::custom, std::move(name), std::move(h), c};
}

double ConnectionKernel::operator()(double x) const { return h_(x); }

std::optional<simd::KernelKind> ConnectionKernel::closed_form() const noexcept {
  switch (kind_) {
    case Kind::poissonian:
      return simd::KernelKind::poissonian;
    case Kind::expected_degree:
      return simd::KernelKind::expected_degree;
    case Kind::generalized:
      return simd::KernelKind::generalized;
    case Kind::custom:
      break;
  }
  return std::nullopt;
}

ConnectionKernel kernel_from_name(const std::string& name) {
  if (name == "poissonian" || name == "prg") return ConnectionKernel::poissonian();
  if (name == "expected_degree" || name == "edrg") return ConnectionKernel::expected_degree();
  if (name == "generalized" || name == "grg") return ConnectionKernel::generalized();
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

// ---------------------------------------------------------------------------
// SparseGraph

SparseGraph::SparseGraph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
  if (n > std::numeric_limits<NodeId>::max())
    throw std::invalid_argument("SparseGraph: too many nodes");
  std::vector<std::uint64_t> keys;
  keys.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == v) throw std::invalid_argument("SparseGraph: self-loop");
    if (u >= n || v >= n) throw std::invalid_argument("SparseGraph: node index out of range");
    if (u > v) std::swap(u, v);
    keys.push_back((static_cast<std::uint64_t>(u) << 32) | v);
  }
  edges.clear();
  edges.shrink_to_fit();
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  offsets_.assign(n + 1, 0);
  for (auto k : keys) {
    ++offsets_[(k >> 32) + 1];
    ++offsets_[(k & 0xffffffffULL) + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adj_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Lexicographic key order leaves every list sorted: a node's smaller
  // neighbours arrive (ascending) before its larger ones.
  for (auto k : keys) {
    const auto u = static_cast<NodeId>(k >> 32);
    const auto v = static_cast<NodeId>(k & 0xffffffffULL);
    adj_[fill[u]++] = v;
    adj_[fill[v]++] = u;
  }
}

bool SparseGraph::has_edge(std::size_t i, std::size_t j) const noexcept {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), static_cast<NodeId>(j));
}

std::vector<std::pair<NodeId, NodeId>> SparseGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < size(); ++u)
    for (NodeId v : neighbors(u))
      if (v > u) out.emplace_back(static_cast<NodeId>(u), v);
  return out;
}

// ---------------------------------------------------------------------------
// Generators

double edge_probability(const ConnectionKernel& kernel, const CapacitySequence& seq, std::size_t i,
                        std::size_t j) {
  if (i == j) throw std::domain_error("edge_probability: i == j");
  if (i >= seq.size() || j >= seq.size())
    throw std::out_of_range("edge_probability: node index out of range");
  return kernel(seq[i] * seq[j] / seq.total());
}

namespace detail {

SortedCapacities sort_descending(const CapacitySequence& seq) {
  SortedCapacities s;
  s.original.resize(seq.size());
  std::iota(s.original.begin(), s.original.end(), NodeId{0});
  std::stable_sort(s.original.begin(), s.original.end(),
                   [&](NodeId a, NodeId b) { return seq[a] > seq[b]; });
  s.values.resize(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) s.values[k] = seq[s.original[k]];
  return s;
}

std::uint64_t geometric_skip(double p, double u) noexcept {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  const double k = std::floor(std::log(u) / std::log1p(-p));
  if (!(k < 9.0e18)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(k);
}

}  // namespace detail

SparseGraph generate_prg(const CapacitySequence& seq, std::uint64_t seed) {
  const std::size_t n = seq.size();
  const double l = seq.total();
  const double mean_edges = (l * l - seq.sum_sq()) / (2.0 * l);
  std::vector<std::pair<NodeId, NodeId>> edges;
  if (n < 2 || !(mean_edges > 0.0)) return SparseGraph(n, std::move(edges));

  Engine g = make_engine(seed, {0x9e6ULL});
  std::poisson_distribution<std::uint64_t> total(mean_edges);
  const std::uint64_t count = total(g);
  const MixingLaw marks = mark_law(seq);
  edges.reserve(count);
  for (std::uint64_t e = 0; e < count; ++e) {
    std::size_t i = 0;
    std::size_t j = 0;
    do {
      i = marks.sample(g);
      j = marks.sample(g);
    } while (i == j);
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  return SparseGraph(n, std::move(edges));
}

SparseGraph generate_bernoulli(const CapacitySequence& seq, const ConnectionKernel& kernel,
                               std::uint64_t seed) {
  const std::size_t n = seq.size();
  const double l = seq.total();
  const auto sorted = detail::sort_descending(seq);
  const auto& w = sorted.values;
  Engine g = make_engine(seed, {0xbe6ULL});
  std::vector<std::pair<NodeId, NodeId>> edges;

  for (std::size_t u = 0; u + 1 < n; ++u) {
    std::size_t v = u + 1;
    double p = std::min(1.0, kernel(w[u] * w[v] / l));
    while (v < n && p > 0.0) {
      if (p < 1.0) {
        const auto skip = detail::geometric_skip(p, uniform_open(g));
        if (skip >= n - v) break;
        v += skip;
      }
      const double q = std::min(1.0, kernel(w[u] * w[v] / l));
      if (uniform01(g) * p < q)
        edges.emplace_back(sorted.original[u], sorted.original[v]);
      p = q;
      ++v;
    }
  }
  return SparseGraph(n, std::move(edges));
}

double expected_degree(const CapacitySequence& seq, const ConnectionKernel& kernel,
                       std::size_t i) {
  if (i >= seq.size()) throw std::out_of_range("expected_degree: node index out of range");
  const double scale = seq[i] / seq.total();
  if (const auto kind = kernel.closed_form()) {
    // The self term is subtracted rather than skipped to keep one contiguous
    // span for the vector kernel.
    return simd::kernel_row_sum(*kind, scale, seq.values()) - kernel(scale * seq[i]);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < seq.size(); ++j)
    if (j != i) s += kernel(scale * seq[j]);
  return s;
}

// ---------------------------------------------------------------------------
// CSV

void write_edge_list_csv(std::ostream& out, const SparseGraph& g) {
  out << "u,v\n";
  std::string line;
  for (const auto& [u, v] : g.edges()) {
    line.clear();
    line += std::to_string(u + 1);
    line += ',';
    line += std::to_string(v + 1);
    line += '\n';
    out << line;
  }
}

SparseGraph read_edge_list_csv(std::istream& in, std::size_t n) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("edge list CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  while (!line.empty() && line.front() == '#') {
    if (!std::getline(in, line)) throw std::invalid_argument("edge list CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  if (line != "u,v") throw std::invalid_argument("edge list CSV: header must be 'u,v'");
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("edge list CSV: malformed row");
    const auto u = std::stoull(line.substr(0, comma));
    const auto v = std::stoull(line.substr(comma + 1));
    if (u < 1 || v < 1 || u > n || v > n)
      throw std::invalid_argument("edge list CSV: node out of range");
    edges.emplace_back(static_cast<NodeId>(u - 1), static_cast<NodeId>(v - 1));
  }
  return SparseGraph(n, std::move(edges));
}

}  // namespace rgdist

#include "rgdist/distances.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "rgdist/parallel.hpp"

namespace rgdist {

// ---------------------------------------------------------------------------
// BFS

void BfsWorkspace::resize(std::size_t n) {
  for (int s = 0; s < 2; ++s) {
    seen_[s].assign(n, 0);
    depth_[s].assign(n, 0);
  }
  epoch_ = 0;
}

std::uint32_t BfsWorkspace::next_epoch() {
  if (++epoch_ == 0) {
    const std::size_t n = seen_[0].size();
    resize(n);
    epoch_ = 1;
  }
  return epoch_;
}

Distance BfsWorkspace::distance(const SparseGraph& g, std::size_t a1, std::size_t a2,
                                std::uint32_t cap) {
  if (a1 == a2) throw std::domain_error("bfs_distance: a1 == a2");
  if (a1 >= g.size() || a2 >= g.size())
    throw std::out_of_range("bfs_distance: node index out of range");
  if (seen_[0].size() != g.size()) resize(g.size());

  const std::uint32_t ep = next_epoch();
  Distance out;
  out.cap = cap;
  std::uint32_t d[2] = {0, 0};
  const NodeId roots[2] = {static_cast<NodeId>(a1), static_cast<NodeId>(a2)};
  for (int s = 0; s < 2; ++s) {
    seen_[s][roots[s]] = ep;
    depth_[s][roots[s]] = 0;
    frontier_[s].assign(1, roots[s]);
  }

  for (;;) {
    if (d[0] + d[1] + 1 > cap) {
      out.status = DistanceStatus::censored;
      return out;
    }
    const int s = frontier_[0].size() <= frontier_[1].size() ? 0 : 1;
    const int o = 1 - s;
    std::uint32_t best = kInfiniteDistance;
    next_.clear();
    for (NodeId x : frontier_[s]) {
      for (NodeId y : g.neighbors(x)) {
        if (seen_[o][y] == ep) {
          best = std::min(best, d[s] + 1 + depth_[o][y]);
        } else if (seen_[s][y] != ep) {
          seen_[s][y] = ep;
          depth_[s][y] = d[s] + 1;
          next_.push_back(y);
        }
      }
    }
    if (best != kInfiniteDistance) {
      out.status = DistanceStatus::finite;
      out.hops = best;
      return out;
    }
    if (next_.empty()) {
      out.status = DistanceStatus::disconnected;
      return out;
    }
    frontier_[s].swap(next_);
    ++d[s];
  }
}

Distance bfs_distance(const SparseGraph& g, std::size_t a1, std::size_t a2, std::uint32_t cap) {
  BfsWorkspace ws(g.size());
  return ws.distance(g, a1, a2, cap);
}

std::vector<std::uint64_t> ShellDecomposition::sizes() const {
  std::vector<std::uint64_t> out;
  out.reserve(shells.size());
  for (const auto& s : shells) out.push_back(s.size());
  return out;
}

ShellDecomposition shells(const SparseGraph& g, std::size_t root, std::size_t t_max,
                          const CapacitySequence& seq) {
  if (root >= g.size()) throw std::out_of_range("shells: root out of range");
  if (seq.size() != g.size()) throw std::invalid_argument("shells: capacity/graph size mismatch");
  ShellDecomposition out;
  out.root = static_cast<NodeId>(root);
  std::vector<bool> seen(g.size(), false);
  seen[root] = true;
  out.shells.push_back({static_cast<NodeId>(root)});
  for (std::size_t k = 1; k <= t_max; ++k) {
    std::vector<NodeId> next;
    for (NodeId x : out.shells.back())
      for (NodeId y : g.neighbors(x))
        if (!seen[y]) {
          seen[y] = true;
          next.push_back(y);
        }
    std::sort(next.begin(), next.end());
    out.shells.push_back(std::move(next));
  }
  for (const auto& s : out.shells) {
    double c = 0.0;
    for (NodeId v : s) c += seq[v];
    out.shell_capacities.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hopcount sampling

std::uint32_t default_cap(std::size_t n, double nu) {
  if (!(nu > 1.0) || n < 2) return 64;
  return static_cast<std::uint32_t>(3.0 * std::ceil(std::log(static_cast<double>(n)) / std::log(nu)) +
                                    20.0);
}

namespace {

std::vector<std::pair<NodeId, NodeId>> draw_pairs(std::size_t n, std::size_t count, Engine& g) {
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1);
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(count);
  if (2 * count > total) {
    std::vector<std::uint64_t> all(total);
    for (std::uint64_t k = 0; k < total; ++k) all[k] = k;
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::uint64_t> pick(k, total - 1);
      std::swap(all[k], all[pick(g)]);
      const auto a = all[k] / (n - 1);
      auto b = all[k] % (n - 1);
      if (b >= a) ++b;
      out.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
    return out;
  }
  std::unordered_set<std::uint64_t> used;
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  while (out.size() < count) {
    const auto a = node(g);
    const auto b = node(g);
    if (a == b) continue;
    if (!used.insert(static_cast<std::uint64_t>(a) * n + b).second) continue;
    out.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return out;
}

}  // namespace

HopcountSample sample_hopcounts(const GraphFactory& graphs, const HopcountOptions& opt) {
  if (opt.graphs < 1) throw std::invalid_argument("sample_hopcounts: need at least one graph");
  if (opt.pairs_per_graph < 1)
    throw std::invalid_argument("sample_hopcounts: pairs_per_graph must be >= 1");

  std::vector<std::vector<HopcountEntry>> slots(opt.graphs);
  std::vector<std::size_t> sizes(opt.graphs, 0);
  parallel_for(opt.graphs, opt.threads, [&](std::size_t r) {
    const SparseGraph g = graphs(r);
    const std::size_t n = g.size();
    if (n < 2) throw std::invalid_argument("sample_hopcounts: graphs need at least two nodes");
    if (opt.pairs_per_graph > static_cast<std::uint64_t>(n) * (n - 1))
      throw std::invalid_argument("sample_hopcounts: more pairs requested than exist");
    const std::uint32_t cap = opt.cap != 0 ? opt.cap : default_cap(n, opt.nu);
    Engine eng = make_engine(opt.seed, {r, 0x9a1ULL});
    BfsWorkspace ws(n);
    auto& out = slots[r];
    for (const auto& [a, b] : draw_pairs(n, opt.pairs_per_graph, eng)) {
      out.push_back({a, b, static_cast<std::uint32_t>(r), ws.distance(g, a, b, cap)});
    }
    sizes[r] = n;
  });

  HopcountSample sample;
  sample.n = sizes.front();
  sample.nu_used = opt.nu;
  sample.graphs = opt.graphs;
  sample.pairs_per_graph = opt.pairs_per_graph;
  for (auto& s : slots) sample.entries.insert(sample.entries.end(), s.begin(), s.end());
  return sample;
}

// ---------------------------------------------------------------------------
// σ_N, a_N and the ladder

SigmaA sigma_a(double n, double nu) {
  if (!(nu > 1.0) || !std::isfinite(nu))
    throw std::domain_error("sigma_a: nu must exceed 1 (supercritical regime)");
  if (!(n >= 2.0)) throw std::domain_error("sigma_a: N must be >= 2");
  double x = std::log(n) / std::log(nu);
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-12 * std::max(1.0, std::abs(x))) x = r;
  SigmaA out;
  out.sigma = static_cast<int>(std::floor(x));
  out.a = out.sigma - x;
  if (out.a > 0.0) out.a = 0.0;
  return out;
}

std::vector<std::uint64_t> ladder(std::uint64_t m, double nu, std::size_t k_max) {
  if (m < 2) throw std::invalid_argument("ladder: M must be >= 2");
  if (!(nu > 1.0)) throw std::domain_error("ladder: nu must exceed 1");
  std::vector<std::uint64_t> out;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double v = std::round(static_cast<double>(m) * std::pow(nu, 2.0 * static_cast<double>(k)));
    if (!std::isfinite(v) || v >= 9.2e18) throw std::range_error("ladder: N_k overflows");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

double ladder_a_spread(const std::vector<std::uint64_t>& sizes, double nu) {
  if (sizes.empty()) return 0.0;
  double lo = 0.0;
  double hi = -1.0;
  for (auto n : sizes) {
    const double a = sigma_a(static_cast<double>(n), nu).a;
    if (hi < lo) {
      lo = hi = a;
    } else {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  return hi - lo;
}

// ---------------------------------------------------------------------------
// Empirical survival

EmpiricalSurvival::EmpiricalSurvival(const HopcountSample& sample) {
  if (sample.entries.empty()) throw std::domain_error("survival: empty sample");
  std::uint32_t clusters = 0;
  for (const auto& e : sample.entries) clusters = std::max(clusters, e.graph + 1);
  clusters_.resize(clusters);
  for (const auto& e : sample.entries) {
    ++total_;
    auto& c = clusters_[e.graph];
    if (e.distance.finite()) {
      ++finite_;
      const auto d = e.distance.hops;
      c.finite_distances.push_back(d);
      if (counts_.size() <= d) counts_.resize(d + 1, 0);
      ++counts_[d];
      max_finite_ = std::max(max_finite_, d);
    } else {
      ++c.infinite;
    }
  }
}

double EmpiricalSurvival::survival(std::uint32_t t) const noexcept {
  std::size_t above = total_ - finite_;
  for (std::size_t d = t + 1; d < counts_.size(); ++d) above += counts_[d];
  return static_cast<double>(above) / static_cast<double>(total_);
}

std::optional<double> EmpiricalSurvival::conditional_survival(std::uint32_t t) const noexcept {
  if (finite_ == 0) return std::nullopt;
  std::size_t above = 0;
  for (std::size_t d = t + 1; d < counts_.size(); ++d) above += counts_[d];
  return static_cast<double>(above) / static_cast<double>(finite_);
}

double EmpiricalSurvival::binomial_se(std::uint32_t t, bool conditional) const noexcept {
  const double n = static_cast<double>(conditional ? finite_ : total_);
  if (n == 0.0) return 0.0;
  const double p = conditional ? conditional_survival(t).value_or(0.0) : survival(t);
  return std::sqrt(p * (1.0 - p) / n);
}

double EmpiricalSurvival::clustered_se(std::uint32_t t, bool conditional) const noexcept {
  std::size_t nonempty = 0;
  for (const auto& c : clusters_)
    if (!c.finite_distances.empty() || (!conditional && c.infinite > 0)) ++nonempty;
  if (nonempty < 2) return binomial_se(t, conditional);

  const double n = static_cast<double>(conditional ? finite_ : total_);
  if (n == 0.0) return 0.0;
  const double p = conditional ? conditional_survival(t).value_or(0.0) : survival(t);
  double acc = 0.0;
  for (const auto& c : clusters_) {
    double a = 0.0;
    for (auto d : c.finite_distances)
      if (d > t) a += 1.0;
    double m = static_cast<double>(c.finite_distances.size());
    if (!conditional) {
      a += static_cast<double>(c.infinite);
      m += static_cast<double>(c.infinite);
    }
    const double r = a - p * m;
    acc += r * r;
  }
  const double g = static_cast<double>(nonempty);
  return std::sqrt(g / (g - 1.0) * acc) / n;
}

std::vector<SurvivalRow> EmpiricalSurvival::curve(std::uint32_t t_max, bool conditional) const {
  if (conditional && finite_ == 0)
    throw std::domain_error("survival: conditional curve undefined, every entry is infinite");
  std::vector<SurvivalRow> rows;
  for (std::uint32_t t = 0; t <= t_max; ++t) {
    SurvivalRow r;
    r.t = t;
    r.survival = conditional ? *conditional_survival(t) : survival(t);
    r.se = clustered_se(t, conditional);
    r.n_finite = finite_;
    r.n_total = total_;
    rows.push_back(r);
  }
  return rows;
}

EmpiricalSurvival survival(const HopcountSample& sample) { return EmpiricalSurvival(sample); }

double shifted_deviation(const EmpiricalSurvival& a, const EmpiricalSurvival& b, int shift,
                         double lo, double hi) {
  if (a.finite_count() == 0 || b.finite_count() == 0)
    throw std::domain_error("shifted_deviation: a curve has no finite entries");
  const int t_max = static_cast<int>(std::max(a.max_finite(), b.max_finite())) + std::abs(shift);
  double worst = 0.0;
  for (int t = -std::abs(shift); t <= t_max; ++t) {
    const int tb = t + shift;
    // Conditional survival is 1 below t = 0.
    const double sa = t < 0 ? 1.0 : *a.conditional_survival(static_cast<std::uint32_t>(t));
    const double sb = tb < 0 ? 1.0 : *b.conditional_survival(static_cast<std::uint32_t>(tb));
    const bool in_a = sa >= lo && sa <= hi;
    const bool in_b = sb >= lo && sb <= hi;
    if (in_a || in_b) worst = std::max(worst, std::abs(sa - sb));
  }
  return worst;
}

void write_survival_csv(std::ostream& out, const std::vector<SurvivalRow>& rows) {
  out << "t,survival,se,n_finite,n_total\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%zu,%zu\n", r.t, r.survival, r.se, r.n_finite,
                  r.n_total);
    out << buf;
  }
}

}  // namespace rgdist

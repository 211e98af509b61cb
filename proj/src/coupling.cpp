#include "rgdist/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rgdist/distances.hpp"
#include "rgdist/parallel.hpp"
#include "rgdist/simd/kernels.hpp"

namespace rgdist {

CoupledEdge couple_edge(double p, double p_prime, double u) {
  if (!(p >= 0.0 && p <= 1.0) || !(p_prime >= 0.0 && p_prime <= 1.0))
    throw std::domain_error("couple_edge: probabilities must lie in [0,1]");
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("couple_edge: u must lie in [0,1)");
  const double lo = std::min(p, p_prime);
  const double hi = std::max(p, p_prime);
  if (u < lo) return {true, true, false};
  if (u < hi) return {p > p_prime, p_prime > p, true};
  return {false, false, false};
}

CoupledGraphs coupled_generate(const CapacitySequence& seq, const ConnectionKernel& kernel_prime,
                               std::uint64_t seed, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("coupled_generate: xi must be positive");
  const std::size_t n = seq.size();
  const double l = seq.total();
  const auto prg = ConnectionKernel::poissonian();
  auto envelope = [&](double x) { return std::min(1.0, std::max(prg(x), kernel_prime(x))); };

  const auto sorted = detail::sort_descending(seq);
  const auto& w = sorted.values;
  Engine eng = make_engine(seed, {0xc0ULL});
  std::vector<std::pair<NodeId, NodeId>> e1;
  std::vector<std::pair<NodeId, NodeId>> e2;
  MismatchReport rep;
  rep.xi = xi;
  rep.k_i.assign(n, 0);
  rep.c_n = std::pow(static_cast<double>(n), xi);

  for (std::size_t u = 0; u + 1 < n; ++u) {
    std::size_t v = u + 1;
    double pbar = envelope(w[u] * w[v] / l);
    while (v < n && pbar > 0.0) {
      if (pbar < 1.0) {
        const auto skip = detail::geometric_skip(pbar, uniform_open(eng));
        if (skip >= n - v) break;
        v += skip;
      }
      const double x = w[u] * w[v] / l;
      const double q = envelope(x);
      if (uniform01(eng) * pbar < q) {
        NodeId i = sorted.original[u];
        NodeId j = sorted.original[v];
        if (i > j) std::swap(i, j);
        // Given a hit, u' is uniform on [0, q).
        const double uu = keyed_uniform(seed, i, j) * q;
        const auto c = couple_edge(std::min(1.0, prg(x)), std::min(1.0, kernel_prime(x)), uu);
        if (c.x) e1.emplace_back(i, j);
        if (c.x_prime) e2.emplace_back(i, j);
        if (c.k) {
          ++rep.k_i[i];
          ++rep.k_i[j];
          ++rep.total;
        }
      }
      pbar = q;
      ++v;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (seq[i] > rep.c_n && rep.k_i[i] > 0) rep.a_n = false;
  return {SparseGraph(n, std::move(e1)), SparseGraph(n, std::move(e2)), std::move(rep)};
}

Estimate estimate_coupling_failure(const CapacitySequence& seq,
                                   const ConnectionKernel& kernel_prime,
                                   const CouplingFailureOptions& opt) {
  if (opt.reps < 1) throw std::invalid_argument("estimate_coupling_failure: reps must be >= 1");
  if (opt.pairs_per_rep < 1)
    throw std::invalid_argument("estimate_coupling_failure: pairs_per_rep must be >= 1");
  const std::size_t n = seq.size();
  if (n < 2) throw std::domain_error("estimate_coupling_failure: need N >= 2");
  const std::uint32_t cap = opt.cap != 0 ? opt.cap : default_cap(n, seq.nu());

  std::vector<double> fails(opt.reps, 0.0);
  std::vector<double> counts(opt.reps, static_cast<double>(opt.pairs_per_rep));
  parallel_for(opt.reps, opt.threads, [&](std::size_t r) {
    const auto cg = coupled_generate(seq, kernel_prime, derive_seed(opt.seed, {r, 1}));
    // Identical graphs cannot disagree on any pair.
    if (cg.report.total == 0) return;
    Engine eng = make_engine(opt.seed, {r, 2});
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    BfsWorkspace ws(n);
    double f = 0.0;
    for (std::size_t p = 0; p < opt.pairs_per_rep; ++p) {
      const std::size_t a = node(eng);
      std::size_t b = a;
      while (b == a) b = node(eng);
      const auto d1 = ws.distance(cg.g, a, b, cap);
      const auto d2 = ws.distance(cg.g_prime, a, b, cap);
      const bool same = (d1.finite() && d2.finite()) ? d1.hops == d2.hops
                                                     : d1.finite() == d2.finite();
      if (!same) f += 1.0;
    }
    fails[r] = f;
  });
  return clustered_ratio(fails, counts);
}

double mismatch_bound_check(const CapacitySequence& seq, const ConnectionKernel& kernel_prime,
                            unsigned threads) {
  const std::size_t n = seq.size();
  const double l = seq.total();
  const auto prg = ConnectionKernel::poissonian();
  const auto other = kernel_prime.closed_form();
  std::vector<double> row_max(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    const double s = seq[i] / l;
    std::vector<double> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(seq[j]);
    if (other) {
      row_max[i] = simd::kernel_gap_ratio_max(simd::KernelKind::poissonian, *other, s, others);
    } else {
      double m = 0.0;
      for (double wj : others) {
        const double x = s * wj;
        m = std::max(m, std::abs(prg(x) - kernel_prime(x)) / (x * x));
      }
      row_max[i] = m;
    }
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

void write_mismatch_csv(std::ostream& out, const CapacitySequence& seq, const MismatchReport& r) {
  out << "node,lambda,k_i\n";
  char buf[96];
  for (std::size_t i = 0; i < r.k_i.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%u\n", i + 1, seq[i], r.k_i[i]);
    out << buf;
  }
}

void write_mismatch_summary_json(std::ostream& out, const MismatchReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "{\"total\":%llu,\"a_n\":%s,\"xi\":%.17g,\"c_n\":%.17g}\n",
                static_cast<unsigned long long>(r.total), r.a_n ? "true" : "false", r.xi, r.c_n);
  out << buf;
}

}  // namespace rgdist

#include "rgdist/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "rgdist/parallel.hpp"
#include "rgdist/simd/kernels.hpp"

namespace rgdist {
namespace {

std::vector<double> normalised(const MixedPoissonLaw& p) {
  const double s = std::accumulate(p.pmf.begin(), p.pmf.end(), 0.0);
  if (!(s > 0.0)) throw std::invalid_argument("offspring law has no retained mass");
  std::vector<double> out(p.pmf.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = p.pmf[n] / s;
  return out;
}

std::uint64_t draw_from(const std::vector<double>& pmf, Engine& g) {
  const double u = uniform01(g);
  double acc = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    acc += pmf[n];
    if (u < acc) return n;
  }
  // Rounding left u above the accumulated mass: take the last supported value.
  for (std::size_t n = pmf.size(); n-- > 0;)
    if (pmf[n] > 0.0) return n;
  return 0;
}

// Total offspring of `parents` i.i.d. individuals, via a multinomial split
// of the parents over offspring counts.
std::uint64_t total_offspring(std::uint64_t parents, const std::vector<double>& pmf, Engine& g) {
  std::uint64_t remaining = parents;
  double mass_left = 1.0;
  std::uint64_t total = 0;
  for (std::size_t n = 0; n < pmf.size() && remaining > 0; ++n) {
    if (pmf[n] <= 0.0) continue;
    std::uint64_t c = remaining;
    if (pmf[n] < mass_left) {
      std::binomial_distribution<std::uint64_t> bin(remaining, std::min(1.0, pmf[n] / mass_left));
      c = bin(g);
    }
    total += c * n;
    remaining -= c;
    mass_left -= pmf[n];
  }
  // Whatever rounding leaves over goes to the largest supported count.
  if (remaining > 0) {
    for (std::size_t n = pmf.size(); n-- > 0;)
      if (pmf[n] > 0.0) {
        total += remaining * n;
        break;
      }
  }
  return total;
}

double pgf(const std::vector<double>& pmf, double s) {
  double v = 0.0;
  for (std::size_t n = pmf.size(); n-- > 0;) v = v * s + pmf[n];
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Delayed BP

BPTrajectory simulate_delayed_bp(const MixedPoissonLaw& f, const MixedPoissonLaw& g,
                                 std::size_t t, std::uint64_t seed, std::uint64_t population_cap) {
  const auto pf = normalised(f);
  const auto pg = normalised(g);
  Engine eng = make_engine(seed, {0xb9ULL});
  BPTrajectory tr;
  tr.sizes.push_back(1);
  if (t == 0) return tr;
  tr.sizes.push_back(draw_from(pf, eng));
  for (std::size_t k = 2; k <= t; ++k) {
    const std::uint64_t z = tr.sizes.back();
    if (z > population_cap) {
      tr.capped = true;
      return tr;
    }
    tr.sizes.push_back(z == 0 ? 0 : total_offspring(z, pg, eng));
  }
  return tr;
}

double law_mean(const MixedPoissonLaw& p) {
  const auto q = normalised(p);
  double m = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) m += static_cast<double>(n) * q[n];
  return m;
}

std::size_t default_w_depth(double mu, double nu) {
  if (!(nu > 1.0)) throw std::domain_error("default_w_depth: nu must exceed 1");
  if (!(mu > 0.0)) throw std::domain_error("default_w_depth: mu must be positive");
  std::size_t t = 1;
  while (mu * std::pow(nu, static_cast<double>(t - 1)) < 1e3) ++t;
  return t;
}

std::vector<double> estimate_W(const MixedPoissonLaw& f, const MixedPoissonLaw& g, std::size_t t,
                               std::size_t reps, std::uint64_t seed, unsigned threads) {
  const double mu = law_mean(f);
  const double nu = law_mean(g);
  if (!(nu > 1.0)) throw std::domain_error("estimate_W: g must be supercritical (nu > 1)");
  if (t < 1 || mu * std::pow(nu, static_cast<double>(t) - 1.0) < 1e3)
    throw std::invalid_argument("estimate_W: depth too small, need mu nu^(t-1) >= 1e3");
  std::vector<double> w(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto tr = simulate_delayed_bp(f, g, t, derive_seed(seed, {r}));
    const std::size_t k = tr.sizes.size() - 1;
    w[r] = static_cast<double>(tr.sizes[k]) / (mu * std::pow(nu, static_cast<double>(k) - 1.0));
  });
  return w;
}

double extinction_probability(const MixedPoissonLaw& f, const MixedPoissonLaw& g) {
  const auto pf = normalised(f);
  const auto pg = normalised(g);
  double q = 0.0;
  for (int it = 0; it < 10'000'000; ++it) {
    const double next = pgf(pg, q);
    if (std::abs(next - q) < 1e-16) {
      q = next;
      break;
    }
    q = next;
  }
  return pgf(pf, q);
}

// ---------------------------------------------------------------------------
// Limit law

double LimitLawConfig::survival_fraction() const noexcept {
  if (w_samples.empty()) return 0.0;
  const auto pos = std::count_if(w_samples.begin(), w_samples.end(),
                                 [](double w) { return w > kZeroW; });
  return static_cast<double>(pos) / static_cast<double>(w_samples.size());
}

void LimitLawConfig::validate() const {
  if (!(nu > 1.0)) throw std::domain_error("limit law: nu must exceed 1");
  if (!(mu > 0.0)) throw std::domain_error("limit law: mu must be positive");
  for (double w : w_samples)
    if (!(w >= 0.0)) throw std::invalid_argument("limit law: W samples must be non-negative");
}

Estimate limit_law_survival_se(const LimitLawConfig& cfg, double a, double j) {
  cfg.validate();
  std::vector<double> pos;
  for (double w : cfg.w_samples)
    if (w > kZeroW) pos.push_back(w);
  if (pos.size() < 2)
    throw std::domain_error("limit_law_survival: fewer than two positive W samples");
  const std::size_t half = pos.size() / 2;
  const double scale = cfg.kappa() * std::pow(cfg.nu, a + j);
  std::vector<double> v(half);
  for (std::size_t k = 0; k < half; ++k) v[k] = std::exp(-scale * pos[k] * pos[k + half]);
  return mean_se(v);
}

double limit_law_survival(const LimitLawConfig& cfg, double a, double j) {
  return limit_law_survival_se(cfg, a, j).value;
}

std::vector<ModelCurvePoint> model_survival_curve(const LimitLawConfig& cfg, double n, int t_min,
                                                  int t_max) {
  const auto sa = sigma_a(n, cfg.nu);
  std::vector<ModelCurvePoint> out;
  for (int t = t_min; t <= t_max; ++t) {
    const auto e = limit_law_survival_se(cfg, sa.a, static_cast<double>(t - sa.sigma));
    out.push_back({t, e.value, e.se});
  }
  return out;
}

void write_w_csv(std::ostream& out, const std::vector<double>& w) {
  out << "replicate,w\n";
  char buf[64];
  for (std::size_t r = 0; r < w.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", r + 1, w[r]);
    out << buf;
  }
}

void write_limit_curve_csv(std::ostream& out, const std::vector<ModelCurvePoint>& curve) {
  out << "t,survival_model\n";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", p.t, p.survival);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// NR-process

NRState simulate_nr(const CapacitySequence& seq, std::size_t t, std::uint64_t seed,
                    const NROptions& opt) {
  const std::size_t n = seq.size();
  const MixingLaw marks = mark_law(seq);
  Engine eng = make_engine(seed, {0x17ULL});

  std::size_t root = 0;
  if (opt.root) {
    if (*opt.root >= n) throw std::out_of_range("simulate_nr: root out of range");
    root = *opt.root;
  } else {
    root = std::uniform_int_distribution<std::size_t>(0, n - 1)(eng);
  }

  std::vector<bool> seen_any(n, false);
  std::vector<bool> seen_kept(n, false);
  seen_any[root] = true;
  seen_kept[root] = true;

  NRState s;
  s.generations.push_back({NRIndividual{static_cast<NodeId>(root), 0, false, true, false}});
  std::uint64_t population = 1;
  std::uint64_t dup_so_far = 0;

  for (std::size_t k = 1; k <= t; ++k) {
    const auto& prev = s.generations.back();
    std::vector<NRIndividual> cur;
    for (std::size_t p = 0; p < prev.size(); ++p) {
      std::poisson_distribution<std::uint64_t> kids(seq[prev[p].mark]);
      const std::uint64_t c = kids(eng);
      population += c;
      if (population > opt.population_cap)
        throw std::length_error("simulate_nr: population cap exceeded");
      for (std::uint64_t b = 0; b < c; ++b) {
        NRIndividual v;
        v.mark = static_cast<NodeId>(marks.sample(eng));
        v.parent = static_cast<std::uint32_t>(p);
        v.duplicate = seen_any[v.mark];
        seen_any[v.mark] = true;
        v.kept = prev[p].kept && (!opt.dedup || !seen_kept[v.mark]);
        if (v.kept) seen_kept[v.mark] = true;
        v.thinning_root = prev[p].kept && !v.kept;
        if (v.duplicate) ++dup_so_far;
        cur.push_back(v);
      }
    }
    s.generations.push_back(std::move(cur));
    s.dup.push_back(dup_so_far);
  }
  s.dup.insert(s.dup.begin(), 0);

  for (const auto& gen : s.generations) {
    std::uint64_t zt = 0;
    double cr = 0.0;
    double ct = 0.0;
    for (const auto& v : gen) {
      cr += seq[v.mark];
      if (v.kept) {
        ++zt;
        ct += seq[v.mark];
      }
    }
    s.z_raw.push_back(gen.size());
    s.z_thin.push_back(zt);
    s.c_raw.push_back(cr);
    s.c_thin.push_back(ct);
  }
  return s;
}

double ShellComparison::min_p_value() const noexcept {
  double p = 1.0;
  for (const auto& m : marginals) p = std::min(p, m.chi2.p_value);
  return p;
}

ShellComparison shells_vs_thinned_nr(const CapacitySequence& seq,
                                     const ShellComparisonOptions& opt) {
  const std::size_t t = opt.t;
  if (t < 1) throw std::invalid_argument("shells_vs_thinned_nr: t must be >= 1");
  const std::size_t n = seq.size();
  std::vector<std::uint64_t> nr(opt.reps * t);
  std::vector<std::uint64_t> bfs(opt.reps * t);
  parallel_for(opt.reps, opt.threads, [&](std::size_t r) {
    NROptions o;
    o.dedup = opt.dedup;
    const auto st = simulate_nr(seq, t, derive_seed(opt.seed, {r, 1}), o);
    const auto g = generate_prg(seq, derive_seed(opt.seed, {r, 2}));
    Engine eng = make_engine(opt.seed, {r, 3});
    const auto root = std::uniform_int_distribution<std::size_t>(0, n - 1)(eng);
    const auto sh = shells(g, root, t, seq);
    for (std::size_t k = 1; k <= t; ++k) {
      nr[r * t + k - 1] = st.z_thin[k];
      bfs[r * t + k - 1] = sh.shells[k].size();
    }
  });

  ShellComparison out;
  out.power_warning = opt.reps < 100;
  for (std::size_t k = 1; k <= t; ++k) {
    std::vector<std::uint64_t> a(opt.reps);
    std::vector<std::uint64_t> b(opt.reps);
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t r = 0; r < opt.reps; ++r) {
      a[r] = nr[r * t + k - 1];
      b[r] = bfs[r * t + k - 1];
      ma += static_cast<double>(a[r]);
      mb += static_cast<double>(b[r]);
    }
    MarginalTest m;
    m.generation = k;
    m.chi2 = chi_square_homogeneity(histogram(a), histogram(b));
    m.mean_nr = ma / static_cast<double>(opt.reps);
    m.mean_graph = mb / static_cast<double>(opt.reps);
    if (m.chi2.dof == 0) out.power_warning = true;
    out.marginals.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Capacity-product formula

namespace {

double exact_one_hop_survival(const CapacitySequence& seq) {
  const std::size_t n = seq.size();
  const double l = seq.total();
  const double nn = static_cast<double>(n);
  // Σ_b e^{-s λ_b} = N - Σ_b (1 - e^{-s λ_b}), the second sum vectorised.
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double s = seq[a] / l;
    const double row =
        nn - simd::kernel_row_sum(simd::KernelKind::poissonian, s, seq.values());
    acc += row - std::exp(-s * seq[a]);
  }
  return acc / (nn * (nn - 1.0));
}

std::pair<std::size_t, std::size_t> distinct_pair(std::size_t n, Engine& eng) {
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  const std::size_t a = node(eng);
  std::size_t b = a;
  while (b == a) b = node(eng);
  return {a, b};
}

}  // namespace

Estimate survival_via_capacity_formula(const CapacitySequence& seq, std::size_t t,
                                       std::size_t reps, std::uint64_t seed, unsigned threads) {
  const std::size_t n = seq.size();
  if (n < 2) throw std::domain_error("survival_via_capacity_formula: need N >= 2");
  if (t < 1) throw std::invalid_argument("survival_via_capacity_formula: t must be >= 1");
  if (t == 1) return {exact_one_hop_survival(seq), 0.0};
  if (reps < 1) throw std::invalid_argument("survival_via_capacity_formula: reps must be >= 1");

  const double l = seq.total();
  std::vector<double> weights(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto g = generate_prg(seq, derive_seed(seed, {r, 1}));
    Engine eng = make_engine(seed, {r, 2});
    const auto [a1, a2] = distinct_pair(n, eng);

    std::vector<std::uint8_t> owner(n, 0);
    std::vector<NodeId> front[2] = {{static_cast<NodeId>(a1)}, {static_cast<NodeId>(a2)}};
    owner[a1] = 1;
    owner[a2] = 2;
    std::size_t depth[2] = {0, 0};
    auto capacity = [&](const std::vector<NodeId>& f) {
      double c = 0.0;
      for (NodeId v : f) c += seq[v];
      return c;
    };
    auto expand = [&](int s) {
      std::vector<NodeId> next;
      for (NodeId x : front[s])
        for (NodeId y : g.neighbors(x))
          if (owner[y] == 0) {
            owner[y] = static_cast<std::uint8_t>(s + 1);
            next.push_back(y);
          }
      front[s].swap(next);
      ++depth[s];
    };

    double exponent = 0.0;
    for (std::size_t k = 2; k <= t + 1; ++k) {
      const std::size_t need1 = (k + 1) / 2 - 1;
      const std::size_t need2 = k / 2 - 1;
      while (depth[0] < need1) expand(0);
      while (depth[1] < need2) expand(1);
      exponent += capacity(front[0]) * capacity(front[1]) / l;
    }
    weights[r] = std::exp(-exponent);
  });
  return mean_se(weights);
}

Estimate survival_via_bfs(const CapacitySequence& seq, std::size_t t, std::size_t reps,
                          std::uint64_t seed, unsigned threads) {
  const std::size_t n = seq.size();
  if (n < 2) throw std::domain_error("survival_via_bfs: need N >= 2");
  std::vector<double> hit(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto g = generate_prg(seq, derive_seed(seed, {r, 1}));
    Engine eng = make_engine(seed, {r, 2});
    const auto [a1, a2] = distinct_pair(n, eng);
    hit[r] = bfs_distance(g, a1, a2, static_cast<std::uint32_t>(t)).exceeds(
                 static_cast<std::uint32_t>(t))
                 ? 1.0
                 : 0.0;
  });
  return mean_se(hit);
}

DuplicateStats duplicate_stats(const CapacitySequence& seq, std::size_t t, std::size_t reps,
                               std::uint64_t seed, unsigned threads) {
  if (t < 1) throw std::invalid_argument("duplicate_stats: t must be >= 1");
  if (reps < 1) throw std::invalid_argument("duplicate_stats: reps must be >= 1");
  std::vector<double> dup(reps * t);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto st = simulate_nr(seq, t, derive_seed(seed, {r}));
    for (std::size_t k = 1; k <= t; ++k) dup[r * t + k - 1] = static_cast<double>(st.dup[k]);
  });
  DuplicateStats out;
  for (std::size_t k = 1; k <= t; ++k) {
    std::vector<double> col(reps);
    double empty = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      col[r] = dup[r * t + k - 1];
      if (col[r] == 0.0) empty += 1.0;
    }
    const auto e = mean_se(col);
    out.mean_dup.push_back(e.value);
    out.se_dup.push_back(e.se);
    out.p_empty.push_back(empty / static_cast<double>(reps));
  }
  return out;
}

}  // namespace rgdist

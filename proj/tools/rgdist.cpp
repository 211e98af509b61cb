// rgdist: experiment driver. Every command reads one manifest and writes
// CSV files (plus optional SVG) into the output directory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "rgdist/branching.hpp"
#include "rgdist/capacities.hpp"
#include "rgdist/coupling.hpp"
#include "rgdist/distances.hpp"
#include "rgdist/graphgen.hpp"
#include "rgdist/io.hpp"
#include "rgdist/parallel.hpp"
#include "rgdist/rng.hpp"

namespace fs = std::filesystem;
using namespace rgdist;
using namespace rgdist::cli;

namespace {

// Sub-stream tags under (seed, N, ...).
enum Stream : std::uint64_t { kGraph = 2, kPairs = 3, kW = 4, kCouple = 5, kCoupleReport = 6 };

struct Run {
  Manifest m;
  fs::path out;
  bool svg = false;

  std::string comment() const { return run_comment(m.hash, m.seed); }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + (out / name).string());
    return f;
  }

  void finish(std::ofstream& f, const std::string& name) const {
    f.flush();
    if (!f) throw IoError("write failed for " + (out / name).string());
  }

  /// CSV with the run comment first; body writes the header and rows.
  template <class Body>
  void csv(const std::string& name, Body&& body) const {
    auto f = open(name);
    f << comment();
    body(f);
    finish(f, name);
  }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string tag(std::uint64_t n) { return "N" + std::to_string(n); }

SparseGraph build_graph(const Manifest& m, const CapacitySequence& seq, std::uint64_t n,
                        std::size_t r) {
  const auto kernel = m.connection_kernel();
  const auto s = derive_seed(m.seed, {n, r, kGraph});
  if (kernel.kind() == ConnectionKernel::Kind::poissonian) return generate_prg(seq, s);
  return generate_bernoulli(seq, kernel, s);
}

GraphFactory factory(const Manifest& m, std::uint64_t n) {
  if (m.capacities == CapacityMode::iid)
    return [&m, n](std::size_t r) { return build_graph(m, m.capacities_for(n, r), n, r); };
  auto seq = std::make_shared<CapacitySequence>(m.capacities_for(n, 0));
  return [&m, n, seq](std::size_t r) { return build_graph(m, *seq, n, r); };
}

HopcountSample run_hopcounts(const Run& run, std::uint64_t n, unsigned threads) {
  HopcountOptions opt;
  opt.graphs = run.m.replicates;
  opt.pairs_per_graph = run.m.pairs_per_graph;
  opt.seed = derive_seed(run.m.seed, {n, kPairs});
  opt.cap = run.m.cap;
  opt.nu = run.m.nu();
  opt.threads = threads;
  return sample_hopcounts(factory(run.m, n), opt);
}

std::vector<SurvivalRow> curve_of(const Run& run, const EmpiricalSurvival& s) {
  const std::uint32_t t_max = run.m.t_max.value_or(s.max_finite() + 1);
  if (run.m.conditional && s.finite_count() == 0)
    throw CheckFailure("no finite hopcount sampled; the conditional curve is undefined");
  return s.curve(t_max, run.m.conditional);
}

void write_svg(const Run& run, const std::string& name, const std::vector<SvgSeries>& series,
               std::string_view title, std::string_view y_label) {
  if (!run.svg) return;
  auto f = run.open(name);
  write_svg_polylines(f, series, title, "t", y_label);
  run.finish(f, name);
}

SvgSeries series_of(const std::string& label, const std::vector<SurvivalRow>& rows, int shift) {
  SvgSeries s{label, {}};
  for (const auto& r : rows)
    if (static_cast<int>(r.t) - shift >= 0) s.points.emplace_back(r.t - shift, r.survival);
  return s;
}

// --- commands ----------------------------------------------------------------

int cmd_gen(const Run& run, unsigned threads) {
  for (auto n : run.m.sizes) {
    if (run.m.capacities != CapacityMode::iid)
      run.csv("capacities_" + tag(n) + ".csv",
              [&](std::ostream& o) { write_capacities_csv(o, run.m.capacities_for(n, 0)); });
    parallel_for(run.m.replicates, threads, [&](std::size_t r) {
      const auto seq = run.m.capacities_for(n, r);
      const std::string suffix = tag(n) + "_r" + std::to_string(r);
      if (run.m.capacities == CapacityMode::iid)
        run.csv("capacities_" + suffix + ".csv",
                [&](std::ostream& o) { write_capacities_csv(o, seq); });
      const auto g = build_graph(run.m, seq, n, r);
      run.csv("edges_" + suffix + ".csv", [&](std::ostream& o) { write_edge_list_csv(o, g); });
    });
  }
  return 0;
}

struct HopcountCell {
  std::uint64_t n;
  EmpiricalSurvival survival;
  std::vector<SurvivalRow> rows;
  std::size_t censored;
};

std::vector<HopcountCell> hopcount_cells(const Run& run, unsigned threads) {
  std::vector<HopcountCell> cells;
  for (auto n : run.m.sizes) {
    const auto sample = run_hopcounts(run, n, threads);
    std::size_t censored = 0;
    for (const auto& e : sample.entries) censored += e.distance.status == DistanceStatus::censored;
    EmpiricalSurvival s(sample);
    auto rows = curve_of(run, s);
    run.csv("survival_" + tag(n) + ".csv", [&](std::ostream& o) { write_survival_csv(o, rows); });
    cells.push_back({n, std::move(s), std::move(rows), censored});
  }
  return cells;
}

void write_hopcount_summary(const Run& run, const std::vector<HopcountCell>& cells) {
  const double nu = run.m.nu();
  run.csv("summary.csv", [&](std::ostream& o) {
    o << "n,nu,log_nu_n,sigma,a,graphs,pairs_per_graph,n_total,n_finite,n_censored\n";
    for (const auto& c : cells) {
      const auto sa = sigma_a(static_cast<double>(c.n), nu);
      o << c.n << ',' << num(nu) << ',' << num(std::log(static_cast<double>(c.n)) / std::log(nu))
        << ',' << sa.sigma << ',' << num(sa.a) << ',' << run.m.replicates << ','
        << run.m.pairs_per_graph << ',' << c.survival.total() << ','
        << c.survival.finite_count() << ',' << c.censored << '\n';
    }
  });
}

int cmd_hopcount(const Run& run, unsigned threads) {
  const auto cells = hopcount_cells(run, threads);
  write_hopcount_summary(run, cells);
  std::vector<SvgSeries> series;
  for (const auto& c : cells) series.push_back(series_of("N=" + std::to_string(c.n), c.rows, 0));
  write_svg(run, "survival.svg", series, "hopcount survival",
            run.m.conditional ? "P(H > t | H < inf)" : "P(H > t)");
  return 0;
}

int cmd_figure1(const Run& run, unsigned threads) {
  if (!run.m.conditional) throw ValidationError("figure1 compares conditional curves");
  const auto cells = hopcount_cells(run, threads);
  write_hopcount_summary(run, cells);
  double worst = 0.0;
  run.csv("figure1.csv", [&](std::ostream& o) {
    o << "k,n,shift,deviation\n";
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const int shift = run.m.shift_per_step * static_cast<int>(k);
      const double d = shifted_deviation(cells[0].survival, cells[k].survival, shift,
                                         run.m.level_lo, run.m.level_hi);
      worst = std::max(worst, d);
      o << k << ',' << cells[k].n << ',' << shift << ',' << num(d) << '\n';
    }
  });
  std::vector<SvgSeries> series;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const int shift = run.m.shift_per_step * static_cast<int>(k);
    series.push_back(series_of("N=" + std::to_string(cells[k].n) + " shifted " +
                                   std::to_string(shift),
                               cells[k].rows, shift));
  }
  write_svg(run, "figure1.svg", series, "shifted survival curves", "P(H > t | H < inf)");
  std::cout << "max deviation " << num(worst) << " (threshold " << num(run.m.deviation_threshold)
            << ")\n";
  if (worst > run.m.deviation_threshold)
    throw CheckFailure("shifted curves deviate by " + num(worst));
  return 0;
}

int cmd_bp(const Run& run, unsigned threads) {
  OffspringPair laws;
  double mu = 0.0, nu = 0.0;
  if (run.m.model) {
    laws = limit_offspring_laws(*run.m.model, run.m.n_max);
    mu = run.m.model->mean();
    nu = run.m.model->nu();
  } else {
    laws = offspring_laws(*run.m.file_capacities, run.m.n_max);
    mu = run.m.file_capacities->mean();
    nu = run.m.file_capacities->nu();
  }
  if (!(nu > 1.0)) throw std::domain_error("nu <= 1: the branching process is not supercritical");
  const std::size_t depth =
      run.m.w_depth ? run.m.w_depth : default_w_depth(law_mean(laws.f), law_mean(laws.g));
  LimitLawConfig cfg;
  cfg.mu = mu;
  cfg.nu = nu;
  cfg.w_samples = estimate_W(laws.f, laws.g, depth, run.m.w_samples,
                             derive_seed(run.m.seed, {0, kW}), threads);
  cfg.validate();
  run.csv("w.csv", [&](std::ostream& o) { write_w_csv(o, cfg.w_samples); });

  const auto w = mean_se(cfg.w_samples);
  run.csv("bp_summary.csv", [&](std::ostream& o) {
    o << "mu,nu,depth,w_samples,w_mean,w_se,zero_fraction,extinction_probability\n";
    o << num(mu) << ',' << num(nu) << ',' << depth << ',' << cfg.w_samples.size() << ','
      << num(w.value) << ',' << num(w.se) << ',' << num(1.0 - cfg.survival_fraction()) << ','
      << num(extinction_probability(laws.f, laws.g)) << '\n';
  });

  std::vector<SvgSeries> series;
  for (auto n : run.m.sizes) {
    const double ln = std::log(static_cast<double>(n)) / std::log(nu);
    const int t_max =
        run.m.t_max ? static_cast<int>(*run.m.t_max) : 2 * static_cast<int>(std::ceil(ln)) + 10;
    const auto curve = model_survival_curve(cfg, static_cast<double>(n), 0, t_max);
    run.csv("model_curve_" + tag(n) + ".csv",
            [&](std::ostream& o) { write_limit_curve_csv(o, curve); });
    SvgSeries s{"N=" + std::to_string(n), {}};
    for (const auto& p : curve) s.points.emplace_back(p.t, p.survival);
    series.push_back(std::move(s));
  }
  write_svg(run, "model_curves.svg", series, "limit-law survival", "P(H > t | H < inf)");
  return 0;
}

int cmd_conditions(const Run& run, unsigned) {
  if (!run.m.model) throw ValidationError("conditions needs a model to compare against");
  auto c =
      ConditionConfig::for_model(*run.m.model, run.m.condition_tau, run.m.epsilon, run.m.n_max);
  c.moment_bound = run.m.moment_bound;
  bool all = true;
  run.csv("conditions.csv", [&](std::ostream& o) {
    o << "n,mu_gap,nu_gap,f_tv,g_tv,moment_stat,max_lambda,max_bound,pass\n";
    for (auto n : run.m.sizes) {
      const auto r = check_conditions(run.m.capacities_for(n, 0), c, run.m.n_max);
      all = all && r.pass;
      o << n << ',' << num(r.mu_gap) << ',' << num(r.nu_gap) << ',' << num(r.f_tv) << ','
        << num(r.g_tv) << ',' << num(r.moment_stat) << ',' << num(r.max_lambda) << ','
        << num(r.max_bound) << ',' << (r.pass ? "true" : "false") << '\n';
    }
  });
  if (!all) throw CheckFailure("a capacity sequence fails the regularity conditions");
  return 0;
}

int cmd_couple(const Run& run, unsigned threads) {
  const auto kernel = run.m.connection_kernel();
  run.csv("coupling.csv", [&](std::ostream& o) {
    o << "n,failure,se,mismatch_bound,mismatches,a_n\n";
    for (auto n : run.m.sizes) {
      const auto seq = run.m.capacities_for(n, 0);
      CouplingFailureOptions opt;
      opt.reps = run.m.replicates;
      opt.pairs_per_rep = run.m.pairs_per_graph;
      opt.seed = derive_seed(run.m.seed, {n, kCouple});
      opt.cap = run.m.cap;
      opt.threads = threads;
      const auto e = estimate_coupling_failure(seq, kernel, opt);
      const double bound = mismatch_bound_check(seq, kernel, threads);
      const auto cg =
          coupled_generate(seq, kernel, derive_seed(run.m.seed, {n, kCoupleReport}), run.m.xi);
      run.csv("mismatch_" + tag(n) + ".csv",
              [&](std::ostream& f) { write_mismatch_csv(f, seq, cg.report); });
      auto js = run.open("mismatch_" + tag(n) + ".json");
      write_mismatch_summary_json(js, cg.report);
      run.finish(js, "mismatch_" + tag(n) + ".json");
      o << n << ',' << num(e.value) << ',' << num(e.se) << ',' << num(bound) << ','
        << cg.report.total << ',' << (cg.report.a_n ? "true" : "false") << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distances in rank-1 inhomogeneous random graphs: experiment driver"};
  app.require_subcommand(1);

  std::string manifest_path;
  unsigned threads = 0;
  std::string out_dir;
  bool svg = false;

  using Cmd = int (*)(const Run&, unsigned);
  const std::vector<std::tuple<std::string, std::string, Cmd>> commands{
      {"gen", "write edge lists per (N, replicate)", cmd_gen},
      {"hopcount", "hopcount survival curves per N", cmd_hopcount},
      {"figure1", "ladder curves shifted by a fixed number of hops", cmd_figure1},
      {"bp", "martingale limit samples and limit-law curves", cmd_bp},
      {"conditions", "regularity diagnostics along the N grid", cmd_conditions},
      {"couple", "coupling failure trend against the Poissonian graph", cmd_couple},
  };
  Cmd chosen = nullptr;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--manifest", manifest_path, "manifest JSON file")->required();
    sub->add_option("--threads", threads, "worker threads (overrides the manifest)");
    sub->add_option("--out", out_dir, "output directory (overrides the manifest)");
    sub->add_flag("--svg", svg, "also write SVG plots of the curves");
    sub->callback([&chosen, f = fn] { chosen = f; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Run run{load_manifest(manifest_path), {}, svg};
    run.out = out_dir.empty() ? run.m.output_dir : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec) throw IoError("cannot create " + run.out.string() + ": " + ec.message());
    const unsigned t = threads ? threads : run.m.threads;
    return chosen(run, t);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: manifest: " << e.what() << '\n';
    return 2;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const TruncationError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

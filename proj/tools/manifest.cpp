#include "manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rgdist/distances.hpp"
#include "rgdist/io.hpp"
#include "rgdist/rng.hpp"

namespace rgdist::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys{
    "seed",          "model",        "tau",           "c",
    "lambda",        "points",       "capacities",    "capacity_file",
    "kernel",        "n",            "ladder_m",      "ladder_k_max",
    "ladder_nu",     "replicates",   "pairs_per_graph", "threads",
    "output_dir",    "cap",          "conditional",   "t_max",
    "shift_per_step", "deviation_threshold", "level_lo", "level_hi",
    "w_samples",     "w_depth",      "n_max",         "condition_tau",
    "epsilon",       "moment_bound", "xi"};

[[noreturn]] void fail(const std::string& msg) { throw ValidationError("manifest: " + msg); }

double number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) fail(std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(std::string(key) + " must be finite");
  return x;
}

std::uint64_t count(const json& j, const char* key, std::uint64_t min) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(std::string(key) + " must be a non-negative integer");
  const auto x = v.get<std::uint64_t>();
  if (x < min) fail(std::string(key) + " must be at least " + std::to_string(min));
  return x;
}

SurvivalModel parse_model(const json& j) {
  const auto& m = j.at("model");
  if (!m.is_string()) fail("model must be a string");
  const auto name = m.get<std::string>();
  try {
    if (name == "figure1") return SurvivalModel::figure1();
    if (name == "pareto") return SurvivalModel::pareto(number(j, "tau"), number(j, "c"));
    if (name == "constant") return SurvivalModel::constant(number(j, "lambda"));
    if (name == "table") {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() != 2) fail("points must be [x, survival] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return SurvivalModel::table(std::move(pts));
    }
  } catch (const json::out_of_range& e) {
    fail("model '" + name + "' is missing a parameter (" + e.what() + ")");
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  fail("unknown model '" + name + "'");
}

}  // namespace

double Manifest::nu() const {
  if (model) return model->nu();
  return file_capacities->nu();
}

CapacitySequence Manifest::capacities_for(std::uint64_t n, std::size_t r) const {
  switch (capacities) {
    case CapacityMode::file:
      return *file_capacities;
    case CapacityMode::iid:
      return iid_capacities(*model, n, derive_seed(seed, {n, r, 1}));
    case CapacityMode::deterministic:
      break;
  }
  return deterministic_capacities(*model, n);
}

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) fail("unknown key '" + key + "'");

  Manifest m;
  if (!j.contains("seed")) fail("seed is required");
  m.seed = count(j, "seed", 0);

  json hashed = j;
  hashed.erase("threads");
  hashed.erase("output_dir");
  m.hash = fnv1a64(hashed.dump());

  const bool has_model = j.contains("model"), has_file = j.contains("capacity_file");
  if (has_model == has_file) fail("give exactly one of model and capacity_file");
  if (has_model) {
    m.model = parse_model(j);
    const auto mode = j.value("capacities", std::string("deterministic"));
    if (mode == "deterministic")
      m.capacities = CapacityMode::deterministic;
    else if (mode == "iid")
      m.capacities = CapacityMode::iid;
    else
      fail("capacities must be 'deterministic' or 'iid'");
  } else {
    if (j.contains("capacities")) fail("capacities does not apply to a capacity_file");
    auto path = std::filesystem::path(j.at("capacity_file").get<std::string>());
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) fail("cannot read capacity_file " + path.string());
    try {
      m.file_capacities = read_capacities_csv(in);
    } catch (const std::exception& e) {
      fail(path.string() + ": " + e.what());
    }
    m.capacities = CapacityMode::file;
  }

  if (j.contains("kernel")) {
    m.kernel = j.at("kernel").get<std::string>();
    try {
      (void)kernel_from_name(m.kernel);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  const bool has_list = j.contains("n"), has_ladder = j.contains("ladder_m");
  if (m.capacities == CapacityMode::file) {
    if (has_list || has_ladder) fail("n and ladder_m do not apply to a capacity_file");
    m.sizes = {m.file_capacities->size()};
  } else {
    if (has_list == has_ladder) fail("give exactly one of n and ladder_m");
    if (has_list) {
      if (!j.at("n").is_array() || j.at("n").empty()) fail("n must be a non-empty array");
      for (const auto& v : j.at("n")) {
        if (!v.is_number_unsigned()) fail("n entries must be positive integers");
        m.sizes.push_back(v.get<std::uint64_t>());
      }
    } else {
      m.from_ladder = true;
      m.ladder_nu = j.contains("ladder_nu") ? number(j, "ladder_nu") : m.model->nu();
      if (!(m.ladder_nu > 1.0)) fail("ladder_nu must exceed 1");
      const auto k_max = j.contains("ladder_k_max") ? count(j, "ladder_k_max", 0) : 0;
      try {
        m.sizes = ladder(count(j, "ladder_m", 2), m.ladder_nu, k_max);
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
  }
  for (auto n : m.sizes)
    if (n < 2) fail("every N must be at least 2");

  if (j.contains("replicates")) m.replicates = count(j, "replicates", 1);
  if (j.contains("pairs_per_graph")) m.pairs_per_graph = count(j, "pairs_per_graph", 1);
  if (j.contains("threads")) m.threads = static_cast<unsigned>(count(j, "threads", 1));
  if (j.contains("output_dir")) m.output_dir = j.at("output_dir").get<std::string>();

  if (j.contains("cap")) m.cap = static_cast<std::uint32_t>(count(j, "cap", 1));
  if (j.contains("conditional")) m.conditional = j.at("conditional").get<bool>();
  if (j.contains("t_max")) m.t_max = static_cast<std::uint32_t>(count(j, "t_max", 0));
  if (j.contains("shift_per_step"))
    m.shift_per_step = static_cast<int>(count(j, "shift_per_step", 0));
  if (j.contains("deviation_threshold")) m.deviation_threshold = number(j, "deviation_threshold");
  if (j.contains("level_lo")) m.level_lo = number(j, "level_lo");
  if (j.contains("level_hi")) m.level_hi = number(j, "level_hi");
  if (!(0.0 <= m.level_lo && m.level_lo < m.level_hi && m.level_hi <= 1.0))
    fail("need 0 <= level_lo < level_hi <= 1");

  if (j.contains("w_samples")) m.w_samples = count(j, "w_samples", 1);
  if (j.contains("w_depth")) m.w_depth = count(j, "w_depth", 1);
  if (j.contains("n_max")) m.n_max = count(j, "n_max", 1);

  if (m.model)
    if (const auto* p = std::get_if<SurvivalModel::Pareto>(&m.model->variant()))
      m.condition_tau = p->tau;
  if (j.contains("condition_tau")) m.condition_tau = number(j, "condition_tau");
  if (j.contains("epsilon")) m.epsilon = number(j, "epsilon");
  if (j.contains("moment_bound")) m.moment_bound = number(j, "moment_bound");

  if (j.contains("xi")) m.xi = number(j, "xi");
  if (!(m.xi > 0.0 && m.xi < 1.0)) fail("xi must lie in (0, 1)");
  return m;
}

Manifest load_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read manifest " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), file.parent_path());
}

}  // namespace rgdist::cli

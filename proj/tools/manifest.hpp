#pragma once
// Experiment manifest: a flat JSON object describing one run of the driver.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgdist/capacities.hpp"
#include "rgdist/graphgen.hpp"

namespace rgdist::cli {

/// Bad manifest or command line; exit status 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistical or numeric check flagged by the run; exit status 3.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output that cannot be written; exit status 1.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CapacityMode { deterministic, iid, file };

struct Manifest {
  std::uint64_t seed = 0;
  std::uint64_t hash = 0;  // over everything except threads and output_dir

  std::optional<SurvivalModel> model;
  CapacityMode capacities = CapacityMode::deterministic;
  std::optional<CapacitySequence> file_capacities;
  std::string kernel = "poissonian";

  std::vector<std::uint64_t> sizes;
  bool from_ladder = false;
  double ladder_nu = 0.0;

  std::size_t replicates = 1;
  std::size_t pairs_per_graph = 1;
  unsigned threads = 1;
  std::filesystem::path output_dir = ".";

  // hopcount / figure1
  std::uint32_t cap = 0;
  bool conditional = true;
  std::optional<std::uint32_t> t_max;
  int shift_per_step = 2;
  double deviation_threshold = 0.05;
  double level_lo = 0.05;
  double level_hi = 0.95;

  // bp
  std::size_t w_samples = 10000;
  std::size_t w_depth = 0;  // 0 picks default_w_depth
  std::size_t n_max = 200;

  // conditions
  double condition_tau = 3.5;
  double epsilon = 0.05;
  std::optional<double> moment_bound;

  // couple
  double xi = 0.1;

  /// ν used for logarithms, ladders and the BFS cap: the model's limit, or
  /// ν_N of an explicit capacity file.
  double nu() const;
  /// Capacities for size n and replicate r (r only matters for iid).
  CapacitySequence capacities_for(std::uint64_t n, std::size_t r) const;
  ConnectionKernel connection_kernel() const { return kernel_from_name(kernel); }
};

/// Parses and validates. Relative capacity-file paths are taken from the
/// manifest's directory.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& file);

}  // namespace rgdist::cli

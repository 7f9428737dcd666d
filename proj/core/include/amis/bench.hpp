#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amis/algorithms.hpp"
#include "amis/diagnostics.hpp"
#include "amis/proposals.hpp"
#include "amis/targets.hpp"
#include "amis/types.hpp"

namespace amis::bench {

struct TargetSpec {
  std::string kind;  // gaussian | mixture | banana
  Vector mean;
  Matrix cov;
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  double b = 0.0;
  double sigma1_sq = 1.0;
  std::optional<double> log_constant;

  TargetModel build() const;
};

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Quadratic;
  std::size_t n = 0;
  int iterations = 0;
  std::vector<std::size_t> sizes;
  std::string preset;

  Schedule build() const;
};

// Integrand psi, by kind:
//   monomial  prod_k x_k^powers[k]
//   indicator 1{x[axis] > threshold} (or < with `greater` unset)
//   constant  value
struct IntegrandSpec {
  std::string name;
  std::string kind;
  std::vector<int> powers;
  int axis = 0;
  bool greater = true;
  double threshold = 0.0;
  double value = 1.0;

  PointFunction build() const;
};

struct BenchConfig {
  TargetSpec target;
  FamilySpec family;
  Vector theta1_mean;
  Matrix theta1_cov;
  ScheduleSpec schedule;
  std::vector<std::uint64_t> seeds;
  std::vector<Algorithm> algorithms{Algorithm::NaiveRecycling, Algorithm::OriginalAmis,
                                    Algorithm::ModifiedAmis};
  std::vector<IntegrandSpec> psi;
  Normalization normalization = Normalization::SelfNormalized;
  std::string output = "bench_out";
  int grid_cells = 100;
  double grid_half_width_sd = 5.0;
  std::optional<Vector> grid_lower;
  std::optional<Vector> grid_upper;
};

// Reads an INI-style file: `[section]` headers and `key = value` lines.
// Unknown sections or keys, missing required keys and invalid values are all
// collected and reported together in one ConfigError, each prefixed by its
// key path (e.g. `schedule.N`).
BenchConfig parse_config(const std::filesystem::path& path);
BenchConfig parse_config_string(const std::string& text);

struct BenchOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
  bool traces = false;
  // Fill the wall_ms column. Off by default: timings are the only
  // non-reproducible field.
  bool record_timing = false;
};

struct BenchRow {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::ModifiedAmis;
  std::string status = "ok";
  int iterations = 0;
  std::size_t omega = 0;
  double ess_final = 0.0;
  DistanceReport dist;
  std::vector<double> estimates;
  double theta_error_final = 0.0;
  std::optional<double> wall_ms;
};

struct BenchResult {
  std::vector<std::string> psi_names;
  std::vector<BenchRow> rows;  // sorted by (seed, algorithm letter)
  std::string csv;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> traces;  // file name, contents
};

BenchResult run_benchmark(const BenchConfig& config, const BenchOptions& options = {});

// Writes results.csv, summary.txt and any trace files into `dir`.
void write_outputs(const BenchResult& result, const std::filesystem::path& dir);

// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

// Linear-interpolation quantile (R type 7) of an unsorted sample.
double quantile(std::vector<double> values, double q);

}  // namespace amis::bench

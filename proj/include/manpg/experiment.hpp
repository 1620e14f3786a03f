#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manpg/solvers.hpp"
#include "manpg/spca.hpp"

namespace manpg {

struct DatasetSpec {
  enum class Kind { Random, Synthetic, Csv };
  Kind kind = Kind::Random;
  std::size_t m = 40;
  std::size_t n = 3000;
  std::string csv_path;
  bool center = true;  // CSV only; generated datasets fix their own convention
};

/// One benchmark sweep: dataset × penalty grid × solver variants × seeds.
struct ExperimentSpec {
  DatasetSpec dataset;
  std::size_t p = 4;
  std::vector<double> lambdas = {2.0, 2.5, 3.0};
  std::vector<std::string> variants = {"manpg",   "manpg-ada",   "amanpg",
                                       "manpg-d", "manpg-ada-d", "amanpg-d"};
  std::vector<std::uint64_t> seeds = {0,  1,  2,  3,  4,  5,  6,  7,  8,  9,
                                      10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  std::string out_dir = "results";
  double sparsity_thresh = 1e-5;
  SolverConfig base_config;  // variant/use_diag_weight overridden per run
  int jobs = 1;
};

struct RunRecord {
  std::string variant;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  RunReport report;
};

struct SummaryRecord {
  std::string variant;
  double lambda = 0.0;
  double mean_iter = 0.0;
  double mean_time = 0.0;
  double mean_f = 0.0;
  double mean_eta = 0.0;
  double mean_sparsity = 0.0;
  double mean_variance = 0.0;
  int n_seeds = 0;
  int failures = 0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;          // seed-major, then variant, then lambda
  std::vector<SummaryRecord> summary;   // variant-major, then lambda
};

/// Parses "manpg", "manpg-ada", "amanpg" with an optional "-d" suffix that
/// enables the diagonal weight.
std::pair<Variant, bool> parse_variant(const std::string& name);

/// Builds the dataset matrix for one seed (CSV data ignores the seed) and
/// scales it by 1/√m so the quadratic term measures per-sample variance;
/// λ values of the published protocol refer to this scale.
DenseMatrix prepare_dataset(const DatasetSpec& dataset, std::uint64_t seed);

/// Runs the full sweep. Per-run history CSVs, summary.csv and summary.json
/// are written under spec.out_dir; solver failures are recorded per run and
/// never abort the sweep. Independent runs may execute on spec.jobs threads;
/// record order is deterministic regardless.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace manpg

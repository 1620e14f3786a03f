#include <functional>
#include "manpg/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "manpg/errors.hpp"
#include "manpg/io.hpp"

namespace manpg {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void run_tasks(std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const int count = std::min<int>(jobs, static_cast<int>(tasks.size()));
  workers.reserve(count);
  for (int w = 0; w < count; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
        tasks[i]();
    });
  for (auto& th : workers) th.join();
}

void write_history_csv(const std::string& path, const RunReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("run_experiment: cannot write '" + path + "'");
  out << "k,F,eta_norm,seconds\n";
  for (const HistoryEntry& h : rep.history)
    out << h.k << ',' << format_double(h.f) << ',' << format_double(h.eta_norm) << ','
        << format_double(h.seconds) << '\n';
}

nlohmann::json spec_echo_json(const ExperimentSpec& spec) {
  nlohmann::json echo;
  switch (spec.dataset.kind) {
    case DatasetSpec::Kind::Random:
      echo["dataset"] = "random";
      break;
    case DatasetSpec::Kind::Synthetic:
      echo["dataset"] = "synthetic";
      break;
    case DatasetSpec::Kind::Csv:
      echo["dataset"] = "csv";
      echo["csv_path"] = spec.dataset.csv_path;
      echo["center"] = spec.dataset.center;
      break;
  }
  if (spec.dataset.kind != DatasetSpec::Kind::Csv) {
    echo["m"] = spec.dataset.m;
    echo["n"] = spec.dataset.n;
  }
  echo["p"] = spec.p;
  echo["lambdas"] = spec.lambdas;
  echo["variants"] = spec.variants;
  echo["seeds"] = spec.seeds;
  echo["sparsity_thresh"] = spec.sparsity_thresh;
  echo["max_iters"] = spec.base_config.max_iters;
  echo["mu"] = spec.base_config.mu;
  echo["tau"] = spec.base_config.tau;
  echo["sigma"] = spec.base_config.sigma;
  echo["nu"] = spec.base_config.nu;
  echo["safeguard_period"] = spec.base_config.safeguard_period;
  return echo;
}

}  // namespace

std::pair<Variant, bool> parse_variant(const std::string& name) {
  std::string base = name;
  bool weighted = false;
  if (base.size() > 2 && base.compare(base.size() - 2, 2, "-d") == 0) {
    weighted = true;
    base = base.substr(0, base.size() - 2);
  }
  if (base == "manpg") return {Variant::ManPG, weighted};
  if (base == "manpg-ada") return {Variant::ManPGAda, weighted};
  if (base == "amanpg") return {Variant::AManPG, weighted};
  throw std::invalid_argument(
      "unknown variant '" + name +
      "' (expected manpg, manpg-ada or amanpg, optionally with a -d suffix)");
}

DenseMatrix prepare_dataset(const DatasetSpec& dataset, std::uint64_t seed) {
  DenseMatrix a;
  switch (dataset.kind) {
    case DatasetSpec::Kind::Random:
      a = gen_random_data(dataset.m, dataset.n, seed);
      break;
    case DatasetSpec::Kind::Synthetic:
      a = gen_synthetic_data(dataset.m, dataset.n, seed);
      break;
    case DatasetSpec::Kind::Csv:
      a = load_csv(dataset.csv_path, dataset.center);
      break;
  }
  a *= 1.0 / std::sqrt(static_cast<double>(a.rows()));
  return a;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.lambdas.empty() || spec.variants.empty() || spec.seeds.empty())
    throw std::invalid_argument("run_experiment: lambdas, variants and seeds must be nonempty");
  if (spec.p < 1) throw std::invalid_argument("run_experiment: p must be >= 1");
  for (const std::string& v : spec.variants) parse_variant(v);  // validate upfront

  std::filesystem::create_directories(spec.out_dir);

  ExperimentResult result;
  const std::size_t runs_per_seed = spec.variants.size() * spec.lambdas.size();
  result.runs.resize(spec.seeds.size() * runs_per_seed);

  // CSV data does not depend on the seed; load it once
  DenseMatrix csv_data;
  if (spec.dataset.kind == DatasetSpec::Kind::Csv)
    csv_data = prepare_dataset(spec.dataset, 0);

  for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
    const std::uint64_t seed = spec.seeds[si];
    DenseMatrix data = spec.dataset.kind == DatasetSpec::Kind::Csv
                           ? csv_data
                           : prepare_dataset(spec.dataset, seed);
    SpcaProblem base_problem(std::move(data), spec.lambdas.front());
    StiefelPoint x0 = initial_point(base_problem, spec.p);

    std::vector<std::function<void()>> tasks;
    tasks.reserve(runs_per_seed);
    for (std::size_t vi = 0; vi < spec.variants.size(); ++vi)
      for (std::size_t li = 0; li < spec.lambdas.size(); ++li) {
        const std::size_t slot = si * runs_per_seed + vi * spec.lambdas.size() + li;
        tasks.push_back([&, vi, li, slot, seed] {
          RunRecord& rec = result.runs[slot];
          rec.variant = spec.variants[vi];
          rec.lambda = spec.lambdas[li];
          rec.seed = seed;
          try {
            auto [variant, weighted] = parse_variant(spec.variants[vi]);
            SolverConfig cfg = spec.base_config;
            cfg.variant = variant;
            cfg.use_diag_weight = weighted;
            SpcaProblem prob = base_problem.with_lambda(spec.lambdas[li]);
            rec.report = solve(prob, x0, cfg);
            rec.report.sparsity = sparsity(rec.report.x_final, spec.sparsity_thresh);
            if (rec.report.status == SolveStatus::SubproblemFailure ||
                rec.report.status == SolveStatus::LineSearchFailure) {
              rec.failed = true;
              rec.error = rec.report.status == SolveStatus::SubproblemFailure
                              ? "subproblem solver did not converge"
                              : "line search exhausted";
            }
          } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
          }
        });
      }
    run_tasks(tasks, spec.jobs);
  }

  // per-run history files
  for (const RunRecord& rec : result.runs) {
    if (rec.failed && rec.report.history.empty()) continue;
    const std::string path = spec.out_dir + "/history_" + rec.variant + "_lambda" +
                             format_short(rec.lambda) + "_seed" + std::to_string(rec.seed) +
                             ".csv";
    write_history_csv(path, rec.report);
  }

  // aggregate, variant-major then lambda, averaging over succeeded seeds
  for (const std::string& variant : spec.variants)
    for (double lambda : spec.lambdas) {
      SummaryRecord s;
      s.variant = variant;
      s.lambda = lambda;
      int ok = 0;
      for (const RunRecord& rec : result.runs) {
        if (rec.variant != variant || rec.lambda != lambda) continue;
        ++s.n_seeds;
        if (rec.failed) {
          ++s.failures;
          continue;
        }
        ++ok;
        s.mean_iter += static_cast<double>(rec.report.iters);
        s.mean_time += rec.report.seconds;
        s.mean_f += rec.report.f;
        s.mean_eta += rec.report.eta_norm;
        s.mean_sparsity += rec.report.sparsity;
        s.mean_variance += rec.report.adjusted_variance;
      }
      if (ok > 0) {
        s.mean_iter /= ok;
        s.mean_time /= ok;
        s.mean_f /= ok;
        s.mean_eta /= ok;
        s.mean_sparsity /= ok;
        s.mean_variance /= ok;
      }
      result.summary.push_back(std::move(s));
    }

  std::ofstream csv(spec.out_dir + "/summary.csv");
  csv << "variant,lambda,mean_iter,mean_time,mean_f,mean_eta,mean_sparsity,mean_variance,"
         "n_seeds,failures\n";
  for (const SummaryRecord& s : result.summary)
    csv << s.variant << ',' << format_short(s.lambda) << ',' << format_double(s.mean_iter)
        << ',' << format_double(s.mean_time) << ',' << format_double(s.mean_f) << ','
        << format_double(s.mean_eta) << ',' << format_double(s.mean_sparsity) << ','
        << format_double(s.mean_variance) << ',' << s.n_seeds << ',' << s.failures << '\n';

  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["spec_echo"] = spec_echo_json(spec);
  doc["records"] = nlohmann::json::array();
  for (const SummaryRecord& s : result.summary) {
    doc["records"].push_back({{"variant", s.variant},
                              {"lambda", s.lambda},
                              {"mean_iter", s.mean_iter},
                              {"mean_time", s.mean_time},
                              {"mean_f", s.mean_f},
                              {"mean_eta", s.mean_eta},
                              {"mean_sparsity", s.mean_sparsity},
                              {"mean_variance", s.mean_variance},
                              {"n_seeds", s.n_seeds},
                              {"failures", s.failures}});
  }
  std::ofstream json_out(spec.out_dir + "/summary.json");
  json_out << doc.dump(2) << '\n';

  return result;
}

}  // namespace manpg

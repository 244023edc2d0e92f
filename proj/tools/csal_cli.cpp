#include "csal/error.hpp"
#include "csal/eval.hpp"
#include "csal/log.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace csal;

namespace {

// Thrown for bad arguments that CLI11 cannot catch on its own (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const nlohmann::json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

struct GenerateArgs {
  std::string source;
  Seed seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const GaussianSpec spec = GaussianSpec::is_preset(a.source) ? GaussianSpec::preset(a.source)
                                                              : read_gaussian_spec(a.source);
  const DataMatrix data = generate_gaussian(spec, a.seed);
  if (a.out.empty() || a.out == "-") {
    write_csv(data, std::cout);
  } else {
    auto out = open_out(a.out);
    write_csv(data, out);
  }
  return 0;
}

struct CommonArgs {
  Seed seed = 0;
  std::string labeler = "self-adaptive";
  double percent_a = 60.0;
  double threshold = 0.35;
  int max_iter = 100;
  double tol = 1e-8;
  int k = 0;
  bool no_standardize = false;
  bool ascent_guard = false;
  Seed data_seed = 1;
};

struct RunArgs {
  std::string algorithm;
  std::string dataset;
  std::string out = "run";
  CommonArgs common;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig cfg;
  try {
    cfg.algorithms = {parse_algorithm(a.algorithm)};
    cfg.labelers = {parse_strategy(a.common.labeler)};
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  cfg.datasets = {a.dataset};
  cfg.percent_a_grid = {a.common.percent_a};
  cfg.seeds = {a.common.seed};
  cfg.output = a.out;
  cfg.threshold = a.common.threshold;
  cfg.max_iter = a.common.max_iter;
  cfg.tol = a.common.tol;
  cfg.ascent_guard = a.common.ascent_guard;
  if (a.common.k > 0) cfg.k = a.common.k;
  cfg.dataset_options.standardize_files = !a.common.no_standardize;
  cfg.dataset_options.data_seed = a.common.data_seed;
  cfg.validate();

  const DataMatrix data = resolve_dataset(a.dataset, cfg.dataset_options);
  const Cell cell = expand_grid(cfg).front();
  const CellRun run = run_cell(data, cell, cfg);
  if (!run.row.error.empty()) {
    std::cerr << "error: " << run.row.error << '\n';
    return 1;
  }

  fs::create_directories(cfg.output);
  write_partition_csv(run.partition, cfg.output / "partition.csv");
  if (run.params) save_json(*run.params, cfg.output / "params.json");
  if (run.nb_model) write_json(to_json(*run.nb_model), cfg.output / "model.json");
  {
    std::ofstream trace(cfg.output / "trace.csv");
    if (cell.algorithm.method == Method::csal) write_trace_csv(run.csal_trace, trace);
    else write_likelihood_trace_csv(run.likelihood_trace, trace);
  }
  {
    std::ofstream results(cfg.output / "results.csv");
    write_results_csv({run.row}, results);
  }
  write_json(make_manifest("", cfg), cfg.output / "manifest.json");
  std::cout << format_row(run.row) << '\n';
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string out;
  int workers = 0;
  std::vector<std::string> group_by{"dataset", "algorithm", "labeler", "percent_a"};
};

ExperimentConfig sweep_config(const SweepArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (!a.out.empty()) cfg.output = a.out;
  if (a.workers > 0) cfg.workers = a.workers;
  cfg.validate();
  return cfg;
}

int cmd_sweep(const SweepArgs& a) {
  const ExperimentConfig cfg = sweep_config(a);
  fs::create_directories(cfg.output);
  write_json(make_manifest(a.config, cfg), cfg.output / "manifest.json");
  const auto rows = run_experiments(cfg, verbose() ? &std::clog : nullptr);
  {
    std::ofstream out(cfg.output / "summary.csv");
    write_summary_csv(summarize(rows, a.group_by), out);
  }
  long failed = 0;
  for (const auto& r : rows) failed += !r.error.empty();
  std::cout << rows.size() << " cells, " << failed << " failed; results in " << cfg.output.string() << '\n';
  return !rows.empty() && failed == static_cast<long>(rows.size()) ? 1 : 0;
}

int cmd_bench(const SweepArgs& a) {
  const ExperimentConfig cfg = sweep_config(a);
  fs::create_directories(cfg.output);
  write_json(make_manifest(a.config, cfg), cfg.output / "manifest.json");
  const auto rows = run_bench(cfg, verbose() ? &std::clog : nullptr);
  std::ofstream out(cfg.output / "bench.csv");
  write_bench_table(rows, out);
  write_bench_table(rows, std::cout);
  return 0;
}

struct SummarizeArgs {
  std::string results;
  std::vector<std::string> group_by{"dataset", "algorithm", "labeler", "percent_a"};
  std::string out;
};

int cmd_summarize(const SummarizeArgs& a) {
  SummaryTable table;
  try {
    table = summarize(read_results_csv(a.results), a.group_by);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  if (a.out.empty() || a.out == "-") {
    write_summary_csv(table, std::cout);
  } else {
    auto out = open_out(a.out);
    write_summary_csv(table, out);
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--seed", c.seed, "Seed for every random choice");
  cmd->add_option("--labeler", c.labeler, "distance | entropy | self-adaptive")
      ->check(CLI::IsMember({"distance", "entropy", "self-adaptive", "self_adaptive"}));
  cmd->add_option("-a,--percent-a", c.percent_a, "Percentage of each cluster used as training data")
      ->check(CLI::Range(0.0, 100.0));
  cmd->add_option("--threshold", c.threshold, "Mean silhouette threshold of the self-adaptive labeler");
  cmd->add_option("--max-iter", c.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", c.tol, "Log-likelihood change tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--k", c.k, "Number of clusters (default: number of classes)");
  cmd->add_option("--data-seed", c.data_seed, "Seed for the gdata1/gdata2 presets");
  cmd->add_flag("--no-standardize", c.no_standardize, "Use CSV features as they are");
  cmd->add_flag("--ascent-guard", c.ascent_guard, "Stop CSAL before a step that lowers the likelihood");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering with self-adaptive labeling"};
  app.require_subcommand(1);
  bool verbose_flag = false;
  app.add_flag("-v,--verbose", verbose_flag, "Progress and warnings on stderr");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample a Gaussian dataset (gdata1, gdata2 or a JSON spec)");
  generate->add_option("source", gen.source, "Preset name or spec file")->required();
  generate->add_option("--seed", gen.seed, "Sampling seed");
  generate->add_option("-o,--out", gen.out, "Output CSV (default stdout)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm on one dataset");
  run_cmd->add_option("algorithm", run.algorithm, "kmeans, fcm-cem, gmm-csal, kmeans-nb, ...")->required();
  run_cmd->add_option("dataset", run.dataset, "gdata1, gdata2, a CSV path or a dataset name")->required();
  run_cmd->add_option("-o,--out", run.out, "Output directory");
  add_common(run_cmd, run.common);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment grid from a JSON config");
  sweep_cmd->add_option("config", sweep.config, "Config or manifest file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--out", sweep.out, "Output directory (overrides the config)");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (overrides the config)");
  sweep_cmd->add_option("--group-by", sweep.group_by, "Summary grouping columns");

  SweepArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time a grid: warm-up then median of repeated runs");
  bench_cmd->add_option("config", bench.config, "Config or manifest file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("-o,--out", bench.out, "Output directory (overrides the config)");

  SummarizeArgs sum;
  auto* sum_cmd = app.add_subcommand("summarize", "Aggregate a results.csv");
  sum_cmd->add_option("results", sum.results, "results.csv")->required()->check(CLI::ExistingFile);
  sum_cmd->add_option("--group-by", sum.group_by, "Grouping columns");
  sum_cmd->add_option("-o,--out", sum.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  set_verbose(verbose_flag);

  try {
    if (*generate) return cmd_generate(gen);
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*bench_cmd) return cmd_bench(bench);
    if (*sum_cmd) return cmd_summarize(sum);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

#pragma once

#include "csal/baselines.hpp"
#include "csal/cem.hpp"
#include "csal/clustering.hpp"
#include "csal/csal.hpp"
#include "csal/data.hpp"
#include "csal/labeling.hpp"
#include "csal/partition.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csal {

// ---------------------------------------------------------------------------
// Accuracy

struct Matching {
  std::vector<int> cluster_to_class;  // bijection
  long matches = 0;
};

// K x K counts, rows = predicted cluster, columns = true class.
Eigen::MatrixXi confusion_matrix(const std::vector<int>& predicted, const std::vector<int>& truth,
                                 int k);

// Bijection maximizing the matched count. Exhaustive in lexicographic order
// for K <= 8 (first maximum wins), Hungarian method above that.
Matching best_matching(const Eigen::MatrixXi& confusion);

// Fraction of points whose cluster maps to their true class under the best bijection.
double classification_accuracy(const SoftPartition& predicted, const std::vector<int>& truth);
double classification_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                               int k);

// ---------------------------------------------------------------------------
// Algorithms and datasets

enum class Method { plain, cem, csal, nb };

struct AlgorithmId {
  Clusterer base = Clusterer::kmeans;
  Method method = Method::plain;

  bool uses_labeler() const { return method == Method::csal; }
  friend bool operator==(const AlgorithmId&, const AlgorithmId&) = default;
};

std::string to_string(const AlgorithmId& id);
// "kmeans", "fcm-cem", "gmm-csal", "kmeans-nb", ...; throws ValidationError otherwise.
AlgorithmId parse_algorithm(const std::string& name);

struct DatasetOptions {
  Seed data_seed = 1;
  std::filesystem::path data_dir = CSAL_DATA_DIR;
  bool standardize_files = true;
};

// gdata1/gdata2 are generated (not standardized); anything else is a CSV path
// or the stem of a CSV in data_dir, loaded with the label in the last column
// and z-scored.
DataMatrix resolve_dataset(const std::string& name, const DatasetOptions& options);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  std::vector<std::string> datasets;
  std::vector<AlgorithmId> algorithms;
  std::vector<Strategy> labelers{Strategy::self_adaptive};
  std::vector<double> percent_a_grid{10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::vector<Seed> seeds{0};
  std::filesystem::path output = "results";
  double threshold = 0.35;
  int max_iter = 100;
  double tol = 1e-8;
  int workers = 1;
  int bench_repeats = 3;
  bool ascent_guard = false;
  std::optional<int> k;  // default: number of distinct labels
  DatasetOptions dataset_options;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);
// Accepts a plain config document or a run manifest (uses its "config" entry).
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct Cell {
  std::string dataset;
  AlgorithmId algorithm;
  std::optional<Strategy> labeler;    // CSAL variants only
  std::optional<double> percent_a;    // CSAL variants only
  Seed seed = 0;

  std::string key() const;
};

// Cartesian product over (dataset, algorithm, labeler and A% where they apply, seed).
std::vector<Cell> expand_grid(const ExperimentConfig& cfg);

struct ResultRow {
  std::string dataset;
  std::string algorithm;
  std::string labeler;     // "none" for algorithms without a labeling step
  std::string percent_a;   // empty for algorithms without a labeling step
  Seed seed = 0;
  double accuracy = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  bool converged = false;
  std::string error;       // non-empty for a failed cell

  std::string key() const;
};

inline constexpr const char* kResultsHeader =
    "dataset,algorithm,labeler,percent_a,seed,accuracy,iterations,seconds,converged,error";

std::string format_row(const ResultRow& row);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);
void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);

// Everything one cell produces.
struct CellRun {
  ResultRow row;
  SoftPartition partition;
  std::optional<MixtureParams> params;
  std::optional<NaiveBayesModel> nb_model;
  std::vector<CsalIteration> csal_trace;
  std::vector<double> likelihood_trace;  // CEM, GMM or k-means/FCM objective
};

int resolve_k(const DataMatrix& data, const ExperimentConfig& cfg);

// Runs one cell; a failure is reported in row.error rather than thrown.
// Wall-clock covers only the algorithm call.
CellRun run_cell(const DataMatrix& data, const Cell& cell, const ExperimentConfig& cfg);

// Runs every grid cell not already present in <output>/results.csv, appending
// rows in grid order as they complete. Returns all rows in grid order.
std::vector<ResultRow> run_experiments(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Summaries

struct SummaryTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Per group: n, mean, median and sample std of accuracy and seconds (error rows excluded).
// Group columns are any of dataset, algorithm, labeler, percent_a, seed.
SummaryTable summarize(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_by);
void write_summary_csv(const SummaryTable& table, std::ostream& out);

// ---------------------------------------------------------------------------
// Timing

struct BenchRow {
  std::string dataset;
  std::string algorithm;
  double seconds = 0.0;  // median over seeds of the median of the repetitions
};

// One warm-up run, then cfg.bench_repeats timed runs per (dataset, algorithm, seed).
// CSAL variants use the first labeler and the first A% of the config.
std::vector<BenchRow> run_bench(const ExperimentConfig& cfg, std::ostream* log = nullptr);
// algorithm,<dataset1>,<dataset2>,...
void write_bench_table(const std::vector<BenchRow>& rows, std::ostream& out);

// Manifest written next to every sweep/bench output.
nlohmann::json make_manifest(const std::filesystem::path& config_path, const ExperimentConfig& cfg);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace csal

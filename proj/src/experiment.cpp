#include "csal/error.hpp"
#include "csal/eval.hpp"
#include "csal/log.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace csal {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

template <typename T>
std::vector<T> one_or_many(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ValidationError("config: datasets must not be empty");
  if (algorithms.empty()) throw ValidationError("config: algorithms must not be empty");
  if (labelers.empty()) throw ValidationError("config: labelers must not be empty");
  if (percent_a_grid.empty()) throw ValidationError("config: percent_a_grid must not be empty");
  if (seeds.empty()) throw ValidationError("config: seeds must not be empty");
  for (double a : percent_a_grid)
    if (!(a > 0.0 && a <= 100.0)) throw ValidationError("config: A% values must lie in (0, 100]");
  if (!(threshold >= -1.0 && threshold <= 1.0)) throw ValidationError("config: threshold must lie in [-1, 1]");
  if (max_iter < 1) throw ValidationError("config: max_iter must be positive");
  if (!(tol > 0.0)) throw ValidationError("config: tol must be positive");
  if (workers < 1) throw ValidationError("config: workers must be positive");
  if (bench_repeats < 1) throw ValidationError("config: bench_repeats must be positive");
  if (k && *k < 1) throw ValidationError("config: k must be positive");
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  try {
    if (doc.contains("datasets")) cfg.datasets = one_or_many<std::string>(doc.at("datasets"));
    else cfg.datasets = one_or_many<std::string>(doc.at("dataset"));
    cfg.algorithms.clear();
    for (const auto& a : one_or_many<std::string>(doc.at("algorithms"))) cfg.algorithms.push_back(parse_algorithm(a));
    if (doc.contains("labelers")) {
      cfg.labelers.clear();
      for (const auto& s : one_or_many<std::string>(doc.at("labelers"))) cfg.labelers.push_back(parse_strategy(s));
    }
    if (doc.contains("percent_a_grid")) cfg.percent_a_grid = one_or_many<double>(doc.at("percent_a_grid"));
    if (doc.contains("seeds")) cfg.seeds = one_or_many<Seed>(doc.at("seeds"));
    if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
    if (doc.contains("threshold")) cfg.threshold = doc.at("threshold").get<double>();
    if (doc.contains("max_iter")) cfg.max_iter = doc.at("max_iter").get<int>();
    if (doc.contains("tol")) cfg.tol = doc.at("tol").get<double>();
    if (doc.contains("workers")) cfg.workers = doc.at("workers").get<int>();
    if (doc.contains("bench_repeats")) cfg.bench_repeats = doc.at("bench_repeats").get<int>();
    if (doc.contains("ascent_guard")) cfg.ascent_guard = doc.at("ascent_guard").get<bool>();
    if (doc.contains("k") && !doc.at("k").is_null()) cfg.k = doc.at("k").get<int>();
    if (doc.contains("data_seed")) cfg.dataset_options.data_seed = doc.at("data_seed").get<Seed>();
    if (doc.contains("data_dir")) cfg.dataset_options.data_dir = doc.at("data_dir").get<std::string>();
    if (doc.contains("standardize")) cfg.dataset_options.standardize_files = doc.at("standardize").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json doc;
  doc["datasets"] = cfg.datasets;
  auto& algos = doc["algorithms"] = nlohmann::json::array();
  for (const auto& a : cfg.algorithms) algos.push_back(to_string(a));
  auto& labelers = doc["labelers"] = nlohmann::json::array();
  for (auto s : cfg.labelers) labelers.push_back(to_string(s));
  doc["percent_a_grid"] = cfg.percent_a_grid;
  doc["seeds"] = cfg.seeds;
  doc["output"] = cfg.output.string();
  doc["threshold"] = cfg.threshold;
  doc["max_iter"] = cfg.max_iter;
  doc["tol"] = cfg.tol;
  doc["workers"] = cfg.workers;
  doc["bench_repeats"] = cfg.bench_repeats;
  doc["ascent_guard"] = cfg.ascent_guard;
  doc["k"] = cfg.k ? nlohmann::json(*cfg.k) : nlohmann::json(nullptr);
  doc["data_seed"] = cfg.dataset_options.data_seed;
  doc["data_dir"] = cfg.dataset_options.data_dir.string();
  doc["standardize"] = cfg.dataset_options.standardize_files;
  return doc;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (doc.contains("config") && doc.at("config").is_object()) return experiment_config_from_json(doc.at("config"));
  return experiment_config_from_json(doc);
}

std::string Cell::key() const {
  return dataset + '|' + to_string(algorithm) + '|' + (labeler ? to_string(*labeler) : "none") + '|' +
         (percent_a ? shortest(*percent_a) : "") + '|' + std::to_string(seed);
}

std::string ResultRow::key() const {
  return dataset + '|' + algorithm + '|' + labeler + '|' + percent_a + '|' + std::to_string(seed);
}

std::vector<Cell> expand_grid(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (const auto& dataset : cfg.datasets)
    for (const auto& algo : cfg.algorithms) {
      if (algo.uses_labeler()) {
        for (auto labeler : cfg.labelers)
          for (double a : cfg.percent_a_grid)
            for (auto seed : cfg.seeds) cells.push_back({dataset, algo, labeler, a, seed});
      } else {
        for (auto seed : cfg.seeds) cells.push_back({dataset, algo, std::nullopt, std::nullopt, seed});
      }
    }
  return cells;
}

std::string format_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.dataset << ',' << r.algorithm << ',' << r.labeler << ',' << r.percent_a << ',' << r.seed << ','
      << shortest(r.accuracy) << ',' << r.iterations << ',' << shortest(r.seconds) << ','
      << (r.converged ? "true" : "false") << ',' << sanitize(r.error);
  return out.str();
}

namespace {

bool parse_row(const std::string& line, ResultRow& row) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 10) return false;
  try {
    row.dataset = f[0];
    row.algorithm = f[1];
    row.labeler = f[2];
    row.percent_a = f[3];
    row.seed = std::stoull(f[4]);
    row.accuracy = std::stod(f[5]);
    row.iterations = std::stoi(f[6]);
    row.seconds = std::stod(f[7]);
    if (f[8] != "true" && f[8] != "false") return false;
    row.converged = f[8] == "true";
    row.error = f[9];
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ResultRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line == kResultsHeader) continue;
    }
    ResultRow row;
    if (parse_row(line, row)) rows.push_back(std::move(row));
  }
  return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

int resolve_k(const DataMatrix& data, const ExperimentConfig& cfg) {
  if (cfg.k) return *cfg.k;
  if (!data.has_labels()) throw ValidationError("dataset has no labels; set k explicitly");
  return data.num_classes();
}

CellRun run_cell(const DataMatrix& data, const Cell& cell, const ExperimentConfig& cfg) {
  CellRun run;
  auto& row = run.row;
  row.dataset = cell.dataset;
  row.algorithm = to_string(cell.algorithm);
  row.labeler = cell.labeler ? to_string(*cell.labeler) : "none";
  row.percent_a = cell.percent_a ? shortest(*cell.percent_a) : "";
  row.seed = cell.seed;

  const auto start = std::chrono::steady_clock::now();
  try {
    ClusterConfig cc;
    cc.k = resolve_k(data, cfg);
    cc.seed = cell.seed;

    switch (cell.algorithm.method) {
      case Method::plain: {
        if (cell.algorithm.base == Clusterer::gmm) {
          auto [partition, params] = gmm_em(data, cc);
          run.partition = std::move(partition);
          run.params = std::move(params);
        } else {
          run.partition = run_clusterer(cell.algorithm.base, data, cc);
        }
        run.likelihood_trace = run.partition.objective_trace;
        row.iterations = run.partition.iterations;
        row.converged = run.partition.converged;
        break;
      }
      case Method::cem: {
        const SoftPartition init = run_clusterer(cell.algorithm.base, data, cc);
        ClusterConfig cem_cfg = cc;
        cem_cfg.max_iter = cfg.max_iter;
        auto result = cem_run(data, init, cem_cfg);
        run.partition = std::move(result.partition);
        run.params = std::move(result.params);
        run.likelihood_trace = std::move(result.trace);
        row.iterations = result.iterations;
        row.converged = result.converged;
        break;
      }
      case Method::csal: {
        CsalConfig csal_cfg;
        csal_cfg.clusterer = cell.algorithm.base;
        csal_cfg.labeler.strategy = cell.labeler.value_or(Strategy::self_adaptive);
        csal_cfg.labeler.percent_a = cell.percent_a.value_or(60.0);
        csal_cfg.labeler.silhouette_threshold = cfg.threshold;
        csal_cfg.k = cc.k;
        csal_cfg.max_iter = cfg.max_iter;
        csal_cfg.tol = cfg.tol;
        csal_cfg.seed = cell.seed;
        csal_cfg.ascent_guard = cfg.ascent_guard;
        auto result = csal_run(data, csal_cfg);
        run.partition = std::move(result.partition);
        run.params = std::move(result.params);
        run.csal_trace = std::move(result.trace);
        row.iterations = result.iterations;
        row.converged = result.converged;
        break;
      }
      case Method::nb: {
        const SoftPartition init = run_clusterer(cell.algorithm.base, data, cc);
        LabeledSubset all;
        all.k = init.k();
        all.labels = init.hard;
        all.selected.assign(init.size(), 1);
        run.nb_model = nb_train(data, all);
        run.partition = nb_classify(*run.nb_model, data);
        row.iterations = init.iterations;
        row.converged = init.converged;
        break;
      }
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (data.has_labels()) row.accuracy = classification_accuracy(run.partition, data.labels);
  } catch (const std::exception& e) {
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.error = e.what();
    row.accuracy = 0.0;
    row.converged = false;
    warn("cell " + cell.key() + " failed: " + e.what());
  }
  row.seconds = std::max(row.seconds, 1e-9);
  return run;
}

namespace {

class DatasetCache {
 public:
  explicit DatasetCache(const DatasetOptions& options) : options_(options) {}

  // Returns nullptr and fills `error` when the dataset cannot be resolved.
  const DataMatrix* get(const std::string& name, std::string& error) {
    auto it = cache_.find(name);
    if (it == cache_.end()) {
      Entry e;
      try {
        e.data = resolve_dataset(name, options_);
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
      it = cache_.emplace(name, std::move(e)).first;
    }
    error = it->second.error;
    return error.empty() ? &it->second.data : nullptr;
  }

 private:
  struct Entry {
    DataMatrix data;
    std::string error;
  };
  DatasetOptions options_;
  std::map<std::string, Entry> cache_;
};

ResultRow error_row(const Cell& cell, const std::string& error) {
  ResultRow row;
  row.dataset = cell.dataset;
  row.algorithm = to_string(cell.algorithm);
  row.labeler = cell.labeler ? to_string(*cell.labeler) : "none";
  row.percent_a = cell.percent_a ? shortest(*cell.percent_a) : "";
  row.seed = cell.seed;
  row.seconds = 1e-9;
  row.error = error;
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiments(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output);
  const auto results_path = cfg.output / "results.csv";

  std::map<std::string, ResultRow> done;
  if (std::filesystem::exists(results_path))
    for (auto& row : read_results_csv(results_path)) done.emplace(row.key(), std::move(row));

  const auto cells = expand_grid(cfg);
  std::vector<std::size_t> pending;
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (!done.contains(cells[c].key())) pending.push_back(c);
  if (log) *log << cells.size() << " cells, " << cells.size() - pending.size() << " already complete\n";

  // Rewrite the file with only the complete rows so an interrupted line is dropped.
  {
    std::vector<ResultRow> kept;
    for (const auto& cell : cells)
      if (auto it = done.find(cell.key()); it != done.end()) kept.push_back(it->second);
    std::ofstream out(results_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + results_path.string());
    write_results_csv(kept, out);
  }

  DatasetCache datasets(cfg.dataset_options);
  for (const auto& name : cfg.datasets) {
    std::string error;
    datasets.get(name, error);
  }

  std::vector<std::optional<ResultRow>> finished(pending.size());
  std::mutex mutex;
  std::size_t next_task = 0;
  std::size_t next_commit = 0;
  std::ofstream sink(results_path, std::ios::app);

  auto worker = [&] {
    while (true) {
      std::size_t task;
      {
        std::lock_guard lock(mutex);
        if (next_task >= pending.size()) return;
        task = next_task++;
      }
      const Cell& cell = cells[pending[task]];
      std::string error;
      const DataMatrix* data;
      {
        std::lock_guard lock(mutex);
        data = datasets.get(cell.dataset, error);
      }
      ResultRow row = data ? run_cell(*data, cell, cfg).row : error_row(cell, error);

      std::lock_guard lock(mutex);
      finished[task] = std::move(row);
      // Commit in grid order so the file layout does not depend on scheduling.
      while (next_commit < finished.size() && finished[next_commit]) {
        sink << format_row(*finished[next_commit]) << '\n' << std::flush;
        if (log) *log << "  " << cells[pending[next_commit]].key() << "  accuracy "
                      << shortest(finished[next_commit]->accuracy) << '\n';
        ++next_commit;
      }
    }
  };

  const int nthreads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(pending.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  std::vector<ResultRow> all;
  all.reserve(cells.size());
  std::size_t p = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (p < pending.size() && pending[p] == c) all.push_back(*finished[p++]);
    else all.push_back(done.at(cells[c].key()));
  }
  return all;
}

namespace {

struct Stats {
  double mean = 0, median = 0, std = 0;
};

Stats stats_of(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  const double n = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= n;
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(s.std / (n - 1.0)) : 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return s;
}

std::string column_of(const ResultRow& r, const std::string& column) {
  if (column == "dataset") return r.dataset;
  if (column == "algorithm") return r.algorithm;
  if (column == "labeler") return r.labeler;
  if (column == "percent_a") return r.percent_a;
  if (column == "seed") return std::to_string(r.seed);
  throw ValidationError("cannot group by unknown column '" + column + "'");
}

}  // namespace

SummaryTable summarize(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_by) {
  static const ResultRow probe{};
  for (const auto& c : group_by) column_of(probe, c);

  SummaryTable table;
  table.header = group_by;
  for (const char* h : {"n", "accuracy_mean", "accuracy_median", "accuracy_std", "seconds_mean", "seconds_median",
                        "seconds_std"})
    table.header.emplace_back(h);

  std::vector<std::vector<std::string>> keys;
  std::map<std::vector<std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : rows) {
    std::vector<std::string> key;
    for (const auto& c : group_by) key.push_back(column_of(r, c));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    if (!r.error.empty()) continue;
    it->second.first.push_back(r.accuracy);
    it->second.second.push_back(r.seconds);
  }
  for (const auto& key : keys) {
    const auto& [acc, sec] = groups.at(key);
    std::vector<std::string> out = key;
    out.push_back(std::to_string(acc.size()));
    for (const auto* metric : {&acc, &sec}) {
      if (metric->empty()) {
        out.insert(out.end(), {"", "", ""});
        continue;
      }
      const Stats s = stats_of(*metric);
      out.push_back(shortest(s.mean));
      out.push_back(shortest(s.median));
      out.push_back(shortest(s.std));
    }
    table.rows.push_back(std::move(out));
  }
  return table;
}

void write_summary_csv(const SummaryTable& table, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

std::vector<BenchRow> run_bench(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  DatasetCache datasets(cfg.dataset_options);
  std::vector<BenchRow> rows;
  for (const auto& name : cfg.datasets) {
    std::string error;
    const DataMatrix* data = datasets.get(name, error);
    if (!data) throw ValidationError(error);
    for (const auto& algo : cfg.algorithms) {
      std::vector<double> per_seed;
      for (auto seed : cfg.seeds) {
        Cell cell{name, algo, std::nullopt, std::nullopt, seed};
        if (algo.uses_labeler()) {
          cell.labeler = cfg.labelers.front();
          cell.percent_a = cfg.percent_a_grid.front();
        }
        const auto warmup = run_cell(*data, cell, cfg);
        if (!warmup.row.error.empty()) throw Error("bench cell " + cell.key() + " failed: " + warmup.row.error);
        std::vector<double> times;
        for (int r = 0; r < cfg.bench_repeats; ++r) times.push_back(run_cell(*data, cell, cfg).row.seconds);
        per_seed.push_back(stats_of(times).median);
      }
      rows.push_back({name, to_string(algo), stats_of(per_seed).median});
      if (log) *log << "  " << name << " " << to_string(algo) << "  " << shortest(rows.back().seconds) << " s\n";
    }
  }
  return rows;
}

void write_bench_table(const std::vector<BenchRow>& rows, std::ostream& out) {
  std::vector<std::string> datasets, algorithms;
  for (const auto& r : rows) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
      algorithms.push_back(r.algorithm);
  }
  out << "algorithm";
  for (const auto& d : datasets) out << ',' << d;
  out << '\n';
  for (const auto& a : algorithms) {
    out << a;
    for (const auto& d : datasets) {
      out << ',';
      for (const auto& r : rows)
        if (r.algorithm == a && r.dataset == d) out << shortest(r.seconds);
    }
    out << '\n';
  }
}

nlohmann::json make_manifest(const std::filesystem::path& config_path, const ExperimentConfig& cfg) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  nlohmann::json doc;
  doc["tool"] = "csal";
  doc["version"] = kToolVersion;
  doc["config_path"] = config_path.string();
  doc["timestamp"] = stamp;
  doc["config"] = to_json(cfg);
  return doc;
}

}  // namespace csal

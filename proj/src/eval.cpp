#include "csal/eval.hpp"

#include "csal/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace csal {

Eigen::MatrixXi confusion_matrix(const std::vector<int>& predicted, const std::vector<int>& truth, int k) {
  if (predicted.size() != truth.size()) throw ValidationError("prediction and truth lengths differ");
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || predicted[i] >= k || truth[i] < 0 || truth[i] >= k)
      throw ValidationError("label outside [0, K)");
    ++c(predicted[i], truth[i]);
  }
  return c;
}

namespace {

// Minimum-cost assignment (rows to columns) for a square cost matrix.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

Matching best_matching(const Eigen::MatrixXi& confusion) {
  const int k = static_cast<int>(confusion.rows());
  if (confusion.cols() != k) throw ValidationError("confusion matrix must be square");
  Matching best;
  if (k <= 8) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    best.matches = -1;
    do {
      long total = 0;
      for (int l = 0; l < k; ++l) total += confusion(l, perm[l]);
      if (total > best.matches) {
        best.matches = total;
        best.cluster_to_class = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  const Eigen::MatrixXd cost = (confusion.maxCoeff() - confusion.array()).cast<double>().matrix();
  best.cluster_to_class = hungarian(cost);
  for (int l = 0; l < k; ++l) best.matches += confusion(l, best.cluster_to_class[l]);
  return best;
}

double classification_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth, int k) {
  if (truth.empty()) throw ValidationError("accuracy needs ground-truth labels");
  if (predicted.size() != truth.size()) throw ValidationError("prediction and truth lengths differ");
  // Dense ids for the truth classes, in sorted order of their values.
  std::map<int, int> dense;
  for (int t : truth) dense.emplace(t, 0);
  if (static_cast<int>(dense.size()) != k)
    throw ValidationError("predicted K = " + std::to_string(k) + " but truth has " + std::to_string(dense.size()) +
                          " classes");
  int next = 0;
  for (auto& [value, id] : dense) id = next++;
  std::vector<int> t(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) t[i] = dense[truth[i]];
  const auto match = best_matching(confusion_matrix(predicted, t, k));
  return static_cast<double>(match.matches) / static_cast<double>(truth.size());
}

double classification_accuracy(const SoftPartition& predicted, const std::vector<int>& truth) {
  return classification_accuracy(predicted.hard, truth, predicted.k());
}

std::string to_string(const AlgorithmId& id) {
  std::string s = to_string(id.base);
  switch (id.method) {
    case Method::plain: break;
    case Method::cem: s += "-cem"; break;
    case Method::csal: s += "-csal"; break;
    case Method::nb: s += "-nb"; break;
  }
  return s;
}

AlgorithmId parse_algorithm(const std::string& name) {
  const auto dash = name.find('-');
  AlgorithmId id;
  try {
    id.base = parse_clusterer(name.substr(0, dash));
  } catch (const ValidationError&) {
    throw ValidationError("unknown algorithm '" + name + "'");
  }
  if (dash == std::string::npos) return id;
  const std::string suffix = name.substr(dash + 1);
  if (suffix == "cem") id.method = Method::cem;
  else if (suffix == "csal") id.method = Method::csal;
  else if (suffix == "nb") id.method = Method::nb;
  else throw ValidationError("unknown algorithm '" + name + "'");
  return id;
}

DataMatrix resolve_dataset(const std::string& name, const DatasetOptions& options) {
  if (GaussianSpec::is_preset(name)) return generate_gaussian(GaussianSpec::preset(name), options.data_seed);
  std::filesystem::path path = name;
  if (!std::filesystem::exists(path)) {
    const auto candidate = options.data_dir / (name + ".csv");
    if (!std::filesystem::exists(candidate))
      throw ValidationError("dataset '" + name + "' is neither a preset nor a readable CSV");
    path = candidate;
  }
  DataMatrix data = load_csv(path);
  return options.standardize_files ? standardize(data) : data;
}

}  // namespace csal

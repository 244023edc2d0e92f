#include "csal/labeling.hpp"

#include "csal/error.hpp"
#include "csal/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace csal {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::distance: return "distance";
    case Strategy::entropy: return "entropy";
    case Strategy::self_adaptive: return "self_adaptive";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "distance") return Strategy::distance;
  if (name == "entropy") return Strategy::entropy;
  if (name == "self_adaptive" || name == "self-adaptive") return Strategy::self_adaptive;
  throw ValidationError("unknown labeler '" + name + "' (expected distance, entropy or self-adaptive)");
}

void LabelerConfig::validate() const {
  if (!(percent_a > 0.0 && percent_a <= 100.0)) throw ValidationError("A% must lie in (0, 100]");
  if (!(silhouette_threshold >= -1.0 && silhouette_threshold <= 1.0))
    throw ValidationError("silhouette threshold must lie in [-1, 1]");
  if (silhouette_sample < 2) throw ValidationError("silhouette sample size must be at least 2");
}

Eigen::MatrixXd LabeledSubset::lambda() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), k);
  for (Eigen::Index i = 0; i < size(); ++i)
    if (selected[i]) m(i, labels[i]) = 1.0;
  return m;
}

std::size_t LabeledSubset::count() const {
  return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), char{1}));
}

std::vector<int> LabeledSubset::selected_per_cluster() const {
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < size(); ++i)
    if (selected[i]) ++counts[labels[i]];
  return counts;
}

int quota(double percent_a, int cluster_size) {
  if (cluster_size <= 0) return 0;
  // The small offset keeps exact products such as 60% of 5 from rounding up.
  const double q = std::ceil(percent_a * cluster_size / 100.0 - 1e-9);
  return std::clamp(static_cast<int>(q), 1, cluster_size);
}

double entropy(std::span<const double> probs) {
  constexpr double eps = 1e-12;
  double sum = 0.0;
  double h = 0.0;
  for (double p : probs) {
    if (!(p >= -eps && p <= 1.0 + eps)) throw ValidationError("probability outside [0, 1]");
    sum += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (probs.empty() || std::abs(sum - 1.0) > 1e-9) throw ValidationError("probabilities do not sum to 1");
  return std::max(h, 0.0);
}

double entropy(const Eigen::Ref<const Eigen::RowVectorXd>& probs) {
  const Eigen::RowVectorXd copy = probs;
  return entropy(std::span<const double>(copy.data(), static_cast<std::size_t>(copy.size())));
}

namespace {

void check_partition(const SoftPartition& partition, Eigen::Index n) {
  if (partition.size() != n || static_cast<Eigen::Index>(partition.hard.size()) != n)
    throw ValidationError("partition does not match the data size");
}

int nonempty_clusters(const std::vector<int>& sizes) {
  return static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](int s) { return s > 0; }));
}

double silhouette_from_sums(const Eigen::Ref<const Eigen::RowVectorXd>& sums, int own, const std::vector<int>& sizes) {
  if (sizes[own] <= 1) return 0.0;
  const double a = sums(own) / (sizes[own] - 1);
  double b = std::numeric_limits<double>::infinity();
  for (int l = 0; l < static_cast<int>(sizes.size()); ++l)
    if (l != own && sizes[l] > 0) b = std::min(b, sums(l) / sizes[l]);
  const double scale = std::max(a, b);
  return scale > 0.0 ? (b - a) / scale : 0.0;
}

std::vector<int> sizes_of(const std::vector<int>& hard, int k) {
  std::vector<int> sizes(k, 0);
  for (int h : hard) ++sizes[h];
  return sizes;
}

}  // namespace

Eigen::VectorXd silhouettes(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k) {
  const auto sizes = sizes_of(hard, k);
  if (nonempty_clusters(sizes) < 2) throw ValidationError("silhouette needs at least two non-empty clusters");
  Eigen::MatrixXd sums;
  kernels::cluster_distance_sums(points, hard, k, sums);
  Eigen::VectorXd s(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) s(i) = silhouette_from_sums(sums.row(i), hard[i], sizes);
  return s;
}

double silhouette(const DataMatrix& data, const SoftPartition& partition, Eigen::Index i) {
  check_partition(partition, data.size());
  if (i < 0 || i >= data.size()) throw ValidationError("point index out of range");
  const int k = partition.k();
  const auto sizes = sizes_of(partition.hard, k);
  if (k < 2 || nonempty_clusters(sizes) < 2) throw ValidationError("silhouette needs at least two non-empty clusters");
  Eigen::RowVectorXd sums = Eigen::RowVectorXd::Zero(k);
  for (Eigen::Index j = 0; j < data.size(); ++j)
    if (j != i) sums(partition.hard[j]) += (data.points.row(i) - data.points.row(j)).norm();
  return silhouette_from_sums(sums, partition.hard[i], sizes);
}

double mean_silhouette(const DataMatrix& data, const SoftPartition& partition, int l) {
  check_partition(partition, data.size());
  if (l < 0 || l >= partition.k()) throw ValidationError("cluster index out of range");
  const auto sizes = sizes_of(partition.hard, partition.k());
  if (sizes[l] == 0) throw ValidationError("mean silhouette of empty cluster " + std::to_string(l));
  const Eigen::VectorXd s = silhouettes(data.points, partition.hard, partition.k());
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    if (partition.hard[i] == l) total += s(i);
  return total / sizes[l];
}

std::vector<double> mean_silhouettes(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k,
                                     Eigen::Index sample_limit) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> sample;
  if (n <= sample_limit) {
    sample.resize(n);
    std::iota(sample.begin(), sample.end(), Eigen::Index{0});
  } else {
    for (Eigen::Index j = 0; j < sample_limit; ++j) sample.push_back(j * n / sample_limit);
    // Every non-empty cluster keeps at least one representative.
    std::vector<char> present(k, 0);
    for (auto i : sample) present[hard[i]] = 1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!present[hard[i]]) {
        present[hard[i]] = 1;
        sample.push_back(i);
      }
    std::sort(sample.begin(), sample.end());
  }

  Eigen::MatrixXd sub(static_cast<Eigen::Index>(sample.size()), points.cols());
  std::vector<int> sub_hard(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    sub.row(j) = points.row(sample[j]);
    sub_hard[j] = hard[sample[j]];
  }
  const Eigen::VectorXd s = silhouettes(sub, sub_hard, k);
  std::vector<double> total(k, 0.0);
  std::vector<int> count(k, 0);
  for (std::size_t j = 0; j < sample.size(); ++j) {
    total[sub_hard[j]] += s(j);
    ++count[sub_hard[j]];
  }
  std::vector<double> ms(k, 0.0);
  for (int l = 0; l < k; ++l) ms[l] = count[l] ? total[l] / count[l] : 0.0;
  return ms;
}

namespace {

std::vector<std::vector<Eigen::Index>> members_of(const SoftPartition& partition) {
  std::vector<std::vector<Eigen::Index>> members(partition.k());
  for (Eigen::Index i = 0; i < partition.size(); ++i) members[partition.hard[i]].push_back(i);
  return members;
}

LabeledSubset empty_subset(const SoftPartition& partition) {
  LabeledSubset subset;
  subset.selected.assign(partition.size(), 0);
  subset.labels = partition.hard;
  subset.k = partition.k();
  subset.branch.assign(partition.k(), Strategy::distance);
  return subset;
}

// Marks the q members with the smallest key (ties by point index) as selected.
void select_lowest(const std::vector<Eigen::Index>& members, const std::vector<double>& key, int q,
                   LabeledSubset& subset) {
  std::vector<Eigen::Index> order = members;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return key[a] < key[b]; });
  for (int j = 0; j < q; ++j) subset.selected[order[j]] = 1;
}

std::vector<double> center_distances(const DataMatrix& data, const SoftPartition& partition) {
  if (partition.centers.rows() != partition.k() || partition.centers.cols() != data.dim())
    throw ValidationError("partition has no usable cluster centers");
  std::vector<double> dist(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    dist[i] = (data.points.row(i) - partition.centers.row(partition.hard[i])).norm();
  return dist;
}

std::vector<double> point_entropies(const SoftPartition& partition) {
  std::vector<double> h(partition.size());
  for (Eigen::Index i = 0; i < partition.size(); ++i) h[i] = entropy(partition.memberships.row(i));
  return h;
}

}  // namespace

LabeledSubset label_by_distance(const DataMatrix& data, const SoftPartition& partition, const LabelerConfig& cfg) {
  cfg.validate();
  check_partition(partition, data.size());
  const auto dist = center_distances(data, partition);
  auto subset = empty_subset(partition);
  const auto members = members_of(partition);
  for (int l = 0; l < partition.k(); ++l)
    select_lowest(members[l], dist, quota(cfg.percent_a, static_cast<int>(members[l].size())), subset);
  return subset;
}

LabeledSubset label_by_entropy(const SoftPartition& partition, const LabelerConfig& cfg) {
  cfg.validate();
  const auto h = point_entropies(partition);
  auto subset = empty_subset(partition);
  subset.branch.assign(partition.k(), Strategy::entropy);
  const auto members = members_of(partition);
  for (int l = 0; l < partition.k(); ++l)
    select_lowest(members[l], h, quota(cfg.percent_a, static_cast<int>(members[l].size())), subset);
  return subset;
}

LabeledSubset label_self_adaptive(const DataMatrix& data, const SoftPartition& partition, const LabelerConfig& cfg) {
  cfg.validate();
  check_partition(partition, data.size());
  if (partition.k() < 2) throw ValidationError("self-adaptive labeling needs K >= 2");
  const auto ms = mean_silhouettes(data.points, partition.hard, partition.k(), cfg.silhouette_sample);
  const auto dist = center_distances(data, partition);
  const auto h = point_entropies(partition);
  auto subset = empty_subset(partition);
  const auto members = members_of(partition);
  for (int l = 0; l < partition.k(); ++l) {
    const bool compact = ms[l] > cfg.silhouette_threshold;
    subset.branch[l] = compact ? Strategy::distance : Strategy::entropy;
    select_lowest(members[l], compact ? dist : h, quota(cfg.percent_a, static_cast<int>(members[l].size())), subset);
  }
  return subset;
}

LabeledSubset select_training_data(const DataMatrix& data, const SoftPartition& partition, const LabelerConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::distance: return label_by_distance(data, partition, cfg);
    case Strategy::entropy: return label_by_entropy(partition, cfg);
    case Strategy::self_adaptive: return label_self_adaptive(data, partition, cfg);
  }
  throw ValidationError("unknown labeling strategy");
}

void write_subset_csv(const LabeledSubset& subset, std::ostream& out) {
  out << "index,selected,label\n";
  for (Eigen::Index i = 0; i < subset.size(); ++i)
    out << i << ',' << (subset.selected[i] ? 1 : 0) << ',' << subset.labels[i] << '\n';
}

void write_subset_csv(const LabeledSubset& subset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_subset_csv(subset, out);
}

}  // namespace csal

#pragma once

#include "csal/data.hpp"
#include "csal/partition.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace csal {

enum class Strategy { distance, entropy, self_adaptive };

std::string to_string(Strategy s);
// Accepts "distance", "entropy", "self_adaptive" and "self-adaptive".
Strategy parse_strategy(const std::string& name);

struct LabelerConfig {
  Strategy strategy = Strategy::self_adaptive;
  double percent_a = 60.0;             // (0, 100]
  double silhouette_threshold = 0.35;  // [-1, 1]
  // Mean silhouettes are computed on an evenly spaced subsample of this many
  // points when N exceeds it.
  Eigen::Index silhouette_sample = 500;

  void validate() const;
};

/// Pseudo-labeled training subset chosen from a partition.
struct LabeledSubset {
  std::vector<char> selected;   // s_i
  std::vector<int> labels;      // hard cluster of every point; meaningful where selected
  int k = 0;
  std::vector<Strategy> branch; // rule applied in each cluster

  Eigen::Index size() const { return static_cast<Eigen::Index>(selected.size()); }
  // lambda(i, l) = 1 iff point i is selected and labelled l.
  Eigen::MatrixXd lambda() const;
  std::size_t count() const;
  std::vector<int> selected_per_cluster() const;
};

// ceil(A% * n) for n > 0, never 0 and never above n; 0 for an empty cluster.
int quota(double percent_a, int cluster_size);

// Shannon entropy in bits; 0 log 0 = 0. Throws ValidationError for a vector
// that is not a probability distribution.
double entropy(std::span<const double> probs);
double entropy(const Eigen::Ref<const Eigen::RowVectorXd>& probs);

// Silhouette of one point under the hard partition, Euclidean dissimilarity.
// Points in singleton clusters score 0. Requires K >= 2.
double silhouette(const DataMatrix& data, const SoftPartition& partition, Eigen::Index i);
// Silhouette of every point.
Eigen::VectorXd silhouettes(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k);
// Mean silhouette of cluster l; throws for an empty cluster.
double mean_silhouette(const DataMatrix& data, const SoftPartition& partition, int l);
// Mean silhouette of every cluster (subsampled above cfg.silhouette_sample points).
std::vector<double> mean_silhouettes(const Eigen::MatrixXd& points, const std::vector<int>& hard,
                                     int k, Eigen::Index sample_limit);

LabeledSubset label_by_distance(const DataMatrix& data, const SoftPartition& partition,
                                const LabelerConfig& cfg);
LabeledSubset label_by_entropy(const SoftPartition& partition, const LabelerConfig& cfg);
LabeledSubset label_self_adaptive(const DataMatrix& data, const SoftPartition& partition,
                                  const LabelerConfig& cfg);
// Dispatches on cfg.strategy.
LabeledSubset select_training_data(const DataMatrix& data, const SoftPartition& partition,
                                   const LabelerConfig& cfg);

// index,selected,label
void write_subset_csv(const LabeledSubset& subset, std::ostream& out);
void write_subset_csv(const LabeledSubset& subset, const std::filesystem::path& path);

}  // namespace csal

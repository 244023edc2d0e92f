#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace csal {

/// Row-stochastic membership matrix plus the derived hard assignment.
struct SoftPartition {
  Eigen::MatrixXd memberships;  // N x K, entry (i, l) = P(C_l | x_i)
  std::vector<int> hard;        // argmax per row, lowest index on ties
  Eigen::MatrixXd centers;      // K x d

  // Run diagnostics; empty/zero for partitions not produced by an iterative clusterer.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  int reseeds = 0;

  Eigen::Index size() const { return memberships.rows(); }
  int k() const { return static_cast<int>(memberships.cols()); }

  std::vector<int> cluster_sizes() const;
  // Row sums within tol of 1 and entries in [0, 1].
  bool is_row_stochastic(double tol = 1e-9) const;
};

// Index of the largest entry; the lowest index wins ties.
int argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row);
std::vector<int> argmax_rows(const Eigen::MatrixXd& m);

// Normalizes each row of log-weights in place into probabilities (log-sum-exp).
// Returns the per-row log normalizers.
Eigen::VectorXd normalize_log_rows(Eigen::MatrixXd& log_weights);

// One-hot membership matrix for a hard labelling.
Eigen::MatrixXd one_hot(const std::vector<int>& hard, int k);

// Mean of the points assigned to each cluster (K x d). Empty clusters get a zero row.
Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k);

// index,hard,p0,...,p{K-1}
void write_partition_csv(const SoftPartition& partition, std::ostream& out);
void write_partition_csv(const SoftPartition& partition, const std::filesystem::path& path);

}  // namespace csal

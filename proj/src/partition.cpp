#include "csal/partition.hpp"

#include "csal/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace csal {

std::vector<int> SoftPartition::cluster_sizes() const {
  std::vector<int> sizes(k(), 0);
  for (int h : hard) ++sizes[h];
  return sizes;
}

bool SoftPartition::is_row_stochastic(double tol) const {
  for (Eigen::Index i = 0; i < memberships.rows(); ++i) {
    if (std::abs(memberships.row(i).sum() - 1.0) > tol) return false;
    if ((memberships.row(i).array() < 0.0).any() || (memberships.row(i).array() > 1.0).any()) return false;
  }
  return true;
}

int argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (Eigen::Index l = 1; l < row.size(); ++l)
    if (row(l) > row(best)) best = static_cast<int>(l);
  return best;
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& m) {
  std::vector<int> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = argmax_row(m.row(i));
  return out;
}

Eigen::VectorXd normalize_log_rows(Eigen::MatrixXd& log_weights) {
  Eigen::VectorXd log_norm(log_weights.rows());
  for (Eigen::Index i = 0; i < log_weights.rows(); ++i) {
    auto row = log_weights.row(i);
    const double top = row.maxCoeff();
    if (!std::isfinite(top)) {
      log_norm(i) = top;
      continue;
    }
    const double total = (row.array() - top).exp().sum();
    log_norm(i) = top + std::log(total);
    row = (row.array() - log_norm(i)).exp().matrix();
  }
  return log_norm;
}

Eigen::MatrixXd one_hot(const std::vector<int>& hard, int k) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hard.size()), k);
  for (std::size_t i = 0; i < hard.size(); ++i) m(i, hard[i]) = 1.0;
  return m;
}

Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(hard[i]) += points.row(i);
    ++counts[hard[i]];
  }
  for (int l = 0; l < k; ++l)
    if (counts[l] > 0) sums.row(l) /= counts[l];
  return sums;
}

void write_partition_csv(const SoftPartition& partition, std::ostream& out) {
  out << "index,hard";
  for (int l = 0; l < partition.k(); ++l) out << ",p" << l;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < partition.size(); ++i) {
    out << i << ',' << partition.hard[i];
    for (int l = 0; l < partition.k(); ++l) out << ',' << partition.memberships(i, l);
    out << '\n';
  }
}

void write_partition_csv(const SoftPartition& partition, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_partition_csv(partition, out);
}

}  // namespace csal

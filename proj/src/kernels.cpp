#include "csal/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace csal::kernels {

namespace {

inline void fcm_row(const Eigen::Ref<const Eigen::RowVectorXd>& dist_sq, double m,
                    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
  const Eigen::Index k = dist_sq.size();
  for (Eigen::Index l = 0; l < k; ++l) {
    if (dist_sq(l) == 0.0) {
      out.setZero();
      out(l) = 1.0;
      return;
    }
  }
  const double power = 1.0 / (m - 1.0);
  for (Eigen::Index l = 0; l < k; ++l) {
    double denom = 0.0;
    for (Eigen::Index t = 0; t < k; ++t) denom += std::pow(dist_sq(l) / dist_sq(t), power);
    out(l) = 1.0 / denom;
  }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void squared_distances(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, Eigen::MatrixXd& out) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  out.resize(n, k);
#pragma omp parallel for schedule(static) if (n >= kParallelMinPoints)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < k; ++l) out(i, l) = (points.row(i) - centers.row(l)).squaredNorm();
}

void nearest_center(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& assignment,
                    Eigen::VectorXd& distance_sq) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  assignment.resize(n);
  distance_sq.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMinPoints)
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (points.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index l = 1; l < k; ++l) {
      const double dl = (points.row(i) - centers.row(l)).squaredNorm();
      if (dl < best_d) {
        best_d = dl;
        best = static_cast<int>(l);
      }
    }
    assignment[i] = best;
    distance_sq(i) = best_d;
  }
}

void log_joint(const Eigen::MatrixXd& points, std::span<const FactoredComponent> components, Eigen::MatrixXd& out) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  const auto k = static_cast<Eigen::Index>(components.size());
  // Fixed blocks, one triangular solve per block and component. The block
  // size does not depend on the thread count, so neither do the results.
  constexpr Eigen::Index kBlock = 256;
  const Eigen::Index blocks = (n + kBlock - 1) / kBlock;
  const double log_2pi = static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
  out.resize(n, k);
#pragma omp parallel if (n >= kParallelMinPoints)
  {
    Eigen::MatrixXd y;
#pragma omp for schedule(static)
    for (Eigen::Index b = 0; b < blocks; ++b) {
      const Eigen::Index start = b * kBlock;
      const Eigen::Index len = std::min(kBlock, n - start);
      for (Eigen::Index l = 0; l < k; ++l) {
        const auto& c = components[l];
        y = (points.middleRows(start, len).rowwise() - c.mean.transpose()).transpose();
        c.lower.triangularView<Eigen::Lower>().solveInPlace(y);
        out.col(l).segment(start, len) =
            (c.log_alpha - 0.5 * (log_2pi + c.log_det)) - 0.5 * y.colwise().squaredNorm().transpose().array();
      }
    }
  }
}

void cluster_distance_sums(const Eigen::MatrixXd& points, std::span<const int> hard, int k, Eigen::MatrixXd& out) {
  const Eigen::Index n = points.rows();
  out.setZero(n, k);
#pragma omp parallel if (n >= 256)
  {
    std::vector<double> row(k);
    Eigen::ArrayXd dist(n);
#pragma omp for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
      // Squared distances first so the square roots run as one vector op.
      dist.setZero();
      for (Eigen::Index c = 0; c < points.cols(); ++c) dist += (points.col(c).array() - points(i, c)).square();
      dist = dist.sqrt();
      std::fill(row.begin(), row.end(), 0.0);
      for (Eigen::Index j = 0; j < n; ++j) row[hard[j]] += dist(j);
      row[hard[i]] -= dist(i);
      for (int l = 0; l < k; ++l) out(i, l) = row[l];
    }
  }
}

void fcm_memberships(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, double m, Eigen::MatrixXd& out) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  out.resize(n, k);
#pragma omp parallel if (n >= kParallelMinPoints)
  {
    Eigen::RowVectorXd dist_sq(k);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index l = 0; l < k; ++l) dist_sq(l) = (points.row(i) - centers.row(l)).squaredNorm();
      fcm_row(dist_sq, m, out.row(i));
    }
  }
}

namespace serial {

namespace {
double sq_dist(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double diff = a(i, c) - b(j, c);
    s += diff * diff;
  }
  return s;
}
}  // namespace

void squared_distances(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, Eigen::MatrixXd& out) {
  out.resize(points.rows(), centers.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index l = 0; l < centers.rows(); ++l) out(i, l) = sq_dist(points, i, centers, l);
}

void nearest_center(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& assignment,
                    Eigen::VectorXd& distance_sq) {
  assignment.assign(points.rows(), 0);
  distance_sq.resize(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    distance_sq(i) = sq_dist(points, i, centers, 0);
    for (Eigen::Index l = 1; l < centers.rows(); ++l) {
      const double dl = sq_dist(points, i, centers, l);
      if (dl < distance_sq(i)) {
        distance_sq(i) = dl;
        assignment[i] = static_cast<int>(l);
      }
    }
  }
}

void log_joint(const Eigen::MatrixXd& points, std::span<const FactoredComponent> components, Eigen::MatrixXd& out) {
  const Eigen::Index d = points.cols();
  out.resize(points.rows(), static_cast<Eigen::Index>(components.size()));
  for (std::size_t l = 0; l < components.size(); ++l) {
    const auto& c = components[l];
    // Mahalanobis term through the explicit inverse covariance.
    const Eigen::MatrixXd cov = c.lower * c.lower.transpose();
    const Eigen::MatrixXd precision = cov.inverse();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      double quad = 0.0;
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
          quad += (points(i, a) - c.mean(a)) * precision(a, b) * (points(i, b) - c.mean(b));
      out(i, l) = c.log_alpha - 0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + c.log_det + quad);
    }
  }
}

void cluster_distance_sums(const Eigen::MatrixXd& points, std::span<const int> hard, int k, Eigen::MatrixXd& out) {
  out.setZero(points.rows(), k);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < points.rows(); ++j)
      if (j != i) out(i, hard[j]) += std::sqrt(sq_dist(points, i, points, j));
}

void fcm_memberships(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, double m, Eigen::MatrixXd& out) {
  Eigen::MatrixXd dist_sq;
  squared_distances(points, centers, dist_sq);
  out.resize(points.rows(), centers.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) fcm_row(dist_sq.row(i), m, out.row(i));
}

}  // namespace serial

}  // namespace csal::kernels

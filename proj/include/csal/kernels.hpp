#pragma once

// Data-parallel inner loops shared by the clusterers, the mixture classifier
// and the silhouette computation. The top-level functions use OpenMP over
// points; `serial::` holds the straightforward single-thread versions the
// tests compare against. Every output row depends only on its own point, so
// the parallel results do not depend on the schedule.

#include "csal/mixture.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace csal::kernels {

// Below this many points the loops stay serial; thread start-up dominates.
inline constexpr Eigen::Index kParallelMinPoints = 2048;

// out(i, l) = ||x_i - c_l||^2
void squared_distances(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                       Eigen::MatrixXd& out);

// Nearest center per point (lowest index on ties); fills the squared distance to it.
void nearest_center(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                    std::vector<int>& assignment, Eigen::VectorXd& distance_sq);

// out(i, l) = log alpha_l + log N(x_i; mu_l, sigma_l)
void log_joint(const Eigen::MatrixXd& points, std::span<const FactoredComponent> components,
               Eigen::MatrixXd& out);

// out(i, l) = sum of Euclidean distances from x_i to every point with hard label l
// (x_i itself contributes 0 to its own cluster).
void cluster_distance_sums(const Eigen::MatrixXd& points, std::span<const int> hard, int k,
                           Eigen::MatrixXd& out);

// Fuzzy c-means membership update with fuzzifier m; points sitting on a
// center get membership 1 there (first such center) and 0 elsewhere.
void fcm_memberships(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, double m,
                     Eigen::MatrixXd& out);

namespace serial {

void squared_distances(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                       Eigen::MatrixXd& out);
void nearest_center(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                    std::vector<int>& assignment, Eigen::VectorXd& distance_sq);
void log_joint(const Eigen::MatrixXd& points, std::span<const FactoredComponent> components,
               Eigen::MatrixXd& out);
void cluster_distance_sums(const Eigen::MatrixXd& points, std::span<const int> hard, int k,
                           Eigen::MatrixXd& out);
void fcm_memberships(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, double m,
                     Eigen::MatrixXd& out);

}  // namespace serial

// Number of OpenMP threads the parallel kernels will use.
int max_threads();

}  // namespace csal::kernels

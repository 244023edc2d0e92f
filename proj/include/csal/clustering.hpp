#pragma once

#include "csal/data.hpp"
#include "csal/mixture.hpp"
#include "csal/partition.hpp"

#include <random>
#include <string>
#include <utility>

namespace csal {

struct ClusterConfig {
  int k = 2;
  int max_iter = 300;
  double tol = 1e-6;  // relative objective change (FCM, GMM)
  Seed seed = 0;
  double fuzzifier_m = 2.0;
  double cov_reg = 1e-6;

  void validate(Eigen::Index n) const;
};

enum class Clusterer { kmeans, fcm, gmm };

std::string to_string(Clusterer c);
Clusterer parse_clusterer(const std::string& name);

// k-means++ seeding: first center uniform, then proportional to squared distance
// to the nearest chosen center.
Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng);

/// Lloyd iteration from k-means++ centers until the assignment repeats.
///
/// Memberships are softened as P(C_l|x) proportional to exp(-||x - c_l||^2 / (2 h^2))
/// with h the mean distance of points to their own center, so the labelers
/// have posteriors to work with. When h is 0 the memberships are one-hot.
/// An empty cluster is re-seeded at the point farthest from its current center.
SoftPartition kmeans(const DataMatrix& data, const ClusterConfig& cfg);
SoftPartition kmeans_from_centers(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                                  const ClusterConfig& cfg);

/// Bezdek fuzzy c-means with fuzzifier m, started from k-means++ centers.
/// Stops when the relative objective change drops below tol.
SoftPartition fcm(const DataMatrix& data, const ClusterConfig& cfg);
SoftPartition fcm_from_centers(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                               const ClusterConfig& cfg);

// FCM objective sum_i sum_l u_il^m ||x_i - c_l||^2.
double fcm_objective(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                     const Eigen::MatrixXd& memberships, double m);

/// Full-covariance Gaussian mixture fitted by EM, initialized from a k-means
/// run with the same seed. The log-likelihood trace is stored in
/// objective_trace. Every covariance gets cov_reg * I added after the M-step.
std::pair<SoftPartition, MixtureParams> gmm_em(const DataMatrix& data, const ClusterConfig& cfg);
std::pair<SoftPartition, MixtureParams> gmm_em_from(const Eigen::MatrixXd& points,
                                                    const Eigen::MatrixXd& initial_weights,
                                                    const ClusterConfig& cfg);

// Dispatches to one of the three clusterers.
SoftPartition run_clusterer(Clusterer which, const DataMatrix& data, const ClusterConfig& cfg);

}  // namespace csal

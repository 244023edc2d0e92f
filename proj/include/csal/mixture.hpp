#pragma once

#include "csal/partition.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <vector>

namespace csal {

/// Gaussian mixture classifier parameters: weights, means and one full
/// covariance matrix per component.
struct MixtureParams {
  Eigen::VectorXd alpha;              // K
  Eigen::MatrixXd mu;                 // K x d
  std::vector<Eigen::MatrixXd> sigma; // K matrices, d x d

  int k() const { return static_cast<int>(alpha.size()); }
  int dim() const { return static_cast<int>(mu.cols()); }
  void validate() const;

  friend bool operator==(const MixtureParams&, const MixtureParams&);
};

// A component with its covariance already factored, ready for density evaluation.
struct FactoredComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd lower;  // Cholesky factor L, sigma = L L^T
  double log_det = 0.0;
  double log_alpha = 0.0;
};

// Throws NumericError naming the component when a covariance is not positive definite.
std::vector<FactoredComponent> factor(const MixtureParams& params);

double log_gaussian_density(const Eigen::Ref<const Eigen::VectorXd>& x, const FactoredComponent& c);

// N x K matrix of log(alpha_l) + log N(x_i; mu_l, sigma_l).
Eigen::MatrixXd log_joint(const Eigen::MatrixXd& points, const MixtureParams& params);

// Posterior memberships of every point; hard = argmax, centers = means.
// Also returns the observed-data log-likelihood through `log_likelihood` when non-null.
SoftPartition posterior(const Eigen::MatrixXd& points, const MixtureParams& params,
                        double* log_likelihood = nullptr);

struct EstimateOptions {
  double cov_reg = 1e-6;
  // Shrink covariances of components with fewer than d+1 units of weight
  // toward the pooled within-component covariance.
  bool shrink_small = false;
};

// Weighted maximum-likelihood fit: alpha_l = W_l / sum W, mu_l the weighted
// mean, sigma_l the weighted scatter about mu_l divided by W_l, plus cov_reg * I.
// `weights` is N x K and non-negative; every column must carry positive weight.
MixtureParams estimate_mixture(const Eigen::MatrixXd& points, const Eigen::MatrixXd& weights,
                               const EstimateOptions& options);

nlohmann::json to_json(const MixtureParams& params);
MixtureParams mixture_from_json(const nlohmann::json& doc);
void save_json(const MixtureParams& params, const std::filesystem::path& path);
MixtureParams load_mixture(const std::filesystem::path& path);

}  // namespace csal

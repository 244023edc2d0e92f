#pragma once

#include "csal/clustering.hpp"
#include "csal/data.hpp"
#include "csal/mixture.hpp"
#include "csal/partition.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace csal {

struct CemOptions {
  // Per-component full covariances instead of the shared spherical variance.
  bool full_covariance = false;
};

struct CemResult {
  SoftPartition partition;
  MixtureParams params;
  std::vector<double> trace;  // classification log-likelihood after each M-step
  int iterations = 0;
  bool converged = false;
  int reseeds = 0;
};

// Classification-EM M-step on a hard partition: alpha_l = n_l / N, mu_l the
// cluster mean, and one spherical variance shared by all components,
// sum of squared deviations / (N d), plus cov_reg.
MixtureParams cem_m_step(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k,
                         double cov_reg, bool full_covariance = false);

// sum_i log(alpha_c(i) f(x_i; mu_c(i), sigma_c(i))).
double classification_log_likelihood(const Eigen::MatrixXd& points, const std::vector<int>& hard,
                                     const MixtureParams& params);

/// E-step, C-step (maximum posterior), M-step, repeated until the C-step
/// partition stops changing or cfg.max_iter cycles have run.
CemResult cem_run(const DataMatrix& data, const SoftPartition& init, const ClusterConfig& cfg,
                  const CemOptions& options = {});

// iteration,log_likelihood
void write_likelihood_trace_csv(const std::vector<double>& trace, std::ostream& out);

}  // namespace csal

#pragma once

#include "csal/clustering.hpp"
#include "csal/data.hpp"
#include "csal/labeling.hpp"
#include "csal/mixture.hpp"
#include "csal/partition.hpp"

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

namespace csal {

struct CsalConfig {
  Clusterer clusterer = Clusterer::gmm;
  LabelerConfig labeler;
  int k = 2;
  int max_iter = 100;
  double tol = 1e-8;  // absolute change of the selected-set log-likelihood
  Seed seed = 0;
  double cov_reg = 1e-6;
  // Stop, keeping the previous iterate, when an iteration would lower the
  // selected-set log-likelihood. Off by default: the plain loop does not
  // guarantee ascent for distance or entropy selection.
  bool ascent_guard = false;
  // Settings for the initial clustering run; k and seed are taken from above.
  ClusterConfig cluster;

  void validate(Eigen::Index n) const;
  ClusterConfig cluster_config() const;
};

struct CsalIteration {
  int iteration = 0;
  double log_likelihood = 0.0;  // selected-set log-likelihood after the M-step
  int changed_assignments = 0;  // points whose hard cluster moved this iteration
  int selected_count = 0;
};

struct CsalResult {
  SoftPartition partition;  // classifier posteriors over all points
  MixtureParams params;
  SoftPartition initial_partition;  // output of the base clusterer
  double initial_log_likelihood = 0.0;
  std::vector<CsalIteration> trace;
  int iterations = 0;
  bool converged = false;
  bool ascent_stopped = false;  // ended by the ascent guard
  int cycle_length = 0;         // iterations between the repeated partitions; 1 for a fixed point
  int reseeds = 0;              // clusters refilled after an empty C-step
};

// sum_i sum_l lambda_il log(alpha_l p(x_i | mu_l, sigma_l))
double selected_log_likelihood(const Eigen::MatrixXd& points, const LabeledSubset& subset,
                               const MixtureParams& params);

// Mixture fitted to the selected points only (alpha normalized over the
// selected total). Clusters with fewer than d+1 selected points have their
// covariance shrunk toward the pooled selected covariance.
MixtureParams init_params(const DataMatrix& data, const LabeledSubset& subset,
                          double cov_reg = 1e-6);

// Posterior of every point under the current classifier (centers = means).
SoftPartition e_step(const DataMatrix& data, const MixtureParams& params);

// Maximum-posterior hard labels, lowest index on ties.
std::vector<int> c_step(const SoftPartition& partition);

// Training-data selection on the current partition through the labeler.
LabeledSubset s_step(const DataMatrix& data, const SoftPartition& partition,
                     const LabelerConfig& labeler);

// Same estimator as init_params, applied to the current selection.
MixtureParams m_step(const DataMatrix& data, const LabeledSubset& subset, double cov_reg = 1e-6);

/// Clusters once, then alternates E, C, S and M steps until the hard
/// partition repeats (equals the previous one or any earlier one, which
/// ends a cycle), the selected-set log-likelihood changes by less than tol,
/// or max_iter iterations have run.
CsalResult csal_run(const DataMatrix& data, const CsalConfig& cfg);

// iteration,log_likelihood,changed_assignments,selected_count
void write_trace_csv(const std::vector<CsalIteration>& trace, std::ostream& out);
void write_trace_csv(const std::vector<CsalIteration>& trace, const std::filesystem::path& path);

}  // namespace csal

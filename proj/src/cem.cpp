#include "csal/cem.hpp"

#include "csal/error.hpp"
#include "csal/log.hpp"

#include <cmath>
#include <iomanip>

namespace csal {

MixtureParams cem_m_step(const Eigen::MatrixXd& points, const std::vector<int>& hard, int k, double cov_reg,
                         bool full_covariance) {
  const Eigen::MatrixXd weights = one_hot(hard, k);
  const Eigen::VectorXd counts = weights.colwise().sum().transpose();
  for (int l = 0; l < k; ++l)
    if (counts(l) == 0.0) throw ValidationError("cluster " + std::to_string(l) + " is empty");
  if (full_covariance) return estimate_mixture(points, weights, {.cov_reg = cov_reg, .shrink_small = false});

  const auto n = static_cast<double>(points.rows());
  const auto d = points.cols();
  MixtureParams p;
  p.alpha = counts / n;
  p.mu = cluster_means(points, hard, k);
  double scatter = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) scatter += (points.row(i) - p.mu.row(hard[i])).squaredNorm();
  const double variance = scatter / (n * static_cast<double>(d)) + cov_reg;
  p.sigma.assign(k, variance * Eigen::MatrixXd::Identity(d, d));
  return p;
}

double classification_log_likelihood(const Eigen::MatrixXd& points, const std::vector<int>& hard,
                                     const MixtureParams& params) {
  const auto comps = factor(params);
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto& c = comps[hard[i]];
    total += c.log_alpha + log_gaussian_density(points.row(i).transpose(), c);
  }
  return total;
}

namespace {

int reseed_empty_components(const Eigen::MatrixXd& points, const MixtureParams& params, std::vector<int>& hard) {
  const int k = params.k();
  std::vector<int> sizes(k, 0);
  for (int h : hard) ++sizes[h];
  int reseeds = 0;
  for (int l = 0; l < k; ++l) {
    if (sizes[l] > 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (sizes[hard[i]] <= 1) continue;
      const double dist = (points.row(i) - params.mu.row(hard[i])).squaredNorm();
      if (dist > far_d) {
        far_d = dist;
        far = i;
      }
    }
    if (far < 0) break;
    --sizes[hard[far]];
    ++sizes[l];
    hard[far] = l;
    ++reseeds;
    warn("CEM: empty cluster " + std::to_string(l) + " re-seeded at point " + std::to_string(far));
  }
  return reseeds;
}

}  // namespace

CemResult cem_run(const DataMatrix& data, const SoftPartition& init, const ClusterConfig& cfg,
                  const CemOptions& options) {
  const int k = init.k();
  if (static_cast<Eigen::Index>(init.hard.size()) != data.size())
    throw ValidationError("initial partition does not match the data size");
  for (int size : init.cluster_sizes())
    if (size == 0) throw ValidationError("initial partition has an empty cluster");
  if (cfg.max_iter < 1) throw ValidationError("max_iter must be positive");

  CemResult out;
  std::vector<int> hard = init.hard;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.params = cem_m_step(data.points, hard, k, cfg.cov_reg, options.full_covariance);
    const double cll = classification_log_likelihood(data.points, hard, out.params);
    if (!std::isfinite(cll)) throw NumericError("CEM likelihood is not finite at iteration " + std::to_string(it), it);
    out.trace.push_back(cll);
    out.iterations = it;

    out.partition = posterior(data.points, out.params);
    std::vector<int> next = out.partition.hard;
    out.reseeds += reseed_empty_components(data.points, out.params, next);
    if (next == hard) {
      out.converged = true;
      break;
    }
    hard = std::move(next);
  }
  return out;
}

void write_likelihood_trace_csv(const std::vector<double>& trace, std::ostream& out) {
  out << "iteration,log_likelihood\n" << std::setprecision(17);
  for (std::size_t t = 0; t < trace.size(); ++t) out << t + 1 << ',' << trace[t] << '\n';
}

}  // namespace csal

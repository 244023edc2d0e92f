#include "csal/clustering.hpp"

#include "csal/error.hpp"
#include "csal/kernels.hpp"
#include "csal/log.hpp"

#include <cmath>

namespace csal {

void ClusterConfig::validate(Eigen::Index n) const {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (k > n) throw ValidationError("k = " + std::to_string(k) + " exceeds N = " + std::to_string(n));
  if (max_iter < 1) throw ValidationError("max_iter must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (!(fuzzifier_m > 1.0)) throw ValidationError("fuzzifier m must exceed 1");
  if (!(cov_reg >= 0.0)) throw ValidationError("cov_reg must be non-negative");
}

std::string to_string(Clusterer c) {
  switch (c) {
    case Clusterer::kmeans: return "kmeans";
    case Clusterer::fcm: return "fcm";
    case Clusterer::gmm: return "gmm";
  }
  return "?";
}

Clusterer parse_clusterer(const std::string& name) {
  if (name == "kmeans") return Clusterer::kmeans;
  if (name == "fcm") return Clusterer::fcm;
  if (name == "gmm") return Clusterer::gmm;
  throw ValidationError("unknown clusterer '" + name + "'");
}

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  centers.row(0) = points.row(pick(rng));
  Eigen::VectorXd nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double running = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += nearest(i);
        if (running > target && nearest(i) > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = points.row(chosen);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

namespace {

// Moves the point farthest from its own center into each empty cluster.
int reseed_empty(const Eigen::MatrixXd& points, std::vector<int>& assignment, Eigen::VectorXd& distance_sq,
                 Eigen::MatrixXd& centers) {
  const int k = static_cast<int>(centers.rows());
  std::vector<int> sizes(k, 0);
  for (int a : assignment) ++sizes[a];
  int reseeds = 0;
  for (int l = 0; l < k; ++l) {
    if (sizes[l] > 0) continue;
    Eigen::Index far = -1;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      if (sizes[assignment[i]] > 1 && (far < 0 || distance_sq(i) > distance_sq(far))) far = i;
    if (far < 0) break;  // fewer points than clusters; cannot happen when k <= N
    --sizes[assignment[far]];
    ++sizes[l];
    assignment[far] = l;
    distance_sq(far) = 0.0;
    centers.row(l) = points.row(far);
    ++reseeds;
    warn("empty cluster " + std::to_string(l) + " re-seeded at point " + std::to_string(far));
  }
  return reseeds;
}

double assignment_objective(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                            const std::vector<int>& assignment) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) total += (points.row(i) - centers.row(assignment[i])).squaredNorm();
  return total;
}

}  // namespace

SoftPartition kmeans_from_centers(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, const ClusterConfig& cfg) {
  const int k = static_cast<int>(centers.rows());
  SoftPartition out;
  std::vector<int> assignment, previous;
  Eigen::VectorXd distance_sq;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    kernels::nearest_center(points, centers, assignment, distance_sq);
    out.reseeds += reseed_empty(points, assignment, distance_sq, centers);
    centers = cluster_means(points, assignment, k);
    out.objective_trace.push_back(assignment_objective(points, centers, assignment));
    out.iterations = it;
    if (assignment == previous) {
      out.converged = true;
      break;
    }
    previous = assignment;
  }

  Eigen::MatrixXd dist_sq;
  kernels::squared_distances(points, centers, dist_sq);
  double h = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) h += std::sqrt(dist_sq(i, assignment[i]));
  h /= static_cast<double>(points.rows());

  if (h > 0.0) {
    out.memberships = -dist_sq / (2.0 * h * h);
    normalize_log_rows(out.memberships);
  } else {
    out.memberships = one_hot(assignment, k);
  }
  out.hard = argmax_rows(out.memberships);
  out.centers = std::move(centers);
  return out;
}

SoftPartition kmeans(const DataMatrix& data, const ClusterConfig& cfg) {
  cfg.validate(data.size());
  std::mt19937_64 rng(cfg.seed);
  return kmeans_from_centers(data.points, kmeanspp_centers(data.points, cfg.k, rng), cfg);
}

double fcm_objective(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, const Eigen::MatrixXd& memberships,
                     double m) {
  Eigen::MatrixXd dist_sq;
  kernels::squared_distances(points, centers, dist_sq);
  return (memberships.array().pow(m) * dist_sq.array()).sum();
}

SoftPartition fcm_from_centers(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, const ClusterConfig& cfg) {
  const double m = cfg.fuzzifier_m;
  SoftPartition out;
  Eigen::MatrixXd u;
  double previous = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    kernels::fcm_memberships(points, centers, m, u);
    const Eigen::MatrixXd um = u.array().pow(m);
    centers = (um.transpose() * points).array().colwise() / um.colwise().sum().transpose().array();
    const double objective = fcm_objective(points, centers, u, m);
    out.objective_trace.push_back(objective);
    out.iterations = it;
    if (it > 1 && std::abs(previous - objective) <= cfg.tol * previous) {
      out.converged = true;
      break;
    }
    if (objective == 0.0) {
      out.converged = true;
      break;
    }
    previous = objective;
  }
  out.memberships = std::move(u);
  out.hard = argmax_rows(out.memberships);
  out.centers = std::move(centers);
  return out;
}

SoftPartition fcm(const DataMatrix& data, const ClusterConfig& cfg) {
  cfg.validate(data.size());
  std::mt19937_64 rng(cfg.seed);
  return fcm_from_centers(data.points, kmeanspp_centers(data.points, cfg.k, rng), cfg);
}

namespace {

MixtureParams gmm_m_step(const Eigen::MatrixXd& points, const Eigen::MatrixXd& weights, double cov_reg, int iteration) {
  const Eigen::VectorXd mass = weights.colwise().sum().transpose();
  for (Eigen::Index l = 0; l < mass.size(); ++l)
    if (!(mass(l) > 0.0))
      throw NumericError("component " + std::to_string(l) + " lost all responsibility at iteration " +
                             std::to_string(iteration),
                         iteration, static_cast<int>(l));
  return estimate_mixture(points, weights, {.cov_reg = cov_reg, .shrink_small = false});
}

}  // namespace

std::pair<SoftPartition, MixtureParams> gmm_em_from(const Eigen::MatrixXd& points, const Eigen::MatrixXd& initial_weights,
                                                    const ClusterConfig& cfg) {
  MixtureParams params = gmm_m_step(points, initial_weights, cfg.cov_reg, 0);
  SoftPartition out;
  double previous = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    std::vector<FactoredComponent> comps;
    try {
      comps = factor(params);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at iteration " + std::to_string(it), it, e.component);
    }
    Eigen::MatrixXd resp;
    kernels::log_joint(points, comps, resp);
    for (Eigen::Index l = 0; l < resp.cols(); ++l)
      if (resp.col(l).hasNaN())
        throw NumericError("NaN likelihood in component " + std::to_string(l) + " at iteration " + std::to_string(it),
                           it, static_cast<int>(l));
    const double ll = normalize_log_rows(resp).sum();
    if (!std::isfinite(ll)) throw NumericError("non-finite log-likelihood at iteration " + std::to_string(it), it);
    out.objective_trace.push_back(ll);
    out.iterations = it;
    out.memberships = std::move(resp);
    if (it > 1 && std::abs(ll - previous) <= cfg.tol * std::abs(previous)) {
      out.converged = true;
      break;
    }
    previous = ll;
    if (it == cfg.max_iter) break;
    params = gmm_m_step(points, out.memberships, cfg.cov_reg, it);
  }
  out.hard = argmax_rows(out.memberships);
  out.centers = params.mu;
  return {std::move(out), std::move(params)};
}

std::pair<SoftPartition, MixtureParams> gmm_em(const DataMatrix& data, const ClusterConfig& cfg) {
  cfg.validate(data.size());
  const SoftPartition init = kmeans(data, cfg);
  auto result = gmm_em_from(data.points, one_hot(init.hard, cfg.k), cfg);
  result.first.reseeds = init.reseeds;
  return result;
}

SoftPartition run_clusterer(Clusterer which, const DataMatrix& data, const ClusterConfig& cfg) {
  switch (which) {
    case Clusterer::kmeans: return kmeans(data, cfg);
    case Clusterer::fcm: return fcm(data, cfg);
    case Clusterer::gmm: return gmm_em(data, cfg).first;
  }
  throw ValidationError("unknown clusterer");
}

}  // namespace csal

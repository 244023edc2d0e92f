#include "csal/csal.hpp"

#include "csal/error.hpp"
#include "csal/log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace csal {

void CsalConfig::validate(Eigen::Index n) const {
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  labeler.validate();
  cluster_config().validate(n);
}

ClusterConfig CsalConfig::cluster_config() const {
  ClusterConfig c = cluster;
  c.k = k;
  c.seed = seed;
  c.cov_reg = cov_reg;
  return c;
}

double selected_log_likelihood(const Eigen::MatrixXd& points, const LabeledSubset& subset,
                               const MixtureParams& params) {
  const auto comps = factor(params);
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (!subset.selected[i]) continue;
    const auto& c = comps[subset.labels[i]];
    total += c.log_alpha + log_gaussian_density(points.row(i).transpose(), c);
  }
  return total;
}

MixtureParams m_step(const DataMatrix& data, const LabeledSubset& subset, double cov_reg) {
  if (subset.size() != data.size()) throw ValidationError("subset does not match the data size");
  const auto per_cluster = subset.selected_per_cluster();
  for (int l = 0; l < subset.k; ++l)
    if (per_cluster[l] == 0) throw ValidationError("cluster " + std::to_string(l) + " has no selected training points");
  return estimate_mixture(data.points, subset.lambda(), {.cov_reg = cov_reg, .shrink_small = true});
}

MixtureParams init_params(const DataMatrix& data, const LabeledSubset& subset, double cov_reg) {
  return m_step(data, subset, cov_reg);
}

SoftPartition e_step(const DataMatrix& data, const MixtureParams& params) { return posterior(data.points, params); }

std::vector<int> c_step(const SoftPartition& partition) { return argmax_rows(partition.memberships); }

LabeledSubset s_step(const DataMatrix& data, const SoftPartition& partition, const LabelerConfig& labeler) {
  return select_training_data(data, partition, labeler);
}

namespace {

// A C-step can leave a component with no points; it takes back the point it
// explains best among clusters that can spare one.
int refill_empty(const SoftPartition& partition, std::vector<int>& hard) {
  const int k = partition.k();
  std::vector<int> sizes(k, 0);
  for (int h : hard) ++sizes[h];
  int refilled = 0;
  for (int l = 0; l < k; ++l) {
    if (sizes[l] > 0) continue;
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < partition.size(); ++i)
      if (sizes[hard[i]] > 1 && (best < 0 || partition.memberships(i, l) > partition.memberships(best, l))) best = i;
    if (best < 0) break;
    --sizes[hard[best]];
    ++sizes[l];
    hard[best] = l;
    ++refilled;
    warn("CSAL: empty cluster " + std::to_string(l) + " refilled with point " + std::to_string(best));
  }
  return refilled;
}

}  // namespace

CsalResult csal_run(const DataMatrix& data, const CsalConfig& cfg) {
  cfg.validate(data.size());
  CsalResult out;
  out.initial_partition = run_clusterer(cfg.clusterer, data, cfg.cluster_config());

  LabeledSubset subset = s_step(data, out.initial_partition, cfg.labeler);
  out.params = init_params(data, subset, cfg.cov_reg);
  out.initial_log_likelihood = selected_log_likelihood(data.points, subset, out.params);

  std::vector<std::vector<int>> history{out.initial_partition.hard};
  double previous_ll = out.initial_log_likelihood;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    SoftPartition current = e_step(data, out.params);
    current.hard = c_step(current);
    out.reseeds += refill_empty(current, current.hard);
    LabeledSubset next_subset = s_step(data, current, cfg.labeler);
    MixtureParams next_params = m_step(data, next_subset, cfg.cov_reg);

    CsalIteration rec;
    rec.iteration = it;
    rec.log_likelihood = selected_log_likelihood(data.points, next_subset, next_params);
    if (!std::isfinite(rec.log_likelihood))
      throw NumericError("log-likelihood is not finite at iteration " + std::to_string(it), it);
    if (cfg.ascent_guard && rec.log_likelihood < previous_ll) {
      out.converged = true;
      out.ascent_stopped = true;
      break;
    }
    subset = std::move(next_subset);
    out.params = std::move(next_params);
    const auto& previous = history.back();
    for (std::size_t i = 0; i < previous.size(); ++i) rec.changed_assignments += current.hard[i] != previous[i];
    rec.selected_count = static_cast<int>(subset.count());
    out.trace.push_back(rec);
    out.iterations = it;

    const auto seen = std::find(history.rbegin(), history.rend(), current.hard);
    if (seen != history.rend()) {
      out.cycle_length = static_cast<int>(seen - history.rbegin()) + 1;
      if (out.cycle_length > 1)
        warn("CSAL: partition of iteration " + std::to_string(it) + " repeats one from " +
             std::to_string(out.cycle_length) + " iterations earlier");
      out.converged = true;
      break;
    }
    const bool flat = std::abs(rec.log_likelihood - previous_ll) < cfg.tol;
    history.push_back(std::move(current.hard));
    previous_ll = rec.log_likelihood;
    if (flat) {
      out.converged = true;
      break;
    }
  }
  out.partition = e_step(data, out.params);
  return out;
}

void write_trace_csv(const std::vector<CsalIteration>& trace, std::ostream& out) {
  out << "iteration,log_likelihood,changed_assignments,selected_count\n" << std::setprecision(17);
  for (const auto& r : trace)
    out << r.iteration << ',' << r.log_likelihood << ',' << r.changed_assignments << ',' << r.selected_count << '\n';
}

void write_trace_csv(const std::vector<CsalIteration>& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_trace_csv(trace, out);
}

}  // namespace csal

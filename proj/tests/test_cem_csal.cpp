#include "csal/cem.hpp"
#include "csal/csal.hpp"
#include "csal/error.hpp"
#include "csal/eval.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <sstream>

using namespace csal;

namespace {

ClusterConfig config(int k, Seed seed = 0) {
  ClusterConfig c;
  c.k = k;
  c.seed = seed;
  return c;
}

CsalConfig csal_config(Clusterer c, Strategy s, double a, int k, Seed seed) {
  CsalConfig cfg;
  cfg.clusterer = c;
  cfg.labeler.strategy = s;
  cfg.labeler.percent_a = a;
  cfg.k = k;
  cfg.seed = seed;
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

TEST_SUITE("cem") {

TEST_CASE("m-step pooled spherical variance") {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 2, 0, 10, 10, 10, 12;
  const auto p = cem_m_step(x, {0, 0, 1, 1}, 2, 0.0);
  // Squared deviations: 1 + 1 + 1 + 1 = 4 over N d = 8.
  CHECK(p.sigma[0](0, 0) == doctest::Approx(0.5));
  CHECK(p.sigma[1](1, 1) == doctest::Approx(0.5));
  CHECK(p.sigma[0](0, 1) == 0.0);
  CHECK(p.alpha(0) == 0.5);
  CHECK_THROWS_AS(cem_m_step(x, {0, 0, 0, 0}, 2, 0.0), ValidationError);
}

TEST_CASE("single cluster is the closed form after one step") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 1);
  const auto init = kmeans(data, config(1));
  const auto r = cem_run(data, init, config(1));
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK((r.params.mu.row(0) - data.points.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("classification likelihood never decreases") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 1);
  for (Seed s = 0; s < 10; ++s)
    for (bool full : {false, true}) {
      const auto r = cem_run(data, kmeans(data, config(2, s)), config(2, s), {full});
      for (std::size_t t = 1; t < r.trace.size(); ++t) CHECK(r.trace[t] >= r.trace[t - 1] - 1e-9);
    }
}

TEST_CASE("fixed point on well separated data") {
  const auto data = generate_gaussian(GaussianSpec::gdata2(), 1);
  SoftPartition truth;
  truth.memberships = one_hot(data.labels, 3);
  truth.hard = data.labels;
  const auto first = cem_run(data, truth, config(3));
  SoftPartition again = first.partition;
  const auto second = cem_run(data, again, config(3));
  CHECK(second.iterations <= 2);
  CHECK(second.partition.hard == first.partition.hard);
}

TEST_CASE("trace csv") {
  std::ostringstream out;
  write_likelihood_trace_csv({-3.0, -2.5}, out);
  CHECK(out.str() == "iteration,log_likelihood\n1,-3\n2,-2.5\n");
}

}

TEST_SUITE("csal") {

TEST_CASE("runs converge and keep the quota") {
  const auto data = generate_gaussian(GaussianSpec::gdata2(), 1);
  for (auto c : {Clusterer::kmeans, Clusterer::fcm, Clusterer::gmm})
    for (auto s : {Strategy::distance, Strategy::entropy, Strategy::self_adaptive}) {
      const auto r = csal_run(data, csal_config(c, s, 40, 3, 2));
      CHECK(r.partition.is_row_stochastic());
      CHECK(r.iterations <= 100);
      CHECK((r.converged || r.iterations == 100));
      for (const auto& it : r.trace) CHECK(it.selected_count >= 3);
    }
}

TEST_CASE("selected counts follow the quota at every iteration") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 1);
  auto cfg = csal_config(Clusterer::kmeans, Strategy::entropy, 30, 2, 1);
  const auto init = run_clusterer(cfg.clusterer, data, cfg.cluster_config());
  auto subset = s_step(data, init, cfg.labeler);
  const auto sizes = init.cluster_sizes();
  for (int l = 0; l < 2; ++l) CHECK(subset.selected_per_cluster()[l] == quota(30, sizes[l]));
  auto params = init_params(data, subset);
  for (int t = 0; t < 5; ++t) {
    auto p = e_step(data, params);
    p.hard = c_step(p);
    subset = s_step(data, p, cfg.labeler);
    const auto sz = p.cluster_sizes();
    for (int l = 0; l < 2; ++l)
      if (sz[l] > 0) CHECK(subset.selected_per_cluster()[l] == quota(30, sz[l]));
    if (std::find(sz.begin(), sz.end(), 0) != sz.end()) break;
    params = m_step(data, subset);
  }
}

TEST_CASE("m-step hand values") {
  DataMatrix d;
  d.points.resize(4, 1);
  d.points << -1, 1, 9, 11;
  LabeledSubset s;
  s.selected = {1, 1, 1, 1};
  s.labels = {0, 0, 1, 1};
  s.k = 2;
  const auto p = m_step(d, s, 1e-6);
  CHECK(std::abs(p.mu(0, 0)) < 1e-15);
  CHECK(p.sigma[0](0, 0) == doctest::Approx(1 + 1e-6).epsilon(1e-14));
  CHECK(p.alpha(0) == 0.5);

  s.selected = {1, 1, 0, 0};
  CHECK_THROWS_AS(m_step(d, s), ValidationError);
}

TEST_CASE("all points selected reduces to the hard-partition fit") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 2);
  const auto init = kmeans(data, config(2));
  const auto subset = s_step(data, init, {Strategy::distance, 100});
  const auto p = init_params(data, subset);
  const auto q = cem_m_step(data.points, init.hard, 2, 1e-6, true);
  CHECK(p.alpha.isApprox(q.alpha, 1e-14));
  CHECK(p.mu.isApprox(q.mu, 1e-14));
  for (int l = 0; l < 2; ++l) CHECK(p.sigma[l].isApprox(q.sigma[l], 1e-12));
}

TEST_CASE("A = 100 coincides with full-covariance CEM") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 1);
  for (Seed seed = 0; seed < 5; ++seed) {
    const auto cfg = csal_config(Clusterer::kmeans, Strategy::distance, 100, 2, seed);
    const auto r = csal_run(data, cfg);
    const auto init = kmeans(data, cfg.cluster_config());
    const auto cem = cem_run(data, init, cfg.cluster_config(), {true});
    REQUIRE(!cem.trace.empty());
    CHECK(r.initial_log_likelihood == doctest::Approx(cem.trace[0]).epsilon(1e-12));
    for (std::size_t t = 0; t < r.trace.size() && t + 1 < cem.trace.size(); ++t)
      CHECK(r.trace[t].log_likelihood == doctest::Approx(cem.trace[t + 1]).epsilon(1e-12));
    double prev = r.initial_log_likelihood;
    for (const auto& it : r.trace) {
      CHECK(it.log_likelihood >= prev - 1e-9);
      prev = it.log_likelihood;
    }
    CHECK(r.partition.hard == cem.partition.hard);
  }
}

TEST_CASE("infinite tolerance stops after one cycle") {
  const auto data = generate_gaussian(GaussianSpec::gdata2(), 1);
  auto cfg = csal_config(Clusterer::gmm, Strategy::self_adaptive, 60, 3, 0);
  cfg.tol = std::numeric_limits<double>::infinity();
  const auto r = csal_run(data, cfg);
  CHECK(r.iterations == 1);
  CHECK(r.trace.size() == 1);

  const auto init = run_clusterer(cfg.clusterer, data, cfg.cluster_config());
  const auto params0 = init_params(data, s_step(data, init, cfg.labeler));
  auto p = e_step(data, params0);
  p.hard = c_step(p);
  const auto params1 = m_step(data, s_step(data, p, cfg.labeler));
  CHECK(r.params == params1);
}

TEST_CASE("reproducible") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 1);
  const auto cfg = csal_config(Clusterer::fcm, Strategy::self_adaptive, 50, 2, 4);
  const auto a = csal_run(data, cfg);
  const auto b = csal_run(data, cfg);
  CHECK(a.params == b.params);
  CHECK(a.partition.memberships == b.partition.memberships);
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("gmm-csal on gdata2 against plain gmm") {
  const auto data = generate_gaussian(GaussianSpec::gdata2(), 1);
  std::vector<double> diff;
  for (Seed s = 0; s < 20; ++s) {
    const auto cfg = csal_config(Clusterer::gmm, Strategy::self_adaptive, 60, 3, s);
    const auto r = csal_run(data, cfg);
    CHECK(r.converged);
    CHECK(r.iterations <= 50);
    const auto plain = gmm_em(data, cfg.cluster_config()).first;
    diff.push_back(classification_accuracy(r.partition, data.labels) - classification_accuracy(plain, data.labels));
  }
  CHECK(median(diff) >= 0.0);
}

TEST_CASE("ascent guard keeps the trace non-decreasing") {
  const auto data = generate_gaussian(GaussianSpec::gdata1(), 1);
  for (Seed s = 0; s < 5; ++s)
    for (auto strategy : {Strategy::distance, Strategy::entropy}) {
      auto cfg = csal_config(Clusterer::kmeans, strategy, 40, 2, s);
      cfg.ascent_guard = true;
      const auto r = csal_run(data, cfg);
      double prev = r.initial_log_likelihood;
      for (const auto& it : r.trace) {
        CHECK(it.log_likelihood >= prev);
        prev = it.log_likelihood;
      }
      CHECK(r.converged);
    }
}

TEST_CASE("trace csv") {
  std::ostringstream out;
  write_trace_csv({{1, -10.5, 3, 120}}, out);
  CHECK(out.str() == "iteration,log_likelihood,changed_assignments,selected_count\n1,-10.5,3,120\n");
}

}

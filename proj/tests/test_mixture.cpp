#include "csal/baselines.hpp"
#include "csal/error.hpp"
#include "csal/mixture.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace csal;

namespace {

MixtureParams random_params(int k, int d, std::mt19937_64& rng) {
  MixtureParams p;
  std::uniform_real_distribution<double> u(0.2, 1.0);
  p.alpha.resize(k);
  for (int l = 0; l < k; ++l) p.alpha(l) = u(rng);
  p.alpha /= p.alpha.sum();
  p.mu = oracle::random_points(k, d, rng, 2.0);
  for (int l = 0; l < k; ++l) p.sigma.push_back(oracle::random_spd(d, rng));
  return p;
}

}  // namespace

TEST_SUITE("mixture") {

TEST_CASE("posterior matches the density-ratio oracle") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 150; ++t) {
    const int k = 2 + t % 3, d = 1 + t % 4;
    const auto params = random_params(k, d, rng);
    const Eigen::MatrixXd x = oracle::random_points(12, d, rng, 1.5);
    const auto got = posterior(x, params);
    const auto want = oracle::posterior(x, params.alpha, params.mu, params.sigma);
    CHECK((got.memberships - want).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(got.is_row_stochastic());
  }
}

TEST_CASE("log density matches the closed form") {
  std::mt19937_64 rng(11);
  const auto params = random_params(2, 3, rng);
  const auto comps = factor(params);
  const Eigen::MatrixXd x = oracle::random_points(5, 3, rng);
  for (long i = 0; i < 5; ++i) {
    const double want = std::log(oracle::gaussian(x.row(i).transpose(), params.mu.row(0).transpose(), params.sigma[0]));
    CHECK(std::abs(log_gaussian_density(x.row(i).transpose(), comps[0]) - want) < 1e-10);
  }
}

TEST_CASE("posterior symmetry and dominance") {
  MixtureParams p;
  p.alpha = Eigen::Vector2d(0.5, 0.5);
  p.mu.resize(2, 2);
  p.mu << -1, 0, 1, 0;
  p.sigma = {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};
  Eigen::MatrixXd mid(1, 2);
  mid << 0, 3;
  const auto half = posterior(mid, p);
  CHECK(half.memberships(0, 0) == doctest::Approx(0.5));
  CHECK(half.hard[0] == 0);

  p.mu << 0, 0, 20, 20;
  p.sigma = {0.01 * Eigen::Matrix2d::Identity(), 50.0 * Eigen::Matrix2d::Identity()};
  Eigen::MatrixXd at(1, 2);
  at << 0, 0;
  CHECK(posterior(at, p).memberships(0, 0) > 0.999);
}

TEST_CASE("argmax tie rule") {
  CHECK(argmax_row(Eigen::RowVector2d(0.2, 0.8)) == 1);
  CHECK(argmax_row(Eigen::RowVector2d(0.5, 0.5)) == 0);
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd m = oracle::random_stochastic(50, 4, rng);
  const auto got = argmax_rows(m);
  for (long i = 0; i < 50; ++i) {
    int best = 0;
    for (int l = 1; l < 4; ++l)
      if (m(i, l) > m(i, best)) best = l;
    CHECK(got[i] == best);
  }
}

TEST_CASE("estimate from hand values") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 2, 10, 12;
  const auto p = estimate_mixture(x, one_hot({0, 0, 1, 1}, 2), {.cov_reg = 1e-6});
  CHECK(p.mu(0, 0) == doctest::Approx(1.0));
  CHECK(p.mu(1, 0) == doctest::Approx(11.0));
  CHECK(p.sigma[0](0, 0) == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));
  CHECK(p.alpha(0) == doctest::Approx(0.5));

  Eigen::MatrixXd y(2, 1);
  y << -1, 1;
  const auto q = estimate_mixture(y, Eigen::MatrixXd::Ones(2, 1), {.cov_reg = 1e-6});
  CHECK(std::abs(q.mu(0, 0)) < 1e-15);
  CHECK(q.sigma[0](0, 0) == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));
}

TEST_CASE("estimate matches a weighted-moment oracle") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 120; ++t) {
    const int k = 1 + t % 3, d = 1 + t % 3;
    const Eigen::MatrixXd x = oracle::random_points(20, d, rng);
    Eigen::MatrixXd w = oracle::random_stochastic(20, k, rng);
    if (t % 2) w = one_hot(argmax_rows(w), k);
    if ((w.colwise().sum().array() < d + 1.0).any()) continue;
    const auto p = estimate_mixture(x, w, {.cov_reg = 1e-4});
    for (int l = 0; l < k; ++l) {
      double mass = 0.0;
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < 20; ++i) {
        mass += w(i, l);
        mean += w(i, l) * x.row(i).transpose();
      }
      mean /= mass;
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd diff = x.row(i).transpose() - mean;
        cov += w(i, l) * diff * diff.transpose();
      }
      cov = cov / mass + 1e-4 * Eigen::MatrixXd::Identity(d, d);
      CHECK(std::abs(p.alpha(l) - mass / w.sum()) < 1e-12);
      CHECK((p.mu.row(l).transpose() - mean).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((p.sigma[l] - cov).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("small clusters are shrunk toward the pooled covariance") {
  Eigen::MatrixXd x(5, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1, 9, 9;
  const auto p = estimate_mixture(x, one_hot({0, 0, 0, 0, 1}, 2), {.cov_reg = 1e-6, .shrink_small = true});
  CHECK(p.sigma[1].determinant() > 1e-3);  // a singleton would otherwise be reg * I
  CHECK_NOTHROW(factor(p));
  const auto raw = estimate_mixture(x, one_hot({0, 0, 0, 0, 1}, 2), {.cov_reg = 1e-6});
  CHECK(raw.sigma[1].isApprox(1e-6 * Eigen::Matrix2d::Identity()));
}

TEST_CASE("empty component is an error") {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;
  CHECK_THROWS_AS(estimate_mixture(x, one_hot({0, 0, 0}, 2), {}), ValidationError);
}

TEST_CASE("non positive definite covariance names the component") {
  MixtureParams p;
  p.alpha = Eigen::Vector2d(0.5, 0.5);
  p.mu = Eigen::MatrixXd::Zero(2, 2);
  p.sigma = {Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix()};
  try {
    factor(p);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(e.component == 1);
  }
}

TEST_CASE("json round trip is bit-exact") {
  std::mt19937_64 rng(14);
  const auto p = random_params(3, 4, rng);
  CHECK(mixture_from_json(nlohmann::json::parse(to_json(p).dump())) == p);
  const auto path = std::filesystem::temp_directory_path() / "csal_mixture_test.json";
  save_json(p, path);
  CHECK(load_mixture(path) == p);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(mixture_from_json(nlohmann::json{{"format", "other"}}), FormatError);
}

}

TEST_SUITE("baselines") {

namespace {

LabeledSubset subset_of(const std::vector<int>& labels, int k, std::vector<char> selected = {}) {
  LabeledSubset s;
  s.labels = labels;
  s.k = k;
  s.selected = selected.empty() ? std::vector<char>(labels.size(), 1) : selected;
  return s;
}

}  // namespace

TEST_CASE("naive Bayes hand values") {
  DataMatrix d;
  d.points.resize(2, 1);
  d.points << 0, 2;
  const auto m = nb_train(d, subset_of({0, 0}, 1));
  CHECK(m.means(0, 0) == 1.0);
  CHECK(m.variances(0, 0) == 1.0);

  d.points.resize(4, 1);
  d.points << 0, 1, 5, 6;
  const auto two = nb_train(d, subset_of({0, 0, 1, 1}, 2));
  CHECK(two.priors(0) == 0.5);
  CHECK(two.priors(1) == 0.5);
  CHECK_THROWS_AS(nb_train(d, subset_of({0, 0, 0, 0}, 2)), ValidationError);
}

TEST_CASE("naive Bayes matches per-column oracles") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 100; ++t) {
    DataMatrix d;
    d.points = oracle::random_points(30, 3, rng);
    std::vector<int> labels(30);
    std::vector<char> selected(30);
    for (int i = 0; i < 30; ++i) {
      labels[i] = i % 2;
      selected[i] = i < 6 || rng() % 2;
    }
    const auto m = nb_train(d, subset_of(labels, 2, selected));
    for (int l = 0; l < 2; ++l) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(3), sq = Eigen::VectorXd::Zero(3);
      double n = 0;
      for (int i = 0; i < 30; ++i)
        if (selected[i] && labels[i] == l) {
          sum += d.points.row(i).transpose();
          n += 1;
        }
      const Eigen::VectorXd mean = sum / n;
      for (int i = 0; i < 30; ++i)
        if (selected[i] && labels[i] == l) sq += (d.points.row(i).transpose() - mean).array().square().matrix();
      CHECK((m.means.row(l).transpose() - mean).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((m.variances.row(l).transpose() - sq / n).cwiseAbs().maxCoeff() < 1e-12);
    }

    // Posteriors against a non-log evaluation with diagonal covariances.
    const auto post = nb_classify(m, d);
    std::vector<Eigen::MatrixXd> sigma;
    for (int l = 0; l < 2; ++l) sigma.push_back(m.variances.row(l).asDiagonal().toDenseMatrix());
    const auto want = oracle::posterior(d.points, m.priors, m.means, sigma);
    CHECK((post.memberships - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("naive Bayes symmetry and dominance") {
  NaiveBayesModel m;
  m.priors = Eigen::Vector2d(0.5, 0.5);
  m.means.resize(2, 1);
  m.means << -1, 1;
  m.variances = Eigen::MatrixXd::Ones(2, 1);
  DataMatrix d;
  d.points = Eigen::MatrixXd::Zero(1, 1);
  CHECK(nb_classify(m, d).memberships(0, 0) == doctest::Approx(0.5));
  m.means << 0, 30;
  m.variances << 0.01, 4;
  CHECK(nb_classify(m, d).memberships(0, 0) > 0.999);
  CHECK(naive_bayes_from_json(nlohmann::json::parse(to_json(m).dump())).means == m.means);
}

}

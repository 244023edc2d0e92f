#pragma once

// Straight-line reference computations used as independent oracles. They
// avoid the library on purpose: plain loops, no log-space tricks, no Eigen
// decompositions beyond what a textbook formula needs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v) / std::log(2.0);
  return h;
}

inline double dist(const Eigen::MatrixXd& x, long i, long j) {
  double s = 0.0;
  for (long c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
  return std::sqrt(s);
}

inline double silhouette(const Eigen::MatrixXd& x, const std::vector<int>& hard, int k, long i) {
  std::vector<double> sum(k, 0.0);
  std::vector<int> cnt(k, 0);
  for (long j = 0; j < x.rows(); ++j) {
    cnt[hard[j]]++;
    if (j != i) sum[hard[j]] += dist(x, i, j);
  }
  const int own = hard[i];
  if (cnt[own] == 1) return 0.0;
  const double a = sum[own] / (cnt[own] - 1);
  double b = INFINITY;
  for (int l = 0; l < k; ++l)
    if (l != own && cnt[l] > 0) b = std::min(b, sum[l] / cnt[l]);
  const double m = std::max(a, b);
  return m == 0.0 ? 0.0 : (b - a) / m;
}

inline double mean_silhouette(const Eigen::MatrixXd& x, const std::vector<int>& hard, int k, int l) {
  double s = 0.0;
  int n = 0;
  for (long i = 0; i < x.rows(); ++i)
    if (hard[i] == l) {
      s += silhouette(x, hard, k, i);
      ++n;
    }
  return s / n;
}

// Multivariate normal density via the explicit inverse and determinant.
inline double gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) {
  const long d = x.size();
  const Eigen::VectorXd diff = x - mu;
  const double q = diff.dot(sigma.inverse() * diff);
  return std::exp(-0.5 * q) / std::sqrt(std::pow(2.0 * kPi, static_cast<double>(d)) * sigma.determinant());
}

inline Eigen::MatrixXd posterior(const Eigen::MatrixXd& x, const Eigen::VectorXd& alpha, const Eigen::MatrixXd& mu,
                                 const std::vector<Eigen::MatrixXd>& sigma) {
  Eigen::MatrixXd w(x.rows(), alpha.size());
  for (long i = 0; i < x.rows(); ++i) {
    double total = 0.0;
    for (long l = 0; l < alpha.size(); ++l) {
      w(i, l) = alpha(l) * gaussian(x.row(i).transpose(), mu.row(l).transpose(), sigma[l]);
      total += w(i, l);
    }
    w.row(i) /= total;
  }
  return w;
}

// Accuracy under the best of all K! bijections, enumerated with next_permutation.
inline double best_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int k) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += perm[pred[i]] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

// Bezdek updates until the centers stop moving.
inline Eigen::MatrixXd fcm_fixed_point(const Eigen::MatrixXd& x, Eigen::MatrixXd c, double m, int iters) {
  const long n = x.rows(), k = c.rows();
  Eigen::MatrixXd u(n, k);
  for (int it = 0; it < iters; ++it) {
    for (long i = 0; i < n; ++i)
      for (long l = 0; l < k; ++l) {
        const double dl = (x.row(i) - c.row(l)).norm();
        double s = 0.0;
        for (long j = 0; j < k; ++j) s += std::pow(dl / (x.row(i) - c.row(j)).norm(), 2.0 / (m - 1.0));
        u(i, l) = 1.0 / s;
      }
    for (long l = 0; l < k; ++l) {
      Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(x.cols());
      double den = 0.0;
      for (long i = 0; i < n; ++i) {
        const double w = std::pow(u(i, l), m);
        num += w * x.row(i);
        den += w;
      }
      c.row(l) = num / den;
    }
  }
  return u;
}

// Lloyd iterations from the given centers; returns the final within-cluster
// sum of squares. An emptied cluster keeps its old center.
inline double lloyd_objective(const Eigen::MatrixXd& x, Eigen::MatrixXd c, int iters) {
  const long n = x.rows(), k = c.rows();
  std::vector<int> a(n);
  double obj = 0.0;
  for (int it = 0; it < iters; ++it) {
    obj = 0.0;
    for (long i = 0; i < n; ++i) {
      double best = INFINITY;
      for (long l = 0; l < k; ++l) {
        const double d = (x.row(i) - c.row(l)).squaredNorm();
        if (d < best) {
          best = d;
          a[i] = static_cast<int>(l);
        }
      }
      obj += best;
    }
    for (long l = 0; l < k; ++l) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
      int cnt = 0;
      for (long i = 0; i < n; ++i)
        if (a[i] == l) {
          sum += x.row(i);
          ++cnt;
        }
      if (cnt) c.row(l) = sum / cnt;
    }
  }
  obj = 0.0;
  for (long i = 0; i < n; ++i) obj += (x.row(i) - c.row(a[i])).squaredNorm();
  return obj;
}

// Textbook EM for a full-covariance mixture from a given responsibility matrix.
// Returns the final observed-data log-likelihood.
inline double em_log_likelihood(const Eigen::MatrixXd& x, Eigen::MatrixXd r, double reg, int iters) {
  const long n = x.rows(), d = x.cols(), k = r.cols();
  double ll = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd alpha(k);
    Eigen::MatrixXd mu(k, d);
    std::vector<Eigen::MatrixXd> sigma(k);
    for (long l = 0; l < k; ++l) {
      const double nl = r.col(l).sum();
      alpha(l) = nl / n;
      mu.row(l) = (r.col(l).transpose() * x) / nl;
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
      for (long i = 0; i < n; ++i) {
        const Eigen::VectorXd diff = (x.row(i) - mu.row(l)).transpose();
        s += r(i, l) * diff * diff.transpose();
      }
      sigma[l] = s / nl + reg * Eigen::MatrixXd::Identity(d, d);
    }
    ll = 0.0;
    for (long i = 0; i < n; ++i) {
      double total = 0.0;
      for (long l = 0; l < k; ++l) {
        r(i, l) = alpha(l) * gaussian(x.row(i).transpose(), mu.row(l).transpose(), sigma[l]);
        total += r(i, l);
      }
      r.row(i) /= total;
      ll += std::log(total);
    }
  }
  return ll;
}

inline Eigen::MatrixXd random_points(long n, long d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Eigen::MatrixXd x(n, d);
  for (long i = 0; i < n; ++i)
    for (long c = 0; c < d; ++c) x(i, c) = z(rng);
  return x;
}

inline Eigen::MatrixXd random_spd(long d, std::mt19937_64& rng) {
  const Eigen::MatrixXd a = random_points(d, d, rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

inline Eigen::MatrixXd random_stochastic(long n, long k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(n, k);
  for (long i = 0; i < n; ++i) {
    for (long l = 0; l < k; ++l) m(i, l) = u(rng);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

}  // namespace oracle

#include "csal/mixture.hpp"

#include "csal/error.hpp"
#include "csal/kernels.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace csal {

void MixtureParams::validate() const {
  const int kk = k();
  if (kk < 1) throw ValidationError("mixture has no components");
  if (mu.rows() != kk || static_cast<int>(sigma.size()) != kk)
    throw ValidationError("mixture parameter shapes disagree on K");
  if ((alpha.array() < 0.0).any() || std::abs(alpha.sum() - 1.0) > 1e-9)
    throw ValidationError("mixing weights must be non-negative and sum to 1");
  for (int l = 0; l < kk; ++l)
    if (sigma[l].rows() != dim() || sigma[l].cols() != dim())
      throw ValidationError("covariance " + std::to_string(l) + " has the wrong shape");
}

bool operator==(const MixtureParams& a, const MixtureParams& b) {
  if (a.alpha != b.alpha || a.mu != b.mu || a.sigma.size() != b.sigma.size()) return false;
  for (std::size_t l = 0; l < a.sigma.size(); ++l)
    if (a.sigma[l] != b.sigma[l]) return false;
  return true;
}

std::vector<FactoredComponent> factor(const MixtureParams& params) {
  std::vector<FactoredComponent> out(params.k());
  for (int l = 0; l < params.k(); ++l) {
    Eigen::LLT<Eigen::MatrixXd> llt(params.sigma[l]);
    if (llt.info() != Eigen::Success || !params.sigma[l].allFinite())
      throw NumericError("covariance of component " + std::to_string(l) + " is not positive definite", -1, l);
    auto& c = out[l];
    c.mean = params.mu.row(l).transpose();
    c.lower = llt.matrixL();
    c.log_det = 2.0 * c.lower.diagonal().array().log().sum();
    c.log_alpha = std::log(params.alpha(l));
  }
  return out;
}

double log_gaussian_density(const Eigen::Ref<const Eigen::VectorXd>& x, const FactoredComponent& c) {
  Eigen::VectorXd y = x - c.mean;
  c.lower.triangularView<Eigen::Lower>().solveInPlace(y);
  const double d = static_cast<double>(c.mean.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + c.log_det + y.squaredNorm());
}

Eigen::MatrixXd log_joint(const Eigen::MatrixXd& points, const MixtureParams& params) {
  const auto comps = factor(params);
  Eigen::MatrixXd out;
  kernels::log_joint(points, comps, out);
  return out;
}

SoftPartition posterior(const Eigen::MatrixXd& points, const MixtureParams& params, double* log_likelihood) {
  SoftPartition out;
  out.memberships = log_joint(points, params);
  const Eigen::VectorXd log_norm = normalize_log_rows(out.memberships);
  if (log_likelihood) *log_likelihood = log_norm.sum();
  out.hard = argmax_rows(out.memberships);
  out.centers = params.mu;
  return out;
}

MixtureParams estimate_mixture(const Eigen::MatrixXd& points, const Eigen::MatrixXd& weights,
                               const EstimateOptions& options) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  const Eigen::Index k = weights.cols();
  if (weights.rows() != n) throw ValidationError("weight matrix must have one row per point");

  MixtureParams p;
  const Eigen::VectorXd mass = weights.colwise().sum().transpose();
  for (Eigen::Index l = 0; l < k; ++l)
    if (!(mass(l) > 0.0)) throw ValidationError("cluster " + std::to_string(l) + " has no training points");

  p.alpha = mass / mass.sum();
  p.mu = (weights.transpose() * points).array().colwise() / mass.array();

  std::vector<Eigen::MatrixXd> scatter(k);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index l = 0; l < k; ++l) {
    const Eigen::MatrixXd centered = points.rowwise() - p.mu.row(l);
    scatter[l] = centered.transpose() * weights.col(l).asDiagonal() * centered;
    pooled += scatter[l];
  }
  pooled /= mass.sum();

  p.sigma.resize(k);
  const double full = static_cast<double>(d + 1);
  for (Eigen::Index l = 0; l < k; ++l) {
    Eigen::MatrixXd cov = scatter[l] / mass(l);
    if (options.shrink_small && mass(l) < full) {
      const double rho = (full - mass(l)) / full;
      cov = rho * pooled + (1.0 - rho) * cov;
    }
    cov = 0.5 * (cov + cov.transpose());
    cov.diagonal().array() += options.cov_reg;
    p.sigma[l] = std::move(cov);
  }
  return p;
}

nlohmann::json to_json(const MixtureParams& params) {
  nlohmann::json doc;
  doc["format"] = "csal.mixture";
  doc["version"] = 1;
  doc["k"] = params.k();
  doc["dim"] = params.dim();
  doc["alpha"] = std::vector<double>(params.alpha.data(), params.alpha.data() + params.alpha.size());
  auto& mu = doc["mu"] = nlohmann::json::array();
  for (int l = 0; l < params.k(); ++l) {
    const Eigen::RowVectorXd row = params.mu.row(l);
    mu.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  auto& sigma = doc["sigma"] = nlohmann::json::array();
  for (const auto& s : params.sigma) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      const Eigen::RowVectorXd row = s.row(r);
      rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    sigma.push_back(std::move(rows));
  }
  return doc;
}

MixtureParams mixture_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "csal.mixture") throw FormatError("not a csal.mixture document");
    if (doc.at("version").get<int>() != 1)
      throw FormatError("unsupported mixture version " + doc.at("version").dump());
    const int k = doc.at("k").get<int>();
    const int d = doc.at("dim").get<int>();
    MixtureParams p;
    p.alpha.resize(k);
    p.mu.resize(k, d);
    p.sigma.assign(k, Eigen::MatrixXd(d, d));
    for (int l = 0; l < k; ++l) {
      p.alpha(l) = doc.at("alpha").at(l).get<double>();
      for (int j = 0; j < d; ++j) p.mu(l, j) = doc.at("mu").at(l).at(j).get<double>();
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) p.sigma[l](r, c) = doc.at("sigma").at(l).at(r).at(c).get<double>();
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed mixture document: ") + e.what());
  }
}

void save_json(const MixtureParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(params).dump(2) << '\n';
}

MixtureParams load_mixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return mixture_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace csal

#include "csal/baselines.hpp"

#include "csal/error.hpp"

#include <cmath>
#include <numbers>

namespace csal {

NaiveBayesModel nb_train(const DataMatrix& data, const LabeledSubset& subset) {
  if (subset.size() != data.size()) throw ValidationError("subset does not match the data size");
  const int k = subset.k;
  const Eigen::Index d = data.dim();
  NaiveBayesModel model;
  model.means = Eigen::MatrixXd::Zero(k, d);
  model.variances = Eigen::MatrixXd::Zero(k, d);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (!subset.selected[i]) continue;
    model.means.row(subset.labels[i]) += data.points.row(i);
    counts(subset.labels[i]) += 1.0;
  }
  for (int l = 0; l < k; ++l)
    if (counts(l) == 0.0) throw ValidationError("class " + std::to_string(l) + " has no training points");
  model.means.array().colwise() /= counts.array();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (!subset.selected[i]) continue;
    const int l = subset.labels[i];
    model.variances.row(l) += (data.points.row(i) - model.means.row(l)).array().square().matrix();
  }
  model.variances.array().colwise() /= counts.array();
  model.variances = model.variances.cwiseMax(kVarianceFloor);
  model.priors = counts / counts.sum();
  return model;
}

SoftPartition nb_classify(const NaiveBayesModel& model, const DataMatrix& data) {
  const int k = model.k();
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  SoftPartition out;
  out.memberships.resize(data.size(), k);
  for (int l = 0; l < k; ++l) {
    const Eigen::ArrayXd var = model.variances.row(l).transpose().array();
    const double norm = std::log(model.priors(l)) - 0.5 * (var.log().sum() + static_cast<double>(var.size()) * log_2pi);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const Eigen::ArrayXd diff = (data.points.row(i) - model.means.row(l)).transpose().array();
      out.memberships(i, l) = norm - 0.5 * (diff.square() / var).sum();
    }
  }
  normalize_log_rows(out.memberships);
  out.hard = argmax_rows(out.memberships);
  out.centers = model.means;
  return out;
}

nlohmann::json to_json(const NaiveBayesModel& model) {
  auto rows = [](const Eigen::MatrixXd& m) {
    auto a = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Eigen::RowVectorXd row = m.row(r);
      a.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    return a;
  };
  nlohmann::json doc;
  doc["format"] = "csal.naive_bayes";
  doc["version"] = 1;
  doc["k"] = model.k();
  doc["dim"] = model.means.cols();
  doc["priors"] = std::vector<double>(model.priors.data(), model.priors.data() + model.priors.size());
  doc["means"] = rows(model.means);
  doc["variances"] = rows(model.variances);
  return doc;
}

NaiveBayesModel naive_bayes_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "csal.naive_bayes") throw FormatError("not a csal.naive_bayes document");
    if (doc.at("version").get<int>() != 1) throw FormatError("unsupported naive Bayes version");
    const int k = doc.at("k").get<int>();
    const int d = doc.at("dim").get<int>();
    NaiveBayesModel m;
    m.priors.resize(k);
    m.means.resize(k, d);
    m.variances.resize(k, d);
    for (int l = 0; l < k; ++l) {
      m.priors(l) = doc.at("priors").at(l).get<double>();
      for (int j = 0; j < d; ++j) {
        m.means(l, j) = doc.at("means").at(l).at(j).get<double>();
        m.variances(l, j) = doc.at("variances").at(l).at(j).get<double>();
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed naive Bayes document: ") + e.what());
  }
}

}  // namespace csal

#pragma once

#include "csal/data.hpp"
#include "csal/labeling.hpp"
#include "csal/partition.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>

namespace csal {

// Gaussian naive Bayes with per-class diagonal variances.
struct NaiveBayesModel {
  Eigen::VectorXd priors;     // K
  Eigen::MatrixXd means;      // K x d
  Eigen::MatrixXd variances;  // K x d

  int k() const { return static_cast<int>(priors.size()); }
};

inline constexpr double kVarianceFloor = 1e-9;

NaiveBayesModel nb_train(const DataMatrix& data, const LabeledSubset& subset);
SoftPartition nb_classify(const NaiveBayesModel& model, const DataMatrix& data);

nlohmann::json to_json(const NaiveBayesModel& model);
NaiveBayesModel naive_bayes_from_json(const nlohmann::json& doc);

}  // namespace csal

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace csal {

using Seed = std::uint64_t;

/// N x d observations with optional ground-truth classes.
///
/// The labels are never read by the clustering or classification code; only
/// the evaluation harness looks at them.
struct DataMatrix {
  Eigen::MatrixXd points;                 // N x d
  std::vector<int> labels;                // empty when unlabeled, else ids in [0, class_names.size())
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names; // empty or d entries

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  bool has_labels() const { return !labels.empty(); }
  int num_classes() const;

  // Throws ValidationError when an invariant does not hold.
  void validate() const;
};

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int count = 0;
};

struct GaussianSpec {
  std::vector<GaussianComponent> components;

  void validate() const;

  static GaussianSpec gdata1();
  static GaussianSpec gdata2();
  // Returns gdata1/gdata2 by name; throws ValidationError otherwise.
  static GaussianSpec preset(const std::string& name);
  static bool is_preset(const std::string& name);
};

// Draws each component's points as mean + L z with L the Cholesky factor of
// the covariance and z i.i.d. standard normal. Bit-identical for equal seeds.
DataMatrix generate_gaussian(const GaussianSpec& spec, Seed seed);

// Reads {"components": [{"mean": [...], "covariance": [[...]], "count": n}]}.
GaussianSpec read_gaussian_spec(const std::filesystem::path& path);

struct LastColumn {};
using LabelColumn = std::variant<std::monostate, LastColumn, int>;  // none, last, 0-based index

DataMatrix load_csv(const std::filesystem::path& path, LabelColumn label_column = LastColumn{});
DataMatrix parse_csv(std::istream& in, LabelColumn label_column = LastColumn{});

// Header row, then one row per point with the label (if any) in the last column.
void write_csv(const DataMatrix& data, std::ostream& out);
void write_csv(const DataMatrix& data, const std::filesystem::path& path);

// Column-wise z-score with the N-1 standard deviation; zero-variance columns are only centered.
DataMatrix standardize(const DataMatrix& data);

}  // namespace csal

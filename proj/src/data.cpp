#include "csal/data.hpp"

#include "csal/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace csal {

int DataMatrix::num_classes() const {
  if (!has_labels()) return 0;
  std::set<int> distinct(labels.begin(), labels.end());
  return static_cast<int>(distinct.size());
}

void DataMatrix::validate() const {
  if (size() < 1 || dim() < 1) throw ValidationError("data matrix must have N >= 1 and d >= 1");
  if (!points.allFinite()) throw ValidationError("data matrix contains NaN or Inf");
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != dim())
    throw ValidationError("feature_names length differs from d");
  if (has_labels()) {
    if (static_cast<Eigen::Index>(labels.size()) != size())
      throw ValidationError("true_labels length differs from N");
    for (int l : labels)
      if (l < 0 || l >= static_cast<int>(class_names.size()))
        throw ValidationError("label id outside class_names");
  }
}

void GaussianSpec::validate() const {
  if (components.empty()) throw ValidationError("gaussian spec has no components");
  const auto d = components.front().mean.size();
  if (d < 1) throw ValidationError("component 0: empty mean");
  long total = 0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& comp = components[c];
    const std::string name = "component " + std::to_string(c);
    if (comp.mean.size() != d) throw ValidationError(name + ": mean dimension mismatch");
    if (comp.covariance.rows() != d || comp.covariance.cols() != d)
      throw ValidationError(name + ": covariance must be " + std::to_string(d) + "x" + std::to_string(d));
    if (comp.count < 1) throw ValidationError(name + ": count must be positive");
    if (!comp.mean.allFinite() || !comp.covariance.allFinite())
      throw ValidationError(name + ": non-finite parameter");
    if (!comp.covariance.isApprox(comp.covariance.transpose(), 1e-12))
      throw ValidationError(name + ": covariance is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(comp.covariance);
    if (llt.info() != Eigen::Success) throw ValidationError(name + ": covariance is not positive definite");
    total += comp.count;
  }
  if (total < 2 * static_cast<long>(components.size()))
    throw ValidationError("gaussian spec needs at least 2 points per component in total");
}

GaussianSpec GaussianSpec::gdata1() {
  GaussianSpec spec;
  spec.components.push_back({Eigen::Vector2d(1, 1), Eigen::Vector2d(1.0, 0.25).asDiagonal(), 100});
  spec.components.push_back({Eigen::Vector2d(2, 0), Eigen::Vector2d(0.8, 1.0).asDiagonal(), 100});
  return spec;
}

GaussianSpec GaussianSpec::gdata2() {
  GaussianSpec spec;
  spec.components.push_back({Eigen::Vector2d(0, 0), Eigen::Matrix2d::Identity(), 100});
  spec.components.push_back({Eigen::Vector2d(6, 6), 3.0 * Eigen::Matrix2d::Identity(), 100});
  spec.components.push_back({Eigen::Vector2d(-10, -10), 100.0 * Eigen::Matrix2d::Identity(), 100});
  return spec;
}

bool GaussianSpec::is_preset(const std::string& name) { return name == "gdata1" || name == "gdata2"; }

GaussianSpec GaussianSpec::preset(const std::string& name) {
  if (name == "gdata1") return gdata1();
  if (name == "gdata2") return gdata2();
  throw ValidationError("unknown preset '" + name + "' (expected gdata1 or gdata2)");
}

DataMatrix generate_gaussian(const GaussianSpec& spec, Seed seed) {
  spec.validate();
  const auto d = spec.components.front().mean.size();
  long total = 0;
  for (const auto& c : spec.components) total += c.count;

  DataMatrix out;
  out.points.resize(total, d);
  out.labels.reserve(total);
  for (Eigen::Index j = 0; j < d; ++j) out.feature_names.push_back("x" + std::to_string(j + 1));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const auto& comp = spec.components[c];
    const Eigen::MatrixXd lower = comp.covariance.llt().matrixL();
    out.class_names.push_back(std::to_string(c + 1));
    Eigen::VectorXd z(d);
    for (int n = 0; n < comp.count; ++n, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(rng);
      out.points.row(row) = (comp.mean + lower * z).transpose();
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

namespace {

Eigen::VectorXd json_vector(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    cells.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

bool parse_double(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

GaussianSpec read_gaussian_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spec file " + path.string());
  GaussianSpec spec;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& c : doc.at("components")) {
      GaussianComponent comp;
      comp.mean = json_vector(c.at("mean"));
      const auto& cov = c.at("covariance");
      comp.covariance.resize(cov.size(), cov.empty() ? 0 : cov[0].size());
      for (std::size_t r = 0; r < cov.size(); ++r) {
        if (cov[r].size() != static_cast<std::size_t>(comp.covariance.cols()))
          throw FormatError("ragged covariance matrix");
        for (std::size_t k = 0; k < cov[r].size(); ++k) comp.covariance(r, k) = cov[r][k].get<double>();
      }
      comp.count = c.at("count").get<int>();
      spec.components.push_back(std::move(comp));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  spec.validate();
  return spec;
}

DataMatrix parse_csv(std::istream& in, LabelColumn label_column) {
  std::vector<std::vector<std::string>> rows;
  std::vector<long> line_numbers;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw FormatError("empty CSV");

  const auto width = static_cast<long>(rows.front().size());
  long label_index = -1;
  if (std::holds_alternative<LastColumn>(label_column)) {
    label_index = width - 1;
  } else if (const int* idx = std::get_if<int>(&label_column)) {
    label_index = *idx < 0 ? width + *idx : *idx;
    if (label_index < 0 || label_index >= width)
      throw ValidationError("label column " + std::to_string(*idx) + " out of range");
  }
  if (width - (label_index >= 0 ? 1 : 0) < 1) throw FormatError("CSV has no feature columns");

  for (std::size_t r = 0; r < rows.size(); ++r)
    if (static_cast<long>(rows[r].size()) != width)
      throw FormatError("row " + std::to_string(line_numbers[r]) + " has " +
                            std::to_string(rows[r].size()) + " columns, expected " + std::to_string(width),
                        line_numbers[r]);

  // A first row without a single numeric feature cell is a header; a row
  // that mixes numbers and text is data with a bad cell.
  bool header = true;
  for (long c = 0; c < width; ++c) {
    double v;
    if (c != label_index && parse_double(rows.front()[c], v)) header = false;
  }

  DataMatrix out;
  const std::size_t first = header ? 1 : 0;
  const auto n = static_cast<Eigen::Index>(rows.size() - first);
  if (n < 1) throw FormatError("CSV has a header but no data rows");
  const auto d = width - (label_index >= 0 ? 1 : 0);
  out.points.resize(n, d);

  for (long c = 0; c < width; ++c)
    if (c != label_index)
      out.feature_names.push_back(header ? rows.front()[c] : "x" + std::to_string(out.feature_names.size() + 1));

  std::unordered_map<std::string, int> class_ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& cells = rows[first + i];
    Eigen::Index j = 0;
    for (long c = 0; c < width; ++c) {
      if (c == label_index) {
        auto [it, inserted] = class_ids.try_emplace(cells[c], static_cast<int>(out.class_names.size()));
        if (inserted) out.class_names.push_back(cells[c]);
        out.labels.push_back(it->second);
        continue;
      }
      double v;
      if (!parse_double(cells[c], v))
        throw FormatError("cannot parse '" + cells[c] + "' as a number at row " +
                              std::to_string(line_numbers[first + i]) + ", column " + std::to_string(c + 1),
                          line_numbers[first + i], c + 1);
      out.points(i, j++) = v;
    }
  }
  out.validate();
  return out;
}

DataMatrix load_csv(const std::filesystem::path& path, LabelColumn label_column) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_csv(in, label_column);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.row, e.column);
  }
}

void write_csv(const DataMatrix& data, std::ostream& out) {
  const auto d = data.dim();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j) out << ',';
    out << (static_cast<Eigen::Index>(data.feature_names.size()) == d ? data.feature_names[j]
                                                                      : "x" + std::to_string(j + 1));
  }
  if (data.has_labels()) out << ",label";
  out << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j) out << ',';
      out << data.points(i, j);
    }
    if (data.has_labels()) out << ',' << data.class_names[data.labels[i]];
    out << '\n';
  }
}

void write_csv(const DataMatrix& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(data, out);
}

DataMatrix standardize(const DataMatrix& data) {
  const auto n = data.size();
  if (n < 2) throw ValidationError("standardize needs at least 2 points");
  DataMatrix out = data;
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    auto col = out.points.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n - 1));
    if (sd > 0.0) col /= sd;
  }
  return out;
}

}  // namespace csal

#include "csal/data.hpp"
#include "csal/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace csal;

TEST_SUITE("data") {

TEST_CASE("gdata1 preset constants") {
  const auto spec = GaussianSpec::gdata1();
  REQUIRE(spec.components.size() == 2);
  CHECK(spec.components[0].mean == Eigen::Vector2d(1, 1));
  CHECK(spec.components[1].mean == Eigen::Vector2d(2, 0));
  CHECK(spec.components[0].covariance == Eigen::Vector2d(1, 0.25).asDiagonal().toDenseMatrix());
  CHECK(spec.components[1].covariance == Eigen::Vector2d(0.8, 1).asDiagonal().toDenseMatrix());
  for (const auto& c : spec.components) CHECK(c.count == 100);
  const auto data = generate_gaussian(spec, 7);
  CHECK(data.size() == 200);
  CHECK(data.dim() == 2);
  CHECK(data.num_classes() == 2);
}

TEST_CASE("gdata2 preset constants") {
  const auto spec = GaussianSpec::gdata2();
  REQUIRE(spec.components.size() == 3);
  CHECK(spec.components[0].mean == Eigen::Vector2d(0, 0));
  CHECK(spec.components[1].mean == Eigen::Vector2d(6, 6));
  CHECK(spec.components[2].mean == Eigen::Vector2d(-10, -10));
  CHECK(spec.components[0].covariance == Eigen::Matrix2d::Identity());
  CHECK(spec.components[1].covariance == 3.0 * Eigen::Matrix2d::Identity());
  CHECK(spec.components[2].covariance == 100.0 * Eigen::Matrix2d::Identity());
  const auto data = generate_gaussian(spec, 1);
  CHECK(data.size() == 300);
  CHECK(data.num_classes() == 3);
}

TEST_CASE("generation is bit-identical for equal seeds") {
  const auto a = generate_gaussian(GaussianSpec::gdata2(), 11);
  const auto b = generate_gaussian(GaussianSpec::gdata2(), 11);
  const auto c = generate_gaussian(GaussianSpec::gdata2(), 12);
  CHECK(a.points == b.points);
  CHECK(a.labels == b.labels);
  CHECK(a.points != c.points);
}

TEST_CASE("single standard normal component") {
  GaussianSpec spec{{{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), 5}}};
  const auto five = generate_gaussian(spec, 3);
  for (int c = 0; c < 2; ++c) CHECK(std::abs(five.points.col(c).mean()) < 3.0 / std::sqrt(5.0));

  // 10,000 draws: the empirical CDF at a few points stays close to Phi.
  spec.components[0].count = 10000;
  const auto many = generate_gaussian(spec, 3);
  for (double t : {-1.5, -0.5, 0.0, 0.7, 2.0}) {
    const double phi = 0.5 * std::erfc(-t / std::sqrt(2.0));
    const double frac = (many.points.col(0).array() <= t).cast<double>().mean();
    CHECK(std::abs(frac - phi) < 5.0 * std::sqrt(phi * (1 - phi) / 10000.0));
  }
}

TEST_CASE("invalid specs are rejected") {
  GaussianSpec spec{{{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), 10},
                     {Eigen::Vector2d::Ones(), Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix(), 10}}};
  try {
    generate_gaussian(spec, 0);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("component 1") != std::string::npos);
  }
  spec.components[1].covariance = Eigen::Matrix2d::Identity();
  spec.components[1].mean = Eigen::Vector3d::Ones();
  CHECK_THROWS_AS(generate_gaussian(spec, 0), ValidationError);
  CHECK_THROWS_AS(GaussianSpec::preset("gdata3"), ValidationError);
}

TEST_CASE("spec file") {
  const auto path = std::filesystem::temp_directory_path() / "csal_spec_test.json";
  {
    std::ofstream out(path);
    out << R"({"components":[{"mean":[0,0],"covariance":[[1,0],[0,1]],"count":4},
                              {"mean":[5,5],"covariance":[[2,0.5],[0.5,1]],"count":6}]})";
  }
  const auto spec = read_gaussian_spec(path);
  REQUIRE(spec.components.size() == 2);
  CHECK(spec.components[1].covariance(0, 1) == 0.5);
  CHECK(generate_gaussian(spec, 0).size() == 10);
  std::filesystem::remove(path);
}

TEST_CASE("parse_csv") {
  SUBCASE("single row") {
    std::istringstream in("1.0,2.0,A\n");
    const auto d = parse_csv(in);
    CHECK(d.size() == 1);
    CHECK(d.dim() == 2);
    CHECK(d.class_names == std::vector<std::string>{"A"});
  }
  SUBCASE("header and labels") {
    std::istringstream in("x,y,class\n1,2,b\n3,4,a\n5,6,b\n");
    const auto d = parse_csv(in);
    CHECK(d.size() == 3);
    CHECK(d.feature_names == std::vector<std::string>{"x", "y"});
    CHECK(d.num_classes() == 2);
    CHECK(d.labels[0] == d.labels[2]);
    CHECK(d.labels[0] != d.labels[1]);
  }
  SUBCASE("unparseable cell cites its position") {
    std::istringstream in("1.0,x,A\n");
    try {
      parse_csv(in);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.row == 1);
      CHECK(e.column == 2);
    }
  }
  SUBCASE("ragged rows") {
    std::istringstream in("1,2,A\n3,B\n");
    CHECK_THROWS_AS(parse_csv(in), FormatError);
  }
  SUBCASE("no label column") {
    std::istringstream in("1,2\n3,4\n");
    const auto d = parse_csv(in, std::monostate{});
    CHECK(d.dim() == 2);
    CHECK_FALSE(d.has_labels());
  }
  SUBCASE("label in the first column") {
    std::istringstream in("A,1,2\nB,3,4\n");
    const auto d = parse_csv(in, 0);
    CHECK(d.dim() == 2);
    CHECK(d.points(1, 0) == 3.0);
  }
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_csv("/nonexistent/data.csv"), Error); }

TEST_CASE("iris file") {
  const auto iris = load_csv(std::filesystem::path(CSAL_DATA_DIR) / "iris.csv");
  CHECK(iris.size() == 150);
  CHECK(iris.dim() == 4);
  CHECK(iris.num_classes() == 3);
  const auto z = standardize(iris);
  for (Eigen::Index c = 0; c < z.dim(); ++c) CHECK(std::abs(z.points.col(c).mean()) < 1e-12);
}

TEST_CASE("csv round trip is exact") {
  const auto a = generate_gaussian(GaussianSpec::gdata1(), 5);
  std::stringstream buf;
  write_csv(a, buf);
  const auto b = parse_csv(buf);
  CHECK(a.points == b.points);
  CHECK(a.labels == b.labels);
}

TEST_CASE("standardize") {
  DataMatrix d;
  d.points.resize(3, 2);
  d.points << 1, 5, 3, 5, 2, 5;
  auto z = standardize(d);
  const double sd = 1.0;  // sample sd of (1, 3, 2)
  CHECK(z.points(0, 0) == doctest::Approx(-1.0 / sd));
  CHECK(z.points(1, 0) == doctest::Approx(1.0 / sd));
  CHECK(z.points.col(1).isZero());

  DataMatrix two;
  two.points.resize(2, 1);
  two.points << 1, 3;
  const auto t = standardize(two);
  const double s = std::sqrt(2.0);
  CHECK(t.points(0, 0) == doctest::Approx(-1.0 / s));
  CHECK(t.points(1, 0) == doctest::Approx(1.0 / s));

  // Idempotent up to rounding.
  const auto g = standardize(generate_gaussian(GaussianSpec::gdata2(), 2));
  CHECK(standardize(g).points.isApprox(g.points, 1e-12));

  DataMatrix one;
  one.points = Eigen::MatrixXd::Ones(1, 2);
  CHECK_THROWS_AS(standardize(one), ValidationError);
}

}

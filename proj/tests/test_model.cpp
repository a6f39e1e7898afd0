#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "rsdesign/model.hpp"
#include "support.hpp"

using namespace rsdesign;

TEST_CASE("full quadratic term layout") {
  const auto m = ModelSpec::full_quadratic(3);
  std::vector<std::string> labels;
  for (const auto& t : m.terms()) labels.push_back(t.label());
  const std::vector<std::string> expected = {"1",    "x1",    "x2",    "x3",    "x1^2",
                                             "x2^2", "x3^2", "x1*x2", "x1*x3", "x2*x3"};
  CHECK(labels == expected);
  CHECK(m.is_full_quadratic());
  CHECK(m.terms()[4].exponent(0) == 2);
  CHECK(m.terms()[9].exponent(0) == 0);
  CHECK(m.terms()[9].exponent(2) == 1);
}

TEST_CASE("parameter count is 1 + 2q + q(q-1)/2") {
  for (int q = 1; q <= 8; ++q) {
    CHECK(ModelSpec::full_quadratic(q).size() == 1 + 2 * q + q * (q - 1) / 2);
  }
  CHECK(ModelSpec::full_quadratic(5).size() == 21);
  CHECK(ModelSpec::intercept_only(4).size() == 1);
  CHECK_THROWS_AS(ModelSpec::full_quadratic(0), std::invalid_argument);
}

TEST_CASE("expand evaluates monomials in term order") {
  const auto m = ModelSpec::full_quadratic(3);
  const std::vector<double> x = {2.0, -1.0, 0.5};
  const Vector f = m.expand(x);
  const std::vector<double> expected = {1, 2, -1, 0.5, 4, 1, 0.25, -2, 1, -0.5};
  REQUIRE(f.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(f[i] == expected[i]);
  const std::vector<double> wrong = {1.0, 2.0};
  CHECK_THROWS_AS(m.expand(wrong), std::invalid_argument);
}

TEST_CASE("designs validate their points") {
  CHECK_THROWS_AS(Design(2, {{0.0, 1.0}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Design(1, {{std::nan("")}}), std::invalid_argument);
  CHECK_THROWS_AS(Design(0, {}), std::invalid_argument);
  const Design d(2, {{0, 1}, {1, 0}});
  CHECK(d.runs() == 2);
  CHECK(d.factors() == 2);
  CHECK(d[1][0] == 1.0);
}

TEST_CASE("df accounting counts replicates after rounding") {
  const auto m = ModelSpec::full_quadratic(1);
  // 0 and 1e-12 coincide at 10 decimals; 1e-8 does not.
  const Design d(1, {{0.0}, {1e-12}, {1.0}, {1.0}, {-1.0}, {1e-8}});
  const auto df = df_accounting(d, m);
  CHECK(df.distinct == 4);
  CHECK(df.pure_error == 2);
  CHECK(df.lack_of_fit == 1);
  CHECK(distinct_points(d) == 4);
}

TEST_CASE("cube example fixtures have the published df") {
  const auto model = ModelSpec::full_quadratic(3);
  const auto designs = testing::cube_example_designs();
  REQUIRE(designs.size() == testing::kCubeTable.size());
  for (std::size_t i = 0; i < designs.size(); ++i) {
    CAPTURE(designs[i].label);
    CHECK(designs[i].design.runs() == 26);
    const auto df = df_accounting(designs[i].design, model);
    CHECK(df.pure_error == testing::kCubeTable[i].pure_error);
    CHECK(df.lack_of_fit == testing::kCubeTable[i].lack_of_fit);
  }
}

TEST_CASE("sphere example fixtures have the published df") {
  const auto model = ModelSpec::full_quadratic(5);
  for (const auto& row : testing::kSphereTable) {
    CAPTURE(row.design);
    const Design d = row.design == 6 ? central_composite(5, 30, testing::kSphereRho, true)
                                     : testing::sphere_example_design(row.design);
    CHECK(d.runs() == 30);
    const auto df = df_accounting(d, model);
    CHECK(df.pure_error == row.pure_error);
    CHECK(df.lack_of_fit == row.lack_of_fit);
  }
}

TEST_CASE("model matrix and centering projector") {
  const auto m = ModelSpec::full_quadratic(2);
  const Design d(2, {{1, 1}, {-1, 0}, {0, 0}});
  const Matrix x = model_matrix(m, d);
  REQUIRE(x.rows() == 3);
  REQUIRE(x.cols() == 6);
  CHECK(x(0, 5) == 1.0);
  CHECK(x(1, 1) == -1.0);
  CHECK(x(1, 3) == 1.0);
  CHECK(x(2, 0) == 1.0);
  const Matrix x0 = model_matrix_without_intercept(m, d);
  CHECK(x0.cols() == 5);
  CHECK((x0 - x.rightCols(5)).norm() == 0.0);

  const Matrix q = centering_projector(4);
  CHECK((q * q - q).norm() < 1e-14);
  CHECK((q * Vector::Ones(4)).norm() < 1e-14);
}

TEST_CASE("cube candidates: full 3^q grid, last factor fastest") {
  const auto set = candidate_set(3, Region::cube(3));
  REQUIRE(set.size() == 27);
  CHECK(set.points[0] == FactorPoint{-1, -1, -1});
  CHECK(set.points[1] == FactorPoint{-1, -1, 0});
  CHECK(set.points[3] == FactorPoint{-1, 0, -1});
  CHECK(set.points[13] == FactorPoint{0, 0, 0});
  CHECK(set.points[26] == FactorPoint{1, 1, 1});
}

TEST_CASE("sphere candidates lie on the sphere except the center") {
  const double rho = std::sqrt(5.0);
  const auto set = candidate_set(5, Region::sphere(5, rho));
  REQUIRE(set.size() == 243);
  int centers = 0;
  for (const auto& p : set.points) {
    double ss = 0.0;
    for (double v : p) ss += v * v;
    if (ss == 0.0) ++centers;
    else CHECK(std::sqrt(ss) == doctest::Approx(rho).epsilon(1e-14));
  }
  CHECK(centers == 1);
  CHECK_THROWS_AS(candidate_set(3, Region::sphere(4, 2.0)), std::invalid_argument);
}

TEST_CASE("snap_to_sphere restores exact coordinates") {
  const double rho = std::sqrt(5.0);
  const Design rounded(5, {{1.12, -1.12, 1.12, 1.12, 0},
                           {2.24, 0, 0, 0, 0},
                           {1.29, 1.29, -1.29, 0, 0},
                           {1.58, 0, -1.58, 0, 0},
                           {1, 1, -1, 1, -1},
                           {0, 0, 0, 0, 0},
                           {0.5, 0, 0, 0, 0}});
  const Design d = snap_to_sphere(rounded, rho);
  CHECK(d[0][0] == rho / 2.0);
  CHECK(d[0][1] == -rho / 2.0);
  CHECK(d[0][4] == 0.0);
  CHECK(d[1][0] == rho);
  CHECK(d[2][2] == -rho / std::sqrt(3.0));
  CHECK(d[3][0] == rho / std::sqrt(2.0));
  CHECK(d[4][3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d[5][0] == 0.0);
  CHECK(d[6][0] == 0.5);  // interior point left alone
}

TEST_CASE("region containment and description") {
  const auto cube = Region::cube(2);
  CHECK(cube.contains(std::vector<double>{1.0, -1.0}));
  CHECK_FALSE(cube.contains(std::vector<double>{1.01, 0.0}));
  CHECK(cube.max_radius() == doctest::Approx(std::sqrt(2.0)));
  const auto ball = Region::sphere(2, 2.0);
  CHECK(ball.contains(std::vector<double>{2.0, 0.0}));
  CHECK_FALSE(ball.contains(std::vector<double>{1.5, 1.5}));
  CHECK(ball.describe() == "sphere q=2 rho=2");
  CHECK_THROWS_AS(Region::sphere(2, 0.0), std::invalid_argument);
}

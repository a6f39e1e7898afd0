#include <cmath>
#include <algorithm>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rsdesign/region.hpp"
#include "moment_oracle.hpp"

using namespace rsdesign;

TEST_CASE("cube moments follow the product closed forms") {
  const auto model = ModelSpec::full_quadratic(3);
  const auto m = moment_matrix(Region::cube(3), model);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 4) == doctest::Approx(1.0 / 3));  // E[x1^2]
  CHECK(m(4, 4) == doctest::Approx(1.0 / 5));  // E[x1^4]
  CHECK(m(4, 5) == doctest::Approx(1.0 / 9));  // E[x1^2 x2^2]
  CHECK(m(7, 7) == doctest::Approx(1.0 / 9));  // E[(x1 x2)^2]
  CHECK(m(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 2) == 0.0);
  CHECK((m - m.transpose()).norm() == 0.0);
}

TEST_CASE("ball moments follow the radial closed forms") {
  for (int q : {2, 3, 5}) {
    for (double rho : {1.0, std::sqrt(static_cast<double>(q))}) {
      CAPTURE(q);
      CAPTURE(rho);
      const auto model = ModelSpec::full_quadratic(q);
      const auto m = moment_matrix(Region::sphere(q, rho), model);
      const double r2 = rho * rho;
      const double qq = q;
      CHECK(m(0, 1 + q) == doctest::Approx(r2 / (qq + 2)));
      CHECK(m(1 + q, 1 + q) == doctest::Approx(3 * r2 * r2 / ((qq + 2) * (qq + 4))));
      CHECK(m(1 + q, 2 + q) == doctest::Approx(r2 * r2 / ((qq + 2) * (qq + 4))));
      CHECK(m(1 + 2 * q, 1 + 2 * q) == doctest::Approx(r2 * r2 / ((qq + 2) * (qq + 4))));
    }
  }
}

TEST_CASE("shell moments follow the surface closed forms") {
  const int q = 4;
  const auto model = ModelSpec::full_quadratic(q);
  const Region region = Region::sphere(q, 2.0);
  const double r = 0.6;
  const double radius = r * 2.0;
  const auto m = shell_moment_matrix(region, model, r);
  const double r2 = radius * radius;
  CHECK(m(0, 1 + q) == doctest::Approx(r2 / q));
  CHECK(m(1 + q, 1 + q) == doctest::Approx(3 * r2 * r2 / (q * (q + 2.0))));
  CHECK(m(1 + q, 2 + q) == doctest::Approx(r2 * r2 / (q * (q + 2.0))));
  const auto m0 = shell_difference_moment_matrix(region, model, r);
  CHECK(m0(0, 0) == 0.0);
  CHECK(m0(0, 1 + q) == 0.0);
  CHECK(m0(1 + q, 1 + q) == m(1 + q, 1 + q));
  CHECK((surface_moment_matrix(region, model) - shell_moment_matrix(region, model, 1.0)).norm() == 0.0);
  CHECK_THROWS_AS(shell_moment_matrix(region, model, 0.0), std::invalid_argument);
}

TEST_CASE("difference moments zero the intercept row and column") {
  const auto model = ModelSpec::full_quadratic(2);
  const auto m = moment_matrix(Region::cube(2), model);
  const auto m0 = difference_moment_matrix(Region::cube(2), model);
  CHECK(m0.row(0).norm() == 0.0);
  CHECK(m0.col(0).norm() == 0.0);
  CHECK((m0.bottomRightCorner(5, 5) - m.bottomRightCorner(5, 5)).norm() == 0.0);
}

TEST_CASE("moment matrices agree with Monte Carlo integration") {
  // 10^6 samples: standard errors are below 1e-3, so 5e-3 is a loose bound.
  constexpr long long kSamples = 1'000'000;
  for (int q : {1, 2, 3}) {
    const auto model = ModelSpec::full_quadratic(q);
    const Region region = Region::cube(q);
    const Matrix mc = oracle::monte_carlo_moments(model, region, kSamples, 11 + q);
    CHECK((mc - moment_matrix(region, model)).cwiseAbs().maxCoeff() < 5e-3);
  }
  for (int q : {2, 3}) {
    const auto model = ModelSpec::full_quadratic(q);
    const Region region = Region::sphere(q, std::sqrt(static_cast<double>(q)));
    const Matrix mc = oracle::monte_carlo_moments(model, region, kSamples, 29 + q);
    CHECK((mc - moment_matrix(region, model)).cwiseAbs().maxCoeff() < 5e-3);
  }
  const auto model = ModelSpec::full_quadratic(3);
  const Region region = Region::sphere(3, std::sqrt(3.0));
  const Matrix mc = oracle::monte_carlo_shell_moments(model, region, 0.7, kSamples, 5);
  CHECK((mc - shell_moment_matrix(region, model, 0.7)).cwiseAbs().maxCoeff() < 5e-3);
}

TEST_CASE("ball volume") {
  CHECK(ball_volume(2, 3.0) == doctest::Approx(std::numbers::pi * 9));
  CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 / 3 * std::numbers::pi));
  CHECK(ball_volume(1, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("volume fraction of spheres is r^q") {
  const Region ball = Region::sphere(4, 3.0);
  CHECK(volume_fraction(ball, 0.0) == 0.0);
  CHECK(volume_fraction(ball, 0.5) == doctest::Approx(1.0 / 16));
  CHECK(volume_fraction(ball, 1.0) == 1.0);
  CHECK_THROWS_AS(volume_fraction(ball, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(volume_fraction(ball, -0.1), std::invalid_argument);
}

// Area of the unit-square quadrant within distance R (1 <= R <= sqrt 2).
static double quadrant_area(double radius) {
  const double a = std::sqrt(radius * radius - 1.0);
  auto primitive = [&](double u) {
    return 0.5 * (u * std::sqrt(radius * radius - u * u) + radius * radius * std::asin(u / radius));
  };
  return a + primitive(1.0) - primitive(a);
}

TEST_CASE("volume fraction of a square matches the planar closed form") {
  const Region square = Region::cube(2);
  for (double r = 0.05; r < 1.0; r += 0.05) {
    CAPTURE(r);
    const double radius = r * std::sqrt(2.0);
    const double expected =
        radius <= 1.0 ? std::numbers::pi * radius * radius / 4 : quadrant_area(radius);
    CHECK(volume_fraction(square, r) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("volume fraction of a cube matches Monte Carlo") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int q = 3;
  const int n = 400000;
  std::vector<double> norms(n);
  for (auto& v : norms) {
    double ss = 0.0;
    for (int i = 0; i < q; ++i) {
      const double x = u(rng);
      ss += x * x;
    }
    v = std::sqrt(ss) / std::sqrt(3.0);
  }
  for (double r : {0.3, 0.6, 0.75, 0.9, 0.97}) {
    const double share =
        static_cast<double>(std::count_if(norms.begin(), norms.end(), [&](double v) { return v <= r; })) / n;
    CHECK(std::abs(volume_fraction(Region::cube(q), r) - share) < 3e-3);
  }
}

TEST_CASE("cube volume fraction is strictly increasing on the graph grid") {
  for (int q = 1; q <= 6; ++q) {
    CAPTURE(q);
    const Region cube = Region::cube(q);
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = volume_fraction(cube, k / 100.0);
      CHECK(v > prev);
      prev = v;
    }
    CHECK(prev == 1.0);
  }
}

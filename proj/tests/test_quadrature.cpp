#include <doctest.h>

#include <cmath>
#include <random>

#include "dem/quadrature.hpp"
#include "test_util.hpp"

using namespace dem;

namespace {

double integrate_f(const QuadratureGrid& g, double (*f)(const Vec3&)) {
  std::vector<double> vals;
  vals.reserve(g.points.size());
  for (const Vec3& p : g.points) vals.push_back(f(p));
  return integrate(vals, g.weights);
}

}  // namespace

TEST_CASE("grid construction") {
  CHECK_THROWS_WITH(build_grid(1), "grid must have n >= 2");

  const QuadratureGrid g2 = build_grid(2);
  CHECK(g2.points.size() == 8);
  for (double w : g2.weights) CHECK(w == doctest::Approx(0.125).epsilon(1e-15));

  CHECK(build_grid(25).points.size() == 15625);

  // n = 3: center point carries the full h^3 with h = 0.5
  const QuadratureGrid g3 = build_grid(3);
  const std::size_t center = 1 * 9 + 1 * 3 + 1;
  CHECK(g3.points[center][0] == 0.5);
  CHECK(g3.points[center][1] == 0.5);
  CHECK(g3.points[center][2] == 0.5);
  CHECK(g3.weights[center] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("weights sum to the measure of the cube and of each face") {
  for (int n : {2, 3, 7, 25}) {
    const QuadratureGrid g = build_grid(n);
    const std::vector<double> ones(g.weights.size(), 1.0);
    CHECK(std::abs(integrate(ones, g.weights) - 1.0) < 1e-13);
    for (const FaceGrid& f : g.faces) {
      const std::vector<double> face_ones(f.weights.size(), 1.0);
      CHECK(std::abs(integrate(face_ones, f.weights) - 1.0) < 1e-13);
      for (const Vec3& p : f.points)
        CHECK(p[f.axis] == (f.side == 0 ? 0.0 : 1.0));
    }
  }
}

TEST_CASE("constant and multilinear integrands are exact") {
  for (int n : {2, 5, 11}) {
    const QuadratureGrid g = build_grid(n);
    CHECK(std::abs(integrate_f(g, [](const Vec3&) { return 1.0; }) - 1.0) < 1e-13);
    CHECK(std::abs(integrate_f(g, [](const Vec3& p) { return p[0] * p[1] * p[2]; }) - 0.125) <
          1e-13);
  }
}

TEST_CASE("random multilinear integrands are exact to 1e-13") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    double c[8];
    for (double& v : c) v = dist(rng);
    // exact integral: each factor x contributes 1/2
    const double exact = c[0] + (c[1] + c[2] + c[3]) / 2.0 + (c[4] + c[5] + c[6]) / 4.0 +
                         c[7] / 8.0;
    const QuadratureGrid g = build_grid(4 + trial % 5);
    std::vector<double> vals;
    vals.reserve(g.points.size());
    for (const Vec3& p : g.points)
      vals.push_back(c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[2] + c[4] * p[0] * p[1] +
                     c[5] * p[0] * p[2] + c[6] * p[1] * p[2] + c[7] * p[0] * p[1] * p[2]);
    CHECK(std::abs(integrate(vals, g.weights) - exact) < 1e-13);
  }
}

TEST_CASE("composite trapezoid error identity for quadratics") {
  // integral of x1^2 over the cube is 1/3; trapezoid gives 1/3 + h^2/6 exactly
  for (int n : {2, 3, 5, 9, 17}) {
    const QuadratureGrid g = build_grid(n);
    const double h = 1.0 / (n - 1);
    const double got = integrate_f(g, [](const Vec3& p) { return p[0] * p[0]; });
    CHECK(std::abs(got - (1.0 / 3.0 + h * h / 6.0)) < 1e-14);
  }
}

TEST_CASE("second-order convergence on sin(pi x)") {
  // log-log slope of the error over n in {5, 9, 17, 33} is 2.0 +- 0.1
  const double exact = 2.0 / M_PI;
  std::vector<double> hs, errs;
  for (int n : {5, 9, 17, 33}) {
    const QuadratureGrid g = build_grid(n);
    const double got = integrate_f(g, [](const Vec3& p) { return std::sin(M_PI * p[0]); });
    hs.push_back(1.0 / (n - 1));
    errs.push_back(std::abs(got - exact));
  }
  for (std::size_t i = 1; i < hs.size(); ++i) {
    const double slope = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("deterministic ordering and length checking") {
  const QuadratureGrid a = build_grid(6);
  const QuadratureGrid b = build_grid(6);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(a.points[i][k] == b.points[i][k]);

  std::vector<double> bad(a.points.size() - 1, 1.0);
  CHECK_THROWS_AS(integrate(bad, a.weights), std::invalid_argument);
}

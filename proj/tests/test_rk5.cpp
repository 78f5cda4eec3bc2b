#include <doctest.h>

#include <cmath>
#include <random>

#include "dem/rk5.hpp"
#include "test_util.hpp"

using namespace dem;
using namespace dem::test;

TEST_CASE("time grid invariants") {
  const TimeGrid g = TimeGrid::make(2.0, 0.05);
  CHECK(g.steps == 40);
  CHECK_THROWS_AS(TimeGrid::make(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.3), std::invalid_argument);  // N*dt != T
}

TEST_CASE("rk5 fixed point: eps = eps_v") {
  const ViscoParams p;
  std::mt19937_64 rng(1);
  const Mat3 e = random_symmetric(rng);
  CHECK(max_abs(rk5_step(e, e, 0.05, p) - e) < 1e-16);
}

TEST_CASE("rk5 one-step accuracy on the linear scalar ODE") {
  // y' = -(y - c)/tau, tau = 0.5, c = 1, y0 = 0, dt = 0.1.
  // The scheme's stability polynomial has z^6 coefficient 1/1280, so the
  // one-step error against the exact exponential is
  // |1/1280 - 1/720| 0.2^6 - 0.2^7/5040 = 3.64e-8.
  const double tau = 0.5, c = 1.0;
  auto rhs = [&](double y) { return -(y - c) / tau; };
  const double y1 = rk5_lawson(0.0, 0.1, rhs);
  const double err = std::abs(y1 - (1.0 - std::exp(-0.2)));
  CHECK(err <= 5e-8);
  CHECK(err == doctest::Approx(3.635e-8).epsilon(1e-2));
}

TEST_CASE("rk5 convergence slope on the linear ODE is 5") {
  // global error at T = 1, halving dt
  const double tau = 0.5, c = 1.0;
  auto rhs = [&](double y) { return -(y - c) / tau; };
  auto integrate_to_one = [&](double dt) {
    const int n = static_cast<int>(std::lround(1.0 / dt));
    double y = 0.0;
    for (int i = 0; i < n; ++i) y = rk5_lawson(y, dt, rhs);
    return y;
  };
  const double exact = c * (1.0 - std::exp(-1.0 / tau));
  double prev_err = 0.0, prev_dt = 0.0;
  for (const double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const double err = std::abs(integrate_to_one(dt) - exact);
    if (prev_dt > 0.0) {
      const double slope = std::log(prev_err / err) / std::log(prev_dt / dt);
      CHECK(slope > 4.7);
      CHECK(slope < 5.3);
    }
    prev_err = err;
    prev_dt = dt;
  }
}

TEST_CASE("backward euler rate") {
  std::mt19937_64 rng(2);
  const Mat3 a = random_symmetric(rng);
  CHECK(max_abs(backward_euler_rate(a, a, 0.1)) == 0.0);

  const Mat3 r = random_symmetric(rng);
  const Mat3 next = a + 0.05 * r;
  CHECK(max_abs(backward_euler_rate(next, a, 0.05) - r) < 1e-13);

  const Mat3 b = random_symmetric(rng);
  const Mat3 oracle = (1.0 / 0.05) * (b - a);  // elementwise subtract/scale
  CHECK(max_abs(backward_euler_rate(b, a, 0.05) - oracle) < 1e-15);

  CHECK_THROWS_AS(backward_euler_rate(a, a, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(backward_euler_rate(a, a, -1.0), std::invalid_argument);
}

TEST_CASE("held strain: deviatoric and volumetric modes decay at their own rates") {
  const ViscoParams p;  // relaxation times wK/mu1 = 0.5 s, wJ/kappa1 = 0.5 s
  ViscoParams p2 = p;
  p2.omega_j = 6.0;  // distinct volumetric time constant: 1.5 s
  const double dt = 0.02;
  std::mt19937_64 rng(3);
  Mat3 eps = random_symmetric(rng);
  Mat3 eps_v;

  const double dev_factor = std::exp(-dt * p2.mu1 / p2.omega_k);
  const double vol_factor = std::exp(-dt * p2.kappa1 / p2.omega_j);
  double prev_dev = frobenius_norm(dev(eps - eps_v));
  double prev_vol = std::abs(trace(eps - eps_v));
  for (int step = 0; step < 200; ++step) {
    eps_v = rk5_step(eps_v, eps, dt, p2);
    const double cur_dev = frobenius_norm(dev(eps - eps_v));
    const double cur_vol = std::abs(trace(eps - eps_v));
    CHECK(cur_dev <= prev_dev + 1e-15);  // monotone approach in each mode
    CHECK(cur_vol <= prev_vol + 1e-15);
    if (prev_dev > 1e-12) CHECK(rel_err(cur_dev / prev_dev, dev_factor) < 1e-6);
    if (prev_vol > 1e-12) CHECK(rel_err(cur_vol / prev_vol, vol_factor) < 1e-6);
    prev_dev = cur_dev;
    prev_vol = cur_vol;
  }
  CHECK(prev_dev < 1e-3 * frobenius_norm(dev(eps)));
}

TEST_CASE("rk5_step uses the shared evolution_rate") {
  const ViscoParams p;
  std::mt19937_64 rng(4);
  const Mat3 eps = random_symmetric(rng);
  const Mat3 eps_v = random_symmetric(rng);
  const Mat3 via_generic = rk5_lawson(
      eps_v, 0.07, [&](const Mat3& y) { return evolution_rate(eps, y, p); });
  CHECK(max_abs(rk5_step(eps_v, eps, 0.07, p) - via_generic) == 0.0);
}

TEST_CASE("tape rk5 step matches the plain step") {
  const ViscoParams p;
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const Mat3 eps = random_symmetric(rng);
    const Mat3 eps_v = random_symmetric(rng);
    ad::Tape tape;
    const ad::NodeId e = tape.leaf(Tensor::from(eps));
    const ad::NodeId ev = tape.constant(Tensor::from(eps_v));
    const ad::NodeId next = rk5_step_node(tape, ev, e, 0.05, p);
    CHECK(max_abs(tape.value_tensor(next).as_mat3() - rk5_step(eps_v, eps, 0.05, p)) < 1e-15);
  }
}

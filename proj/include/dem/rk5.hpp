#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dem/tape.hpp"
#include "dem/tensor.hpp"
#include "dem/viscoelastic.hpp"

namespace dem {

/// Uniform time discretization with N * dt = T.
struct TimeGrid {
  double total = 0.0;
  double dt = 0.0;
  int steps = 0;

  static TimeGrid make(double total, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("time grid: dt must be > 0");
    const int n = static_cast<int>(std::lround(total / dt));
    if (n < 1 || std::abs(n * dt - total) > 1e-9 * std::max(1.0, total))
      throw std::invalid_argument("time grid: N*dt != T");
    return {total, dt, n};
  }
};

/// One step of the fifth-order explicit Runge-Kutta scheme with extended
/// stability region, for an autonomous right-hand side f(y). State must
/// support y + y and s * y.
template <class State, class Rhs>
State rk5_lawson(const State& y, double dt, Rhs&& f) {
  const State k1 = f(y);
  const State k2 = f(y + (0.5 * dt) * k1);
  const State k3 = f(y + (dt / 16.0) * (3.0 * k1 + k2));
  const State k4 = f(y + (0.5 * dt) * k3);
  const State k5 = f(y + (3.0 * dt / 16.0) * (2.0 * k3 + 3.0 * k4 - k2));
  const State k6 =
      f(y + (dt / 7.0) * (k1 + 4.0 * k2 + 6.0 * k3 + 8.0 * k5 - 12.0 * k4));
  return y + (dt / 90.0) * (7.0 * k1 + 32.0 * k3 + 12.0 * k4 + 32.0 * k5 + 7.0 * k6);
}

/// Advances the viscous strain by one step with the total strain held fixed
/// over all six stages. The stage rate is viscoelastic evolution_rate.
Mat3 rk5_step(const Mat3& eps_v, const Mat3& eps, double dt, const ViscoParams& p);

/// (next - prev) / dt; rejects dt <= 0.
Mat3 backward_euler_rate(const Mat3& next, const Mat3& prev, double dt);

/// Tape recording of rk5_step for the differentiate-through-eps_v mode:
/// gradients flow from the result into `eps` (and `eps_v` if it is not a
/// constant).
ad::NodeId rk5_step_node(ad::Tape& tape, ad::NodeId eps_v, ad::NodeId eps, double dt,
                         const ViscoParams& p);

}  // namespace dem

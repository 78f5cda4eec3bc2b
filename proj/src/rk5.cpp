#include "dem/rk5.hpp"

namespace dem {

Mat3 rk5_step(const Mat3& eps_v, const Mat3& eps, double dt, const ViscoParams& p) {
  return rk5_lawson(eps_v, dt, [&](const Mat3& y) { return evolution_rate(eps, y, p); });
}

Mat3 backward_euler_rate(const Mat3& next, const Mat3& prev, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("backward_euler_rate: dt must be > 0");
  return (1.0 / dt) * (next - prev);
}

ad::NodeId rk5_step_node(ad::Tape& tape, ad::NodeId eps_v, ad::NodeId eps, double dt,
                         const ViscoParams& p) {
  auto g = [&](ad::NodeId y) { return evolution_rate_node(tape, eps, y, p); };
  auto axpy = [&](ad::NodeId y, double c, ad::NodeId k) {
    return tape.add(y, tape.scale(k, c));
  };

  const ad::NodeId k1 = g(eps_v);
  const ad::NodeId k2 = g(axpy(eps_v, 0.5 * dt, k1));
  const ad::NodeId k3 =
      g(axpy(eps_v, dt / 16.0, tape.add(tape.scale(k1, 3.0), k2)));
  const ad::NodeId k4 = g(axpy(eps_v, 0.5 * dt, k3));
  const ad::NodeId s5 = tape.add(tape.scale(k2, -1.0),
                                 tape.add(tape.scale(k3, 2.0), tape.scale(k4, 3.0)));
  const ad::NodeId k5 = g(axpy(eps_v, 3.0 * dt / 16.0, s5));
  ad::NodeId s6 = tape.add(k1, tape.scale(k2, 4.0));
  s6 = tape.add(s6, tape.scale(k3, 6.0));
  s6 = tape.add(s6, tape.scale(k4, -12.0));
  s6 = tape.add(s6, tape.scale(k5, 8.0));
  const ad::NodeId k6 = g(axpy(eps_v, dt / 7.0, s6));

  ad::NodeId inc = tape.add(tape.scale(k1, 7.0), tape.scale(k3, 32.0));
  inc = tape.add(inc, tape.scale(k4, 12.0));
  inc = tape.add(inc, tape.scale(k5, 32.0));
  inc = tape.add(inc, tape.scale(k6, 7.0));
  return axpy(eps_v, dt / 90.0, inc);
}

}  // namespace dem

#include "dem/viscoelastic.hpp"

#include <stdexcept>

namespace dem {

void ViscoParams::validate() const {
  for (double v : {mu0, kappa0, mu1, kappa1, omega_k, omega_j})
    if (v <= 0.0) throw std::invalid_argument("viscoelastic: all constants must be > 0");
}

Mat3 iso4_apply(double shear_coeff, double bulk_coeff, const Mat3& eps) {
  return 2.0 * shear_coeff * dev(eps) + (bulk_coeff * trace(eps)) * Mat3::identity();
}

double free_energy(const Mat3& eps, const Mat3& eps_v, const ViscoParams& p) {
  const Mat3 ee = eps - eps_v;
  const double tr_e = trace(eps);
  const double tr_ee = trace(ee);
  return p.mu0 * ddot(eps, eps) + (3.0 * p.kappa0 - 2.0 * p.mu0) / 6.0 * tr_e * tr_e +
         p.mu1 * ddot(ee, ee) + (3.0 * p.kappa1 - 2.0 * p.mu1) / 6.0 * tr_ee * tr_ee;
}

double dissipation(const Mat3& rate, const ViscoParams& p) {
  const double tr_r = trace(rate);
  return p.omega_k * ddot(rate, rate) + (3.0 * p.omega_j - 2.0 * p.omega_k) / 6.0 * tr_r * tr_r;
}

Mat3 cauchy_stress(const Mat3& eps, const Mat3& eps_v, const ViscoParams& p) {
  const Mat3 ee = eps - eps_v;
  Mat3 s = 2.0 * p.mu0 * eps + 2.0 * p.mu1 * ee;
  const double iso =
      (3.0 * p.kappa0 - 2.0 * p.mu0) / 3.0 * trace(eps) +
      (3.0 * p.kappa1 - 2.0 * p.mu1) / 3.0 * trace(ee);
  s(0, 0) += iso;
  s(1, 1) += iso;
  s(2, 2) += iso;
  return s;
}

Mat3 evolution_rate(const Mat3& eps, const Mat3& eps_v, const ViscoParams& p) {
  const Mat3 ee = eps - eps_v;
  const double k_dev = p.mu1 / p.omega_k;
  const double k_vol = p.kappa1 / p.omega_j;
  return k_dev * ee + ((k_vol - k_dev) / 3.0 * trace(ee)) * Mat3::identity();
}

ad::NodeId free_energy_node(ad::Tape& tape, ad::NodeId eps, ad::NodeId eps_v,
                            const ViscoParams& p) {
  const ad::NodeId ee = tape.sub(eps, eps_v);
  const ad::NodeId t0 = tape.scale(tape.dot(eps, eps), p.mu0);
  const ad::NodeId t1 =
      tape.scale(tape.square(tape.trace(eps)), (3.0 * p.kappa0 - 2.0 * p.mu0) / 6.0);
  const ad::NodeId t2 = tape.scale(tape.dot(ee, ee), p.mu1);
  const ad::NodeId t3 =
      tape.scale(tape.square(tape.trace(ee)), (3.0 * p.kappa1 - 2.0 * p.mu1) / 6.0);
  return tape.add(tape.add(t0, t1), tape.add(t2, t3));
}

ad::NodeId dissipation_node(ad::Tape& tape, ad::NodeId rate, const ViscoParams& p) {
  const ad::NodeId t0 = tape.scale(tape.dot(rate, rate), p.omega_k);
  const ad::NodeId t1 =
      tape.scale(tape.square(tape.trace(rate)), (3.0 * p.omega_j - 2.0 * p.omega_k) / 6.0);
  return tape.add(t0, t1);
}

ad::NodeId evolution_rate_node(ad::Tape& tape, ad::NodeId eps, ad::NodeId eps_v,
                               const ViscoParams& p) {
  const ad::NodeId ee = tape.sub(eps, eps_v);
  const double k_dev = p.mu1 / p.omega_k;
  const double k_vol = p.kappa1 / p.omega_j;
  const ad::NodeId dev_part = tape.scale(ee, k_dev);
  const ad::NodeId vol_part = tape.eye3(tape.scale(tape.trace(ee), (k_vol - k_dev) / 3.0));
  return tape.add(dev_part, vol_part);
}

}  // namespace dem

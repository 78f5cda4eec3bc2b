#include "dem/hyperelastic.hpp"

#include <cmath>

namespace dem {

void HyperParams::validate() const {
  if (alpha.size() != mu.size())
    throw std::invalid_argument("hyperelastic: len(alpha) != len(mu)");
  if (alpha.empty()) throw std::invalid_argument("hyperelastic: no terms");
  if (lambda <= 0.0) throw std::invalid_argument("hyperelastic: lambda must be > 0");
  for (double a : alpha)
    if (a == 0.0) throw std::invalid_argument("hyperelastic: alpha_r must be nonzero");
  for (double m : mu)
    if (m <= 0.0) throw std::invalid_argument("hyperelastic: mu_r must be > 0");
}

DeformationState make_deformation_state(const Mat3& F) {
  DeformationState s;
  s.F = F;
  s.C = transpose(F) * F;
  s.I1 = trace(s.C);
  s.J = det(F);
  return s;
}

double strain_energy(const Mat3& F, const HyperParams& p) {
  const double J = det(F);
  if (J <= 0.0) throw InadmissibleDeformation(J);
  const double I1 = trace(transpose(F) * F);

  double psi = 0.0;
  double mu_sum = 0.0;
  for (int r = 0; r < p.terms(); ++r) {
    const double a = p.alpha[static_cast<std::size_t>(r)];
    const double m = p.mu[static_cast<std::size_t>(r)];
    psi += std::pow(3.0, 1.0 - a) / (2.0 * a) * m * (std::pow(I1, a) - std::pow(3.0, a));
    mu_sum += m;
  }
  psi -= mu_sum * std::log(J);
  psi += 0.5 * p.lambda * (J - 1.0) * (J - 1.0);
  return psi;
}

Mat3 first_pk_stress(const Mat3& F, const HyperParams& p) {
  const double J = det(F);
  if (J <= 0.0) throw InadmissibleDeformation(J);
  const double I1 = trace(transpose(F) * F);
  const Mat3 Finv_t = transpose(inverse(F));

  double iso = 0.0;
  double mu_sum = 0.0;
  for (int r = 0; r < p.terms(); ++r) {
    const double a = p.alpha[static_cast<std::size_t>(r)];
    const double m = p.mu[static_cast<std::size_t>(r)];
    iso += std::pow(3.0, 1.0 - a) * m * std::pow(I1, a - 1.0);
    mu_sum += m;
  }
  return iso * F + (p.lambda * (J * J - J) - mu_sum) * Finv_t;
}

EnergyNodes strain_energy_node(ad::Tape& tape, ad::NodeId f, const HyperParams& p) {
  const ad::NodeId jdet = tape.det3(f);
  const ad::NodeId c = tape.matmul(tape.transpose(f), f);
  const ad::NodeId i1 = tape.trace(c);

  ad::NodeId psi = ad::kNoNode;
  double mu_sum = 0.0;
  for (int r = 0; r < p.terms(); ++r) {
    const double a = p.alpha[static_cast<std::size_t>(r)];
    const double m = p.mu[static_cast<std::size_t>(r)];
    const ad::NodeId pow_term = tape.sub(tape.power(i1, a), tape.constant(std::pow(3.0, a)));
    const ad::NodeId term = tape.scale(pow_term, std::pow(3.0, 1.0 - a) / (2.0 * a) * m);
    psi = psi == ad::kNoNode ? term : tape.add(psi, term);
    mu_sum += m;
  }
  psi = tape.sub(psi, tape.scale(tape.ln(jdet), mu_sum));
  const ad::NodeId jm1 = tape.sub(jdet, tape.constant(1.0));
  psi = tape.add(psi, tape.scale(tape.square(jm1), 0.5 * p.lambda));
  return {psi, jdet};
}

}  // namespace dem

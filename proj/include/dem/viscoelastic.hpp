#pragma once

#include "dem/tape.hpp"
#include "dem/tensor.hpp"

namespace dem {

/// Standard-linear-solid constants. Moduli in MPa, viscosities in MPa*s.
struct ViscoParams {
  double mu0 = 1.0;      // equilibrium shear modulus
  double kappa0 = 2.0;   // equilibrium bulk modulus
  double mu1 = 2.0;      // non-equilibrium shear modulus
  double kappa1 = 4.0;   // non-equilibrium bulk modulus
  double omega_k = 1.0;  // distortional viscosity
  double omega_j = 2.0;  // volumetric viscosity

  void validate() const;
};

/// Total/viscous strain pair; elastic part is derived.
struct ViscoState {
  Mat3 eps;
  Mat3 eps_v;
  Mat3 elastic() const { return eps - eps_v; }
};

/// Contraction of the isotropic fourth-order tensor 2a*K + 3b*J with a
/// symmetric second-order tensor: 2a dev(eps) + b tr(eps) I.
Mat3 iso4_apply(double shear_coeff, double bulk_coeff, const Mat3& eps);

/// psi = mu0 e:e + (3k0-2mu0)/6 (tr e)^2 + mu1 ee:ee + (3k1-2mu1)/6 (tr ee)^2
/// with ee = eps - eps_v.
double free_energy(const Mat3& eps, const Mat3& eps_v, const ViscoParams& p);

/// eta = wK r:r + (3wJ-2wK)/6 (tr r)^2 for a viscous strain rate r.
double dissipation(const Mat3& eps_v_rate, const ViscoParams& p);

/// sigma = L0:eps + L1:(eps - eps_v).
Mat3 cauchy_stress(const Mat3& eps, const Mat3& eps_v, const ViscoParams& p);

/// G = M^{-1} L1 (eps - eps_v)
///   = mu1/wK (eps - eps_v) + 1/3 (k1/wJ - mu1/wK) tr(eps - eps_v) I.
Mat3 evolution_rate(const Mat3& eps, const Mat3& eps_v, const ViscoParams& p);

// Tape recordings of the same quantities.
ad::NodeId free_energy_node(ad::Tape& tape, ad::NodeId eps, ad::NodeId eps_v,
                            const ViscoParams& p);
ad::NodeId dissipation_node(ad::Tape& tape, ad::NodeId eps_v_rate, const ViscoParams& p);
ad::NodeId evolution_rate_node(ad::Tape& tape, ad::NodeId eps, ad::NodeId eps_v,
                               const ViscoParams& p);

}  // namespace dem

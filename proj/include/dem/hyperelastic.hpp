#pragma once

#include <stdexcept>
#include <vector>

#include "dem/tape.hpp"
#include "dem/tensor.hpp"

namespace dem {

/// Raised when a deformation gradient with det F <= 0 reaches the material
/// law; the optimizer's line search treats it as infinite energy.
struct InadmissibleDeformation : std::runtime_error {
  explicit InadmissibleDeformation(double j)
      : std::runtime_error("inadmissible deformation: det F = " + std::to_string(j)) {}
};

/// M-term compressible rubber elasticity model. Moduli in kPa.
struct HyperParams {
  std::vector<double> alpha;  // exponents, nonzero
  std::vector<double> mu;     // shear-like moduli > 0
  double lambda = 0.0;        // compressibility modulus > 0

  int terms() const { return static_cast<int>(alpha.size()); }
  void validate() const;
};

/// Kinematics derived from F = I + grad(u).
struct DeformationState {
  Mat3 F;
  Mat3 C;
  double I1 = 0.0;
  double J = 0.0;
};

DeformationState make_deformation_state(const Mat3& F);

/// psi(F) = sum_r 3^(1-a_r)/(2 a_r) mu_r (I1^a_r - 3^a_r)
///        - sum_r mu_r ln J + lambda/2 (J-1)^2.
/// Throws InadmissibleDeformation if det F <= 0.
double strain_energy(const Mat3& F, const HyperParams& p);

/// P = sum_r 3^(1-a_r) mu_r I1^(a_r-1) F - sum_r mu_r F^-T
///   + lambda (J^2 - J) F^-T.
Mat3 first_pk_stress(const Mat3& F, const HyperParams& p);

/// Tape recording of the strain energy. `det_f` exposes the recorded J node
/// so callers can test admissibility before using `psi`.
struct EnergyNodes {
  ad::NodeId psi;
  ad::NodeId det_f;
};
EnergyNodes strain_energy_node(ad::Tape& tape, ad::NodeId f, const HyperParams& p);

}  // namespace dem

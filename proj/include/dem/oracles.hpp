#pragma once

#include <span>
#include <vector>

#include "dem/hyperelastic.hpp"
#include "dem/viscoelastic.hpp"

namespace dem {

/// Semi-analytic homogeneous ground truth for one applied value.
struct OracleResult {
  double applied = 0.0;  // stretch lambda1 or shear gamma
  double stress = 0.0;   // P11 (uniaxial) or P12 (shear)
  double lateral = 0.0;  // lateral stretch lambda2 (uniaxial only)
  double energy = 0.0;   // strain energy density of the homogeneous state
};

/// Uniaxial stress state: finds lambda2 with P22(diag(l1,l2,l2)) = 0 by
/// bisection plus secant refinement on [0.3, 1.5] (bracket widened once if
/// needed), |P22| <= 1e-12. Returns P11 and psi at the root.
OracleResult uniaxial_oracle(double lambda1, const HyperParams& p);

/// Homogeneous simple shear F = I + gamma e1 x e2 (J = 1, I1 = 3 + gamma^2).
OracleResult shear_oracle(double gamma, const HyperParams& p);

enum class ViscoBcMode { UniaxialStrain, UniaxialStress };

/// Piecewise-linear applied strain history eps11(t); clamped outside the
/// listed times.
struct StrainSchedule {
  std::vector<double> times;
  std::vector<double> values;
  double at(double t) const;
};

struct SlsSample {
  double time = 0.0;
  double strain = 0.0;   // applied eps11
  double stress = 0.0;   // sigma11
  Mat3 eps_v;
};

/// Integrates the internal-variable ODE with the same fifth-order scheme at
/// fine step `fine_dt` and reports sigma11 at the requested times. In
/// uniaxial-stress mode the lateral strain is solved each substep from
/// sigma22 = sigma33 = 0.
std::vector<SlsSample> sls_oracle(const StrainSchedule& schedule, const ViscoParams& p,
                                  double fine_dt, std::span<const double> sample_times,
                                  ViscoBcMode mode = ViscoBcMode::UniaxialStrain);

}  // namespace dem

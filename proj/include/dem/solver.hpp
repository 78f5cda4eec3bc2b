#pragma once

#include <array>
#include <string>
#include <vector>

#include "dem/config.hpp"
#include "dem/hyperelastic.hpp"
#include "dem/mlp.hpp"
#include "dem/optimizers.hpp"
#include "dem/oracles.hpp"
#include "dem/quadrature.hpp"
#include "dem/rk5.hpp"
#include "dem/tape.hpp"
#include "dem/viscoelastic.hpp"

namespace dem {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncrementRecord {
  double applied = 0.0;
  double time = 0.0;  // viscoelastic experiments; 0 for pseudo-time loading
  double loss = 0.0;
  int adam_iterations = 0;
  int lbfgs_iterations = 0;
  OptStatus status = OptStatus::Converged;
  double stress = 0.0;         // volume-averaged probe component
  double oracle_stress = 0.0;
  std::string field_ref;       // artifact filename, set when written
  std::vector<double> adam_history;
  std::vector<double> lbfgs_history;
  std::vector<std::array<double, 6>> field;  // X1 X2 X3 u1 u2 u3 per grid point
};

struct SolveResult {
  std::vector<IncrementRecord> increments;
  NetworkParams params;
};

/// Potential-energy loss for the hyperelastic problem:
///   L = int_Omega psi dOmega - int_Gamma u . tbar dGamma
/// (zero body force). Any grid point with det F <= 0 makes the loss +inf.
class HyperLossEvaluator {
 public:
  HyperLossEvaluator(const QuadratureGrid& grid, const Architecture& arch,
                     const HyperParams& material);
  void set_bc(const BCSpec& bc);
  LossEval operator()(std::span<const double> params);

 private:
  const QuadratureGrid& grid_;
  Architecture arch_;
  HyperParams material_;
  BCSpec bc_;
  struct PointData {
    Vec3 x;
    Vec3 a, b;
    Mat3 ga, gb;
    double w;
  };
  std::vector<PointData> volume_;
  struct TractionPoint {
    Vec3 x;
    Vec3 a, b;
    Vec3 tbar;
    double w;
  };
  std::vector<TractionPoint> surface_;
  ad::Tape tape_;
};

/// Incremental potential for one viscoelastic time step:
///   L = int psi(eps, eps_v') + dt int eta((eps_v' - eps_v)/dt)
///     - int_Gamma u . tbar dGamma
/// where eps_v' comes from the fifth-order update at each point. By default
/// eps_v' is treated as constant with respect to the network parameters and
/// recomputed at every evaluation; differentiate_viscous records the update
/// on the tape instead.
class ViscoLossEvaluator {
 public:
  ViscoLossEvaluator(const QuadratureGrid& grid, const Architecture& arch,
                     const ViscoParams& material, bool differentiate_viscous);
  void set_step(const BCSpec& bc, const std::vector<Mat3>& eps_v_n, double dt);
  LossEval operator()(std::span<const double> params);

  /// Strain and updated viscous strain per grid point for the given
  /// (typically converged) parameters.
  void state_at(std::span<const double> params, std::vector<Mat3>* eps,
                std::vector<Mat3>* eps_v_next) const;

 private:
  const QuadratureGrid& grid_;
  Architecture arch_;
  ViscoParams material_;
  bool differentiate_viscous_;
  BCSpec bc_;
  std::vector<Mat3> eps_v_n_;
  double dt_ = 0.0;
  struct PointData {
    Vec3 x;
    Vec3 a, b;
    Mat3 ga, gb;
    double w;
  };
  std::vector<PointData> volume_;
  struct TractionPoint {
    Vec3 x;
    Vec3 a, b;
    Vec3 tbar;
    double w;
  };
  std::vector<TractionPoint> surface_;
  ad::Tape tape_;
};

// Spec-level one-shot wrappers around the evaluators.
LossEval hyper_loss(std::span<const double> params, const QuadratureGrid& grid,
                    const BCSpec& bc, const HyperParams& material, const Architecture& arch);
LossEval visco_loss(std::span<const double> params, const QuadratureGrid& grid,
                    const BCSpec& bc, const ViscoParams& material,
                    const std::vector<Mat3>& eps_v_n, double dt, const Architecture& arch,
                    bool differentiate_viscous = false);

/// Incremental loading with transfer-learning warm starts: Adam then L-BFGS
/// per increment.
SolveResult solve_hyperelastic(const RunConfig& config);

/// Time stepping with warm starts; commits the per-point viscous strain after
/// each converged step.
SolveResult solve_viscoelastic(const RunConfig& config);

/// Boundary conditions for an experiment at one applied value.
BCSpec make_experiment_bc(const RunConfig& config, double applied);

}  // namespace dem

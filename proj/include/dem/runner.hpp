#pragma once

#include <string>

#include "dem/config.hpp"
#include "dem/solver.hpp"

namespace dem {

/// Solves the configured experiment and writes manifest.txt,
/// loss_history.csv, curve.csv and field_<k>.csv under out_dir.
SolveResult run_experiment(const RunConfig& config, const std::string& out_dir);

void write_artifacts(const RunConfig& config, SolveResult* result, const std::string& out_dir);

struct GradientCheckOptions {
  bool corrupt_jacobian = false;  // negative-control hook used by the tests
  int probe_points = 10;
  int probe_params = 10;
};

struct GradientCheckReport {
  bool degenerate = false;  // no parameters to check
  double max_jacobian_err = 0.0;
  double max_param_grad_err = 0.0;
  bool pass = true;
  std::string text;
};

/// Finite-difference validation of (a) the spatial Jacobian of the ansatz
/// and (b) the parameter gradient of the full loss, with tanh activation
/// forced (and, for viscoelastic runs, full differentiation through the
/// internal-variable update). Fails when either normalized error exceeds
/// 1e-4.
GradientCheckReport check_gradients(const RunConfig& config,
                                    const GradientCheckOptions& options = {});

/// Writes the semi-analytic reference curve for the configured experiment.
void write_oracle_curve(const RunConfig& config, const std::string& out_dir);

}  // namespace dem

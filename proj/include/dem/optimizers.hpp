#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dem {

struct LossEval {
  double value = 0.0;
  std::vector<double> grad;
};

/// Full-batch loss callback: returns value and gradient, deterministic for
/// fixed parameters. A non-finite value signals an inadmissible state.
using LossFn = std::function<LossEval(std::span<const double>)>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int epochs = 300;
};

struct LbfgsConfig {
  int history = 20;
  double loss_tol = 1e-12;  // stop on |loss change| <= loss_tol
  double grad_tol = 1e-10;  // stop on max-norm of gradient
  int max_iters = 200;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search = 50;
};

struct OptimizerConfig {
  AdamConfig adam;
  LbfgsConfig lbfgs;
};

enum class OptStatus { Converged, MaxIterations, LineSearchFailed, Aborted };
const char* status_name(OptStatus s);

struct OptResult {
  OptStatus status = OptStatus::Converged;
  std::string message;
  int iterations = 0;
  std::vector<double> history;  // loss per Adam step / per accepted L-BFGS iterate
  bool wolfe_ok = true;         // both strong Wolfe inequalities held on every accepted step
};

/// w <- w - lr * grad, elementwise.
void gd_step(std::span<double> params, std::span<const double> grad, double lr);

/// Bias-corrected Adam for exactly config.epochs steps.
OptResult adam_run(const LossFn& loss, std::vector<double>& params, const AdamConfig& config);

/// Two-loop L-BFGS with a strong Wolfe line search. Non-finite loss values
/// are treated as +infinity by the line search; a failed search returns the
/// best parameters seen with a flagged status.
OptResult lbfgs_run(const LossFn& loss, std::vector<double>& params, const LbfgsConfig& config);

}  // namespace dem

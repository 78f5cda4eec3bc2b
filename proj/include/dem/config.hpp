#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dem/hyperelastic.hpp"
#include "dem/mlp.hpp"
#include "dem/optimizers.hpp"
#include "dem/oracles.hpp"
#include "dem/viscoelastic.hpp"

namespace dem {

enum class ExperimentKind {
  UniaxialHyper,
  ShearHyper,
  ViscoLoadUnload,
  ViscoRelaxation,
  ViscoUniaxialStrain,
};

const char* experiment_name(ExperimentKind k);

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

/// Fully resolved run configuration. Serialization is canonical and
/// lossless; parsing rejects unknown keys.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::UniaxialHyper;
  std::uint64_t seed = 42;
  int grid_n = 25;
  Architecture network;
  AdamConfig adam;
  int adam_warm_epochs = -1;  // epochs for warm-started increments; -1 = adam.epochs
  LbfgsConfig lbfgs;
  HyperParams hyper;
  ViscoParams visco;
  std::vector<double> schedule_values;
  std::vector<double> schedule_times;  // viscoelastic experiments only
  ViscoBcMode visco_mode = ViscoBcMode::UniaxialStrain;
  bool single_increment = false;
  bool differentiate_viscous = false;
  bool deterministic_reduction = true;

  bool is_visco() const {
    return experiment == ExperimentKind::ViscoLoadUnload ||
           experiment == ExperimentKind::ViscoRelaxation ||
           experiment == ExperimentKind::ViscoUniaxialStrain;
  }
  int warm_epochs() const { return adam_warm_epochs < 0 ? adam.epochs : adam_warm_epochs; }
};

/// Paper-protocol defaults for each bundled experiment.
RunConfig default_config(ExperimentKind kind);

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace dem

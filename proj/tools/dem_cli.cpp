#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dem/config.hpp"
#include "dem/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int grid_n = 0;
  bool grid_set = false;
  bool single_increment = false;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool config_required) {
  auto* opt = cmd->add_option("--config", args->config_path, "run configuration file");
  if (config_required) opt->required();
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--seed", args->seed, "override the configured seed")
      ->each([args](const std::string&) { args->seed_set = true; });
  cmd->add_option("--grid-n", args->grid_n, "override grid points per axis")
      ->each([args](const std::string&) { args->grid_set = true; });
  cmd->add_flag("--single-increment", args->single_increment,
                "solve only the final load increment");
}

dem::RunConfig resolve(const CommonArgs& args) {
  dem::RunConfig config = args.config_path.empty()
                              ? dem::default_config(dem::ExperimentKind::UniaxialHyper)
                              : dem::load_config_file(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  if (args.grid_set) {
    if (args.grid_n < 2) throw dem::ConfigError(0, "grid must have n >= 2");
    config.grid_n = args.grid_n;
  }
  if (args.single_increment) config.single_increment = true;
  return config;
}

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerification = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep energy method solver for hyperelastic and viscoelastic unit-cube tests"};
  app.require_subcommand(1);

  CommonArgs run_args, check_args, oracle_args;
  CLI::App* run_cmd = app.add_subcommand("run", "solve an experiment and write artifacts");
  add_common(run_cmd, &run_args, true);
  CLI::App* check_cmd =
      app.add_subcommand("check-gradients", "finite-difference gradient verification");
  add_common(check_cmd, &check_args, false);
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "write the semi-analytic reference curve");
  add_common(oracle_cmd, &oracle_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const dem::RunConfig config = resolve(run_args);
      try {
        dem::run_experiment(config, run_args.out_dir);
      } catch (const dem::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
      }
      std::cout << "artifacts written to " << run_args.out_dir << "\n";
      return kExitOk;
    }
    if (check_cmd->parsed()) {
      const dem::RunConfig config = resolve(check_args);
      const dem::GradientCheckReport report = dem::check_gradients(config);
      std::filesystem::create_directories(check_args.out_dir);
      std::ofstream(std::filesystem::path(check_args.out_dir) / "gradient_check.txt")
          << report.text;
      std::cout << report.text;
      return report.pass ? kExitOk : kExitVerification;
    }
    const dem::RunConfig config = resolve(oracle_args);
    dem::write_oracle_curve(config, oracle_args.out_dir);
    std::cout << "oracle curve written to " << oracle_args.out_dir << "\n";
    return kExitOk;
  } catch (const dem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

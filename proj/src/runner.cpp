#include "dem/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace dem {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);  // binary: byte-stable artifacts
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

double rel_err(double value, double reference) {
  const double d = std::abs(value - reference);
  return std::abs(reference) > 1e-12 ? d / std::abs(reference) : d;
}

}  // namespace

void write_artifacts(const RunConfig& config, SolveResult* result,
                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  open_out(dir / "manifest.txt") << serialize_config(config);

  {
    auto out = open_out(dir / "loss_history.csv");
    out << "increment,phase,iteration,loss\n";
    for (std::size_t k = 0; k < result->increments.size(); ++k) {
      const IncrementRecord& rec = result->increments[k];
      for (std::size_t i = 0; i < rec.adam_history.size(); ++i)
        out << k << ",adam," << i << "," << fmt(rec.adam_history[i]) << "\n";
      for (std::size_t i = 0; i < rec.lbfgs_history.size(); ++i)
        out << k << ",lbfgs," << i << "," << fmt(rec.lbfgs_history[i]) << "\n";
    }
  }

  {
    auto out = open_out(dir / "curve.csv");
    out << "applied,dem_stress,oracle_stress,rel_error\n";
    for (const IncrementRecord& rec : result->increments)
      out << fmt(rec.applied) << "," << fmt(rec.stress) << "," << fmt(rec.oracle_stress)
          << "," << fmt(rel_err(rec.stress, rec.oracle_stress)) << "\n";
  }

  for (std::size_t k = 0; k < result->increments.size(); ++k) {
    IncrementRecord& rec = result->increments[k];
    rec.field_ref = "field_" + std::to_string(k) + ".csv";
    auto out = open_out(dir / rec.field_ref);
    out << "x1,x2,x3,u1,u2,u3\n";
    for (const auto& row : rec.field) {
      out << fmt(row[0]);
      for (int c = 1; c < 6; ++c) out << "," << fmt(row[c]);
      out << "\n";
    }
  }
}

SolveResult run_experiment(const RunConfig& config, const std::string& out_dir) {
  SolveResult result =
      config.is_visco() ? solve_viscoelastic(config) : solve_hyperelastic(config);
  write_artifacts(config, &result, out_dir);
  return result;
}

GradientCheckReport check_gradients(const RunConfig& config_in,
                                    const GradientCheckOptions& options) {
  RunConfig config = config_in;
  config.network.activation = Activation::Tanh;  // smooth everywhere
  if (config.is_visco()) config.differentiate_viscous = true;

  GradientCheckReport report;
  std::ostringstream text;
  text << "gradient check (tanh activation forced)\n";

  if (config.network.param_count() == 0) {
    report.degenerate = true;
    text << "degenerate case: network has no parameters; nothing to check\n";
    text << "PASS\n";
    report.text = text.str();
    return report;
  }

  const NetworkParams params = NetworkParams::glorot(config.network, config.seed);
  const double applied = config.schedule_values.front();
  const BCSpec bc = make_experiment_bc(config, applied);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unit(0.05, 0.95);

  // (a) spatial Jacobian of the ansatz vs central differences
  double max_abs_jac = 0.0;
  double max_jac_diff = 0.0;
  const double hx = 1e-6;
  for (int p = 0; p < options.probe_points; ++p) {
    const Vec3 x{unit(rng), unit(rng), unit(rng)};
    const NetEval net = forward_plain(params, x);
    AnsatzEval a = apply_ansatz(x, net.y, net.jac, bc);
    if (options.corrupt_jacobian) a.grad_u(0, 0) *= 1.0 + 1e-3;
    for (int k = 0; k < 3; ++k) {
      Vec3 xp = x, xm = x;
      xp[k] += hx;
      xm[k] -= hx;
      const NetEval np = forward_plain(params, xp);
      const NetEval nm = forward_plain(params, xm);
      const Vec3 up = apply_ansatz(xp, np.y, np.jac, bc).u;
      const Vec3 um = apply_ansatz(xm, nm.y, nm.jac, bc).u;
      for (int i = 0; i < 3; ++i) {
        const double fd = (up[i] - um[i]) / (2.0 * hx);
        max_jac_diff = std::max(max_jac_diff, std::abs(a.grad_u(i, k) - fd));
        max_abs_jac = std::max(max_abs_jac, std::abs(fd));
      }
    }
  }
  report.max_jacobian_err = max_jac_diff / std::max(max_abs_jac, 1e-12);
  text << "spatial jacobian: max normalized error " << fmt(report.max_jacobian_err) << "\n";

  // (b) parameter gradient of the full loss vs central differences
  const QuadratureGrid grid = build_grid(config.grid_n);
  std::vector<Mat3> eps_v(grid.points.size());
  double dt = 0.0;
  if (config.is_visco()) dt = config.schedule_times.front();

  auto loss_at = [&](std::span<const double> flat) {
    if (config.is_visco())
      return visco_loss(flat, grid, bc, config.visco, eps_v, dt, config.network,
                        config.differentiate_viscous);
    return hyper_loss(flat, grid, bc, config.hyper, config.network);
  };

  std::vector<double> flat = params.flat;
  const LossEval base = loss_at(flat);
  double gscale = 0.0;
  for (double g : base.grad) gscale = std::max(gscale, std::abs(g));

  std::uniform_int_distribution<std::size_t> pick(0, flat.size() - 1);
  double max_grad_diff = 0.0;
  for (int p = 0; p < options.probe_params; ++p) {
    const std::size_t idx = pick(rng);
    const double h = 1e-6 * std::max(1.0, std::abs(flat[idx]));
    const double saved = flat[idx];
    flat[idx] = saved + h;
    const double fp = loss_at(flat).value;
    flat[idx] = saved - h;
    const double fm = loss_at(flat).value;
    flat[idx] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    max_grad_diff = std::max(max_grad_diff, std::abs(base.grad[idx] - fd));
  }
  report.max_param_grad_err = max_grad_diff / std::max(gscale, 1e-12);
  text << "parameter gradient: max normalized error " << fmt(report.max_param_grad_err)
       << " over " << options.probe_params << " parameters\n";

  report.pass = report.max_jacobian_err <= 1e-4 && report.max_param_grad_err <= 1e-4;
  text << (report.pass ? "PASS" : "FAIL") << "\n";
  report.text = text.str();
  return report;
}

void write_oracle_curve(const RunConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto out = open_out(fs::path(out_dir) / "oracle_curve.csv");
  if (config.is_visco()) {
    StrainSchedule schedule;
    schedule.times = {0.0};
    schedule.values = {0.0};
    schedule.times.insert(schedule.times.end(), config.schedule_times.begin(),
                          config.schedule_times.end());
    schedule.values.insert(schedule.values.end(), config.schedule_values.begin(),
                           config.schedule_values.end());
    double min_dt = schedule.times[1];
    for (std::size_t i = 2; i < schedule.times.size(); ++i)
      min_dt = std::min(min_dt, schedule.times[i] - schedule.times[i - 1]);
    const auto samples = sls_oracle(schedule, config.visco, min_dt / 20.0,
                                    config.schedule_times, config.visco_mode);
    out << "time,applied,oracle_stress\n";
    for (const SlsSample& s : samples)
      out << fmt(s.time) << "," << fmt(s.strain) << "," << fmt(s.stress) << "\n";
  } else {
    out << "applied,oracle_stress,oracle_energy\n";
    for (double v : config.schedule_values) {
      const OracleResult r = config.experiment == ExperimentKind::ShearHyper
                                 ? shear_oracle(v, config.hyper)
                                 : uniaxial_oracle(1.0 + v, config.hyper);
      out << fmt(v) << "," << fmt(r.stress) << "," << fmt(r.energy) << "\n";
    }
  }
}

}  // namespace dem

#include "dem/solver.hpp"

#include <cmath>
#include <limits>

namespace dem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class PointData, class TractionPoint>
void precompute_bc(const QuadratureGrid& grid, const BCSpec& bc,
                   std::vector<PointData>* volume, std::vector<TractionPoint>* surface) {
  volume->clear();
  volume->reserve(grid.points.size());
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const Vec3& x = grid.points[i];
    PointData d;
    d.x = x;
    d.a = bc.a(x);
    d.b = bc.b(x);
    d.ga = bc.grad_a(x);
    d.gb = bc.grad_b(x);
    d.w = grid.weights[i];
    volume->push_back(d);
  }
  surface->clear();
  for (const auto& tr : bc.tractions) {
    const FaceGrid& face = grid.face(tr.axis, tr.side);
    for (std::size_t j = 0; j < face.points.size(); ++j) {
      TractionPoint tp;
      tp.x = face.points[j];
      tp.a = bc.a(tp.x);
      tp.b = bc.b(tp.x);
      tp.tbar = tr.value;
      tp.w = face.weights[j];
      surface->push_back(tp);
    }
  }
}

}  // namespace

HyperLossEvaluator::HyperLossEvaluator(const QuadratureGrid& grid, const Architecture& arch,
                                       const HyperParams& material)
    : grid_(grid), arch_(arch), material_(material) {
  material_.validate();
}

void HyperLossEvaluator::set_bc(const BCSpec& bc) {
  bc_ = bc;
  precompute_bc(grid_, bc_, &volume_, &surface_);
}

LossEval HyperLossEvaluator::operator()(std::span<const double> params) {
  tape_.clear();
  const NetNodes net = insert_network_leaves(tape_, arch_, params);
  const ad::NodeId identity = tape_.constant(Tensor::from(Mat3::identity()));
  const std::size_t cp = tape_.checkpoint();

  double loss = 0.0;
  for (const PointData& pt : volume_) {
    const ad::NodeId x = tape_.constant(Tensor::from(pt.x));
    const TapeNet out = record_network(tape_, net, arch_, x);
    const AnsatzNodes ansatz = apply_ansatz_node(
        tape_, tape_.constant(Tensor::from(pt.a)), tape_.constant(Tensor::from(pt.b)),
        tape_.constant(Tensor::from(pt.ga)), tape_.constant(Tensor::from(pt.gb)), out.y,
        out.jac);
    const ad::NodeId f = tape_.add(identity, ansatz.grad_u);
    const EnergyNodes energy = strain_energy_node(tape_, f, material_);
    if (tape_.scalar_value(energy.det_f) <= 0.0) {
      return {kInf, std::vector<double>(params.size(), 0.0)};
    }
    loss += pt.w * tape_.scalar_value(energy.psi);
    tape_.backward_accumulate(energy.psi, pt.w, cp);
    tape_.rewind(cp);
  }
  for (const TractionPoint& pt : surface_) {
    const ad::NodeId x = tape_.constant(Tensor::from(pt.x));
    const TapeNet out = record_network(tape_, net, arch_, x);
    const ad::NodeId u =
        tape_.add(tape_.constant(Tensor::from(pt.a)),
                  tape_.mul(tape_.constant(Tensor::from(pt.b)), out.y));
    const ad::NodeId work = tape_.dot(u, tape_.constant(Tensor::from(pt.tbar)));
    loss -= pt.w * tape_.scalar_value(work);
    tape_.backward_accumulate(work, -pt.w, cp);
    tape_.rewind(cp);
  }
  return {loss, tape_.parameter_gradient()};
}

ViscoLossEvaluator::ViscoLossEvaluator(const QuadratureGrid& grid, const Architecture& arch,
                                       const ViscoParams& material, bool differentiate_viscous)
    : grid_(grid),
      arch_(arch),
      material_(material),
      differentiate_viscous_(differentiate_viscous) {
  material_.validate();
}

void ViscoLossEvaluator::set_step(const BCSpec& bc, const std::vector<Mat3>& eps_v_n,
                                  double dt) {
  if (dt <= 0.0) throw std::invalid_argument("visco step: dt must be > 0");
  if (eps_v_n.size() != grid_.points.size())
    throw std::invalid_argument("visco step: eps_v field size mismatch");
  bc_ = bc;
  eps_v_n_ = eps_v_n;
  dt_ = dt;
  precompute_bc(grid_, bc_, &volume_, &surface_);
}

LossEval ViscoLossEvaluator::operator()(std::span<const double> params) {
  tape_.clear();
  const NetNodes net = insert_network_leaves(tape_, arch_, params);
  const std::size_t cp = tape_.checkpoint();

  double loss = 0.0;
  for (std::size_t i = 0; i < volume_.size(); ++i) {
    const PointData& pt = volume_[i];
    const ad::NodeId x = tape_.constant(Tensor::from(pt.x));
    const TapeNet out = record_network(tape_, net, arch_, x);
    const AnsatzNodes ansatz = apply_ansatz_node(
        tape_, tape_.constant(Tensor::from(pt.a)), tape_.constant(Tensor::from(pt.b)),
        tape_.constant(Tensor::from(pt.ga)), tape_.constant(Tensor::from(pt.gb)), out.y,
        out.jac);
    const ad::NodeId eps =
        tape_.scale(tape_.add(ansatz.grad_u, tape_.transpose(ansatz.grad_u)), 0.5);
    const ad::NodeId eps_v_prev = tape_.constant(Tensor::from(eps_v_n_[i]));

    ad::NodeId eps_v_next;
    if (differentiate_viscous_) {
      eps_v_next = rk5_step_node(tape_, eps_v_prev, eps, dt_, material_);
    } else {
      const Mat3 eps_val = tape_.value_tensor(eps).as_mat3();
      eps_v_next = tape_.constant(Tensor::from(rk5_step(eps_v_n_[i], eps_val, dt_, material_)));
    }

    const ad::NodeId psi = free_energy_node(tape_, eps, eps_v_next, material_);
    const ad::NodeId rate = tape_.scale(tape_.sub(eps_v_next, eps_v_prev), 1.0 / dt_);
    const ad::NodeId eta = dissipation_node(tape_, rate, material_);
    const ad::NodeId integrand = tape_.add(psi, tape_.scale(eta, dt_));

    loss += pt.w * tape_.scalar_value(integrand);
    tape_.backward_accumulate(integrand, pt.w, cp);
    tape_.rewind(cp);
  }
  for (const TractionPoint& pt : surface_) {
    const ad::NodeId x = tape_.constant(Tensor::from(pt.x));
    const TapeNet out = record_network(tape_, net, arch_, x);
    const ad::NodeId u =
        tape_.add(tape_.constant(Tensor::from(pt.a)),
                  tape_.mul(tape_.constant(Tensor::from(pt.b)), out.y));
    const ad::NodeId work = tape_.dot(u, tape_.constant(Tensor::from(pt.tbar)));
    loss -= pt.w * tape_.scalar_value(work);
    tape_.backward_accumulate(work, -pt.w, cp);
    tape_.rewind(cp);
  }
  return {loss, tape_.parameter_gradient()};
}

void ViscoLossEvaluator::state_at(std::span<const double> params, std::vector<Mat3>* eps_out,
                                  std::vector<Mat3>* eps_v_next) const {
  NetworkParams p;
  p.arch = arch_;
  p.flat.assign(params.begin(), params.end());
  eps_out->resize(volume_.size());
  eps_v_next->resize(volume_.size());
  for (std::size_t i = 0; i < volume_.size(); ++i) {
    const NetEval net = forward_plain(p, volume_[i].x);
    const AnsatzEval a = apply_ansatz(volume_[i].x, net.y, net.jac, bc_);
    const Mat3 eps = sym(a.grad_u);
    (*eps_out)[i] = eps;
    (*eps_v_next)[i] = rk5_step(eps_v_n_[i], eps, dt_, material_);
  }
}

LossEval hyper_loss(std::span<const double> params, const QuadratureGrid& grid,
                    const BCSpec& bc, const HyperParams& material, const Architecture& arch) {
  HyperLossEvaluator eval(grid, arch, material);
  eval.set_bc(bc);
  return eval(params);
}

LossEval visco_loss(std::span<const double> params, const QuadratureGrid& grid,
                    const BCSpec& bc, const ViscoParams& material,
                    const std::vector<Mat3>& eps_v_n, double dt, const Architecture& arch,
                    bool differentiate_viscous) {
  ViscoLossEvaluator eval(grid, arch, material, differentiate_viscous);
  eval.set_step(bc, eps_v_n, dt);
  return eval(params);
}

BCSpec make_experiment_bc(const RunConfig& config, double applied) {
  switch (config.experiment) {
    case ExperimentKind::UniaxialHyper:
      return make_uniaxial_hyper_bc(applied);
    case ExperimentKind::ShearHyper:
      return make_shear_bc(applied);
    default:
      return config.visco_mode == ViscoBcMode::UniaxialStrain
                 ? make_visco_strain_bc(applied)
                 : make_visco_stress_bc(applied);
  }
}

namespace {

struct OptimizedIncrement {
  OptResult adam;
  OptResult lbfgs;
  double loss = 0.0;
};

OptimizedIncrement optimize_increment(const LossFn& fn, std::vector<double>& flat,
                                      const RunConfig& config, int increment) {
  OptimizedIncrement out;
  AdamConfig adam = config.adam;
  if (increment > 0) adam.epochs = config.warm_epochs();
  out.adam = adam_run(fn, flat, adam);
  if (out.adam.status == OptStatus::Aborted)
    throw SolverError("increment " + std::to_string(increment) +
                      ": adam aborted: " + out.adam.message);
  out.lbfgs = lbfgs_run(fn, flat, config.lbfgs);
  if (out.lbfgs.status == OptStatus::Aborted)
    throw SolverError("increment " + std::to_string(increment) +
                      ": l-bfgs aborted: " + out.lbfgs.message);
  out.loss = out.lbfgs.history.empty() ? fn(flat).value : out.lbfgs.history.back();
  return out;
}

void fill_record_common(IncrementRecord* rec, const OptimizedIncrement& opt) {
  rec->loss = opt.loss;
  rec->adam_iterations = opt.adam.iterations;
  rec->lbfgs_iterations = opt.lbfgs.iterations;
  rec->status = opt.lbfgs.status;
  rec->adam_history = opt.adam.history;
  rec->lbfgs_history = opt.lbfgs.history;
}

}  // namespace

SolveResult solve_hyperelastic(const RunConfig& config) {
  const QuadratureGrid grid = build_grid(config.grid_n);
  NetworkParams params = NetworkParams::glorot(config.network, config.seed);
  HyperLossEvaluator eval(grid, config.network, config.hyper);

  std::vector<double> schedule = config.schedule_values;
  if (config.single_increment) schedule = {schedule.back()};

  const bool shear = config.experiment == ExperimentKind::ShearHyper;
  SolveResult result;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double applied = schedule[k];
    eval.set_bc(make_experiment_bc(config, applied));
    LossFn fn = [&eval](std::span<const double> p) { return eval(p); };
    const OptimizedIncrement opt = optimize_increment(fn, params.flat, config,
                                                      static_cast<int>(k));

    IncrementRecord rec;
    rec.applied = applied;
    fill_record_common(&rec, opt);

    // volume-averaged stress probe and field snapshot from the converged net
    const BCSpec bc = make_experiment_bc(config, applied);
    double stress = 0.0;
    rec.field.reserve(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      const NetEval net = forward_plain(params, grid.points[i]);
      const AnsatzEval a = apply_ansatz(grid.points[i], net.y, net.jac, bc);
      const Mat3 f = Mat3::identity() + a.grad_u;
      const Mat3 p = first_pk_stress(f, config.hyper);
      stress += grid.weights[i] * (shear ? p(0, 1) : p(0, 0));
      rec.field.push_back({grid.points[i][0], grid.points[i][1], grid.points[i][2], a.u[0],
                           a.u[1], a.u[2]});
    }
    rec.stress = stress;
    rec.oracle_stress = shear ? shear_oracle(applied, config.hyper).stress
                              : uniaxial_oracle(1.0 + applied, config.hyper).stress;
    result.increments.push_back(std::move(rec));
  }
  result.params = std::move(params);
  return result;
}

SolveResult solve_viscoelastic(const RunConfig& config) {
  const QuadratureGrid grid = build_grid(config.grid_n);
  NetworkParams params = NetworkParams::glorot(config.network, config.seed);
  ViscoLossEvaluator eval(grid, config.network, config.visco, config.differentiate_viscous);

  if (config.schedule_times.size() != config.schedule_values.size())
    throw SolverError("viscoelastic schedule needs matching times and values");

  // fine-step reference solution sampled at the increment times
  StrainSchedule schedule;
  schedule.times = {0.0};
  schedule.values = {0.0};
  schedule.times.insert(schedule.times.end(), config.schedule_times.begin(),
                        config.schedule_times.end());
  schedule.values.insert(schedule.values.end(), config.schedule_values.begin(),
                         config.schedule_values.end());
  double min_dt = kInf;
  {
    double prev = 0.0;
    for (double t : config.schedule_times) {
      min_dt = std::min(min_dt, t - prev);
      prev = t;
    }
  }
  const std::vector<SlsSample> oracle =
      sls_oracle(schedule, config.visco, min_dt / 20.0, config.schedule_times,
                 config.visco_mode);

  std::vector<Mat3> eps_v(grid.points.size());
  SolveResult result;
  double t_prev = 0.0;
  for (std::size_t k = 0; k < config.schedule_times.size(); ++k) {
    const double t = config.schedule_times[k];
    const double applied = config.schedule_values[k];
    const double dt = t - t_prev;
    const BCSpec bc = make_experiment_bc(config, applied);
    eval.set_step(bc, eps_v, dt);
    LossFn fn = [&eval](std::span<const double> p) { return eval(p); };
    const OptimizedIncrement opt = optimize_increment(fn, params.flat, config,
                                                      static_cast<int>(k));

    IncrementRecord rec;
    rec.applied = applied;
    rec.time = t;
    fill_record_common(&rec, opt);

    // commit the internal variable and probe the stress
    std::vector<Mat3> eps_field, eps_v_next;
    eval.state_at(params.flat, &eps_field, &eps_v_next);
    double stress = 0.0;
    rec.field.reserve(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      stress +=
          grid.weights[i] * cauchy_stress(eps_field[i], eps_v_next[i], config.visco)(0, 0);
      const NetEval net = forward_plain(params, grid.points[i]);
      const AnsatzEval a = apply_ansatz(grid.points[i], net.y, net.jac, bc);
      rec.field.push_back({grid.points[i][0], grid.points[i][1], grid.points[i][2], a.u[0],
                           a.u[1], a.u[2]});
    }
    rec.stress = stress;
    rec.oracle_stress = oracle[k].stress;
    eps_v = std::move(eps_v_next);
    t_prev = t;
    result.increments.push_back(std::move(rec));
  }
  result.params = std::move(params);
  return result;
}

}  // namespace dem

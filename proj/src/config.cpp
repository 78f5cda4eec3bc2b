#include "dem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dem {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt(v[i]);
  }
  return s;
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class KeyMap {
 public:
  explicit KeyMap(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
      std::string key = trim(s.substr(0, eq));
      std::string value = trim(s.substr(eq + 1));
      if (key.empty()) throw ConfigError(line, "empty key");
      if (entries_.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
      entries_[key] = {value, line, false};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry* get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, e] : entries_)
      if (!e.used) throw ConfigError(e.line, "unknown key '" + key + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, Entry> entries_;
};

double parse_double(const Entry& e) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.line, "expected a number, got '" + e.value + "'");
  }
  if (pos != e.value.size()) throw ConfigError(e.line, "trailing text after number");
  return v;
}

long long parse_int(const Entry& e) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.line, "expected an integer, got '" + e.value + "'");
  }
  if (pos != e.value.size()) throw ConfigError(e.line, "trailing text after integer");
  return v;
}

bool parse_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError(e.line, "expected true or false, got '" + e.value + "'");
}

std::vector<double> parse_double_list(const Entry& e) {
  std::vector<double> out;
  std::istringstream in(e.value);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError(e.line, "expected numbers, got '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const Entry& e) {
  std::vector<int> out;
  for (double v : parse_double_list(e)) {
    if (v != std::floor(v)) throw ConfigError(e.line, "expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::UniaxialHyper: return "uniaxial-hyper";
    case ExperimentKind::ShearHyper: return "shear-hyper";
    case ExperimentKind::ViscoLoadUnload: return "visco-load-unload";
    case ExperimentKind::ViscoRelaxation: return "visco-relaxation";
    case ExperimentKind::ViscoUniaxialStrain: return "visco-uniaxial-strain";
  }
  return "?";
}

RunConfig default_config(ExperimentKind kind) {
  RunConfig c;
  c.experiment = kind;
  c.network.layers = {3, 40, 40, 40, 40, 40, 40, 3};
  c.network.activation = Activation::Relu;
  c.hyper.alpha = {1.0, -2.47};
  c.hyper.mu = {13.5, 1.08};
  c.hyper.lambda = 146.2;

  switch (kind) {
    case ExperimentKind::UniaxialHyper:
    case ExperimentKind::ShearHyper:
      c.schedule_values = {0.125, 0.25, 0.375, 0.5};
      break;
    case ExperimentKind::ViscoLoadUnload:
      // 3% strain in 1 s, back to 0% in another 1 s, dt = 0.05 s
      for (int i = 1; i <= 40; ++i) {
        const double t = 0.05 * i;
        c.schedule_times.push_back(t);
        c.schedule_values.push_back(t <= 1.0 ? 0.03 * t : 0.03 * (2.0 - t));
      }
      break;
    case ExperimentKind::ViscoRelaxation:
      // near-step ramp to 3%, then hold long enough to reach equilibrium
      c.schedule_times.push_back(0.001);
      c.schedule_values.push_back(0.03);
      for (int i = 1; i <= 30; ++i) {
        c.schedule_times.push_back(0.001 + 0.1 * i);
        c.schedule_values.push_back(0.03);
      }
      break;
    case ExperimentKind::ViscoUniaxialStrain:
      for (int i = 1; i <= 20; ++i) {
        c.schedule_times.push_back(0.05 * i);
        c.schedule_values.push_back(0.03 * 0.05 * i);
      }
      break;
  }
  return c;
}

RunConfig parse_config(const std::string& text) {
  KeyMap keys(text);

  const Entry* exp = keys.get("experiment");
  if (!exp) throw ConfigError(0, "missing required key 'experiment'");
  ExperimentKind kind;
  if (exp->value == "uniaxial-hyper") kind = ExperimentKind::UniaxialHyper;
  else if (exp->value == "shear-hyper") kind = ExperimentKind::ShearHyper;
  else if (exp->value == "visco-load-unload") kind = ExperimentKind::ViscoLoadUnload;
  else if (exp->value == "visco-relaxation") kind = ExperimentKind::ViscoRelaxation;
  else if (exp->value == "visco-uniaxial-strain") kind = ExperimentKind::ViscoUniaxialStrain;
  else throw ConfigError(exp->line, "unknown experiment '" + exp->value + "'");

  RunConfig c = default_config(kind);

  if (const Entry* e = keys.get("format_version")) {
    if (parse_int(*e) != 1) throw ConfigError(e->line, "unsupported format_version");
  }
  if (const Entry* e = keys.get("seed")) c.seed = static_cast<std::uint64_t>(parse_int(*e));
  if (const Entry* e = keys.get("grid.n")) {
    const long long n = parse_int(*e);
    if (n < 2) throw ConfigError(e->line, "grid must have n >= 2");
    c.grid_n = static_cast<int>(n);
  }
  if (const Entry* e = keys.get("network.layers")) {
    c.network.layers = parse_int_list(*e);
    try {
      c.network.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(e->line, ex.what());
    }
  }
  if (const Entry* e = keys.get("network.activation")) {
    if (e->value == "relu") c.network.activation = Activation::Relu;
    else if (e->value == "tanh") c.network.activation = Activation::Tanh;
    else throw ConfigError(e->line, "unknown activation '" + e->value + "'");
  }
  if (const Entry* e = keys.get("adam.lr")) c.adam.lr = parse_double(*e);
  if (const Entry* e = keys.get("adam.beta1")) c.adam.beta1 = parse_double(*e);
  if (const Entry* e = keys.get("adam.beta2")) c.adam.beta2 = parse_double(*e);
  if (const Entry* e = keys.get("adam.eps")) c.adam.eps = parse_double(*e);
  if (const Entry* e = keys.get("adam.epochs")) {
    c.adam.epochs = static_cast<int>(parse_int(*e));
    if (c.adam.epochs < 0) throw ConfigError(e->line, "adam.epochs must be >= 0");
  }
  if (const Entry* e = keys.get("adam.warm_epochs"))
    c.adam_warm_epochs = static_cast<int>(parse_int(*e));
  if (const Entry* e = keys.get("lbfgs.history"))
    c.lbfgs.history = static_cast<int>(parse_int(*e));
  if (const Entry* e = keys.get("lbfgs.loss_tol")) c.lbfgs.loss_tol = parse_double(*e);
  if (const Entry* e = keys.get("lbfgs.grad_tol")) c.lbfgs.grad_tol = parse_double(*e);
  if (const Entry* e = keys.get("lbfgs.max_iters"))
    c.lbfgs.max_iters = static_cast<int>(parse_int(*e));
  if (const Entry* e = keys.get("lbfgs.wolfe_c1")) c.lbfgs.c1 = parse_double(*e);
  if (const Entry* e = keys.get("lbfgs.wolfe_c2")) c.lbfgs.c2 = parse_double(*e);
  if (const Entry* e = keys.get("lbfgs.max_line_search"))
    c.lbfgs.max_line_search = static_cast<int>(parse_int(*e));
  if (const Entry* e = keys.get("material.hyper.alpha")) c.hyper.alpha = parse_double_list(*e);
  if (const Entry* e = keys.get("material.hyper.mu")) c.hyper.mu = parse_double_list(*e);
  if (const Entry* e = keys.get("material.hyper.lambda")) c.hyper.lambda = parse_double(*e);
  if (const Entry* e = keys.get("material.visco.mu0")) c.visco.mu0 = parse_double(*e);
  if (const Entry* e = keys.get("material.visco.kappa0")) c.visco.kappa0 = parse_double(*e);
  if (const Entry* e = keys.get("material.visco.mu1")) c.visco.mu1 = parse_double(*e);
  if (const Entry* e = keys.get("material.visco.kappa1")) c.visco.kappa1 = parse_double(*e);
  if (const Entry* e = keys.get("material.visco.omega_k")) c.visco.omega_k = parse_double(*e);
  if (const Entry* e = keys.get("material.visco.omega_j")) c.visco.omega_j = parse_double(*e);
  if (const Entry* e = keys.get("schedule.values")) c.schedule_values = parse_double_list(*e);
  if (const Entry* e = keys.get("schedule.times")) c.schedule_times = parse_double_list(*e);
  if (const Entry* e = keys.get("visco.mode")) {
    if (e->value == "uniaxial-strain") c.visco_mode = ViscoBcMode::UniaxialStrain;
    else if (e->value == "uniaxial-stress") c.visco_mode = ViscoBcMode::UniaxialStress;
    else throw ConfigError(e->line, "unknown visco.mode '" + e->value + "'");
  }
  if (const Entry* e = keys.get("flags.single_increment")) c.single_increment = parse_bool(*e);
  if (const Entry* e = keys.get("flags.differentiate_viscous"))
    c.differentiate_viscous = parse_bool(*e);
  if (const Entry* e = keys.get("flags.deterministic_reduction"))
    c.deterministic_reduction = parse_bool(*e);

  keys.reject_unknown();

  try {
    c.hyper.validate();
    c.visco.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(0, ex.what());
  }
  if (c.schedule_values.empty()) throw ConfigError(0, "schedule.values must not be empty");
  if (c.is_visco()) {
    if (c.schedule_times.size() != c.schedule_values.size())
      throw ConfigError(0, "schedule.times and schedule.values must have equal length");
    double prev = 0.0;
    for (double t : c.schedule_times) {
      if (t <= prev) throw ConfigError(0, "schedule.times must be strictly increasing from 0");
      prev = t;
    }
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "format_version = 1\n";
  out << "experiment = " << experiment_name(c.experiment) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "grid.n = " << c.grid_n << "\n";
  out << "network.layers = " << fmt_list(c.network.layers) << "\n";
  out << "network.activation = "
      << (c.network.activation == Activation::Relu ? "relu" : "tanh") << "\n";
  out << "adam.lr = " << fmt(c.adam.lr) << "\n";
  out << "adam.beta1 = " << fmt(c.adam.beta1) << "\n";
  out << "adam.beta2 = " << fmt(c.adam.beta2) << "\n";
  out << "adam.eps = " << fmt(c.adam.eps) << "\n";
  out << "adam.epochs = " << c.adam.epochs << "\n";
  out << "adam.warm_epochs = " << c.adam_warm_epochs << "\n";
  out << "lbfgs.history = " << c.lbfgs.history << "\n";
  out << "lbfgs.loss_tol = " << fmt(c.lbfgs.loss_tol) << "\n";
  out << "lbfgs.grad_tol = " << fmt(c.lbfgs.grad_tol) << "\n";
  out << "lbfgs.max_iters = " << c.lbfgs.max_iters << "\n";
  out << "lbfgs.wolfe_c1 = " << fmt(c.lbfgs.c1) << "\n";
  out << "lbfgs.wolfe_c2 = " << fmt(c.lbfgs.c2) << "\n";
  out << "lbfgs.max_line_search = " << c.lbfgs.max_line_search << "\n";
  out << "material.hyper.alpha = " << fmt_list(c.hyper.alpha) << "\n";
  out << "material.hyper.mu = " << fmt_list(c.hyper.mu) << "\n";
  out << "material.hyper.lambda = " << fmt(c.hyper.lambda) << "\n";
  out << "material.visco.mu0 = " << fmt(c.visco.mu0) << "\n";
  out << "material.visco.kappa0 = " << fmt(c.visco.kappa0) << "\n";
  out << "material.visco.mu1 = " << fmt(c.visco.mu1) << "\n";
  out << "material.visco.kappa1 = " << fmt(c.visco.kappa1) << "\n";
  out << "material.visco.omega_k = " << fmt(c.visco.omega_k) << "\n";
  out << "material.visco.omega_j = " << fmt(c.visco.omega_j) << "\n";
  out << "schedule.values = " << fmt_list(c.schedule_values) << "\n";
  if (!c.schedule_times.empty())
    out << "schedule.times = " << fmt_list(c.schedule_times) << "\n";
  out << "visco.mode = "
      << (c.visco_mode == ViscoBcMode::UniaxialStrain ? "uniaxial-strain" : "uniaxial-stress")
      << "\n";
  out << "flags.single_increment = " << (c.single_increment ? "true" : "false") << "\n";
  out << "flags.differentiate_viscous = " << (c.differentiate_viscous ? "true" : "false")
      << "\n";
  out << "flags.deterministic_reduction = " << (c.deterministic_reduction ? "true" : "false")
      << "\n";
  return out.str();
}

}  // namespace dem

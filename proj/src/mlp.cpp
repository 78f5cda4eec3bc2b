#include "dem/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dem {

std::size_t Architecture::param_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const std::size_t in = static_cast<std::size_t>(layers[static_cast<std::size_t>(l)]);
    const std::size_t out = static_cast<std::size_t>(layers[static_cast<std::size_t>(l) + 1]);
    n += in * out + out;
  }
  return n;
}

void Architecture::validate() const {
  if (layers.empty()) return;  // degenerate zero network
  if (layers.size() < 2) throw std::invalid_argument("network: need at least two layer sizes");
  if (layers.front() != 3 || layers.back() != 3)
    throw std::invalid_argument("network: input and output layers must have 3 neurons");
  for (int w : layers)
    if (w < 1) throw std::invalid_argument("network: layer sizes must be positive");
}

NetworkParams NetworkParams::zeros(const Architecture& arch) {
  NetworkParams p;
  p.arch = arch;
  p.flat.assign(arch.param_count(), 0.0);
  return p;
}

NetworkParams NetworkParams::glorot(const Architecture& arch, std::uint64_t seed) {
  NetworkParams p = zeros(arch);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int in = arch.layers[static_cast<std::size_t>(l)];
    const int out = arch.layers[static_cast<std::size_t>(l) + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : p.weight(l)) w = dist(rng);
  }
  return p;
}

std::size_t NetworkParams::weight_offset(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    const std::size_t in = static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(l)]);
    const std::size_t out =
        static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(l) + 1]);
    off += in * out + out;
  }
  return off;
}

std::size_t NetworkParams::bias_offset(int layer) const {
  const std::size_t in = static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer)]);
  const std::size_t out =
      static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer) + 1]);
  return weight_offset(layer) + in * out;
}

std::span<double> NetworkParams::weight(int layer) {
  const std::size_t in = static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer)]);
  const std::size_t out =
      static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer) + 1]);
  return {flat.data() + weight_offset(layer), in * out};
}
std::span<const double> NetworkParams::weight(int layer) const {
  const std::size_t in = static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer)]);
  const std::size_t out =
      static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer) + 1]);
  return {flat.data() + weight_offset(layer), in * out};
}
std::span<double> NetworkParams::bias(int layer) {
  const std::size_t out =
      static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer) + 1]);
  return {flat.data() + bias_offset(layer), out};
}
std::span<const double> NetworkParams::bias(int layer) const {
  const std::size_t out =
      static_cast<std::size_t>(arch.layers[static_cast<std::size_t>(layer) + 1]);
  return {flat.data() + bias_offset(layer), out};
}

NetEval forward_plain(const NetworkParams& params, const Vec3& x) {
  NetEval out;
  const Architecture& arch = params.arch;
  const int L = arch.layer_count();
  if (L == 0) return out;  // zero network

  std::vector<double> h = {x[0], x[1], x[2]};
  std::vector<double> jac = {1, 0, 0, 0, 1, 0, 0, 0, 1};  // width x 3, row-major
  std::vector<double> z, jnew;

  for (int l = 0; l < L; ++l) {
    const int in = arch.layers[static_cast<std::size_t>(l)];
    const int wout = arch.layers[static_cast<std::size_t>(l) + 1];
    const auto w = params.weight(l);
    const auto b = params.bias(l);

    z.assign(static_cast<std::size_t>(wout), 0.0);
    jnew.assign(static_cast<std::size_t>(wout) * 3, 0.0);
    for (int i = 0; i < wout; ++i) {
      const double* wrow = w.data() + static_cast<std::size_t>(i) * in;
      double s = b[static_cast<std::size_t>(i)];
      double j0 = 0, j1 = 0, j2 = 0;
      for (int j = 0; j < in; ++j) {
        const double wij = wrow[j];
        s += wij * h[static_cast<std::size_t>(j)];
        const double* jrow = jac.data() + static_cast<std::size_t>(j) * 3;
        j0 += wij * jrow[0];
        j1 += wij * jrow[1];
        j2 += wij * jrow[2];
      }
      z[static_cast<std::size_t>(i)] = s;
      jnew[static_cast<std::size_t>(i) * 3 + 0] = j0;
      jnew[static_cast<std::size_t>(i) * 3 + 1] = j1;
      jnew[static_cast<std::size_t>(i) * 3 + 2] = j2;
    }

    const bool last = l == L - 1;
    if (!last) {
      h.assign(static_cast<std::size_t>(wout), 0.0);
      for (int i = 0; i < wout; ++i) {
        const double zi = z[static_cast<std::size_t>(i)];
        double fp;
        if (arch.activation == Activation::Relu) {
          h[static_cast<std::size_t>(i)] = zi > 0.0 ? zi : 0.0;
          fp = zi > 0.0 ? 1.0 : 0.0;
        } else {
          const double t = std::tanh(zi);
          h[static_cast<std::size_t>(i)] = t;
          fp = 1.0 - t * t;
        }
        for (int k = 0; k < 3; ++k) jnew[static_cast<std::size_t>(i) * 3 + k] *= fp;
      }
    } else {
      h = z;
    }
    jac.swap(jnew);
  }

  out.y = {h[0], h[1], h[2]};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out.jac(i, k) = jac[static_cast<std::size_t>(i) * 3 + k];
  return out;
}

NetNodes insert_network_leaves(ad::Tape& tape, const Architecture& arch,
                               std::span<const double> flat) {
  if (flat.size() != arch.param_count())
    throw std::invalid_argument("network leaves: flat parameter size mismatch");
  NetNodes nodes;
  std::size_t off = 0;
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int in = arch.layers[static_cast<std::size_t>(l)];
    const int out = arch.layers[static_cast<std::size_t>(l) + 1];
    Tensor w(out, in);
    for (int i = 0; i < out * in; ++i) w.data[static_cast<std::size_t>(i)] = flat[off++];
    nodes.weights.push_back(tape.leaf(w));
    Tensor b(out, 1);
    for (int i = 0; i < out; ++i) b.data[static_cast<std::size_t>(i)] = flat[off++];
    nodes.biases.push_back(tape.leaf(b));
  }
  return nodes;
}

NetNodes insert_network_leaves(ad::Tape& tape, const NetworkParams& params) {
  return insert_network_leaves(tape, params.arch, params.flat);
}

TapeNet record_network(ad::Tape& tape, const NetNodes& nodes, const Architecture& arch,
                       ad::NodeId x) {
  const int L = arch.layer_count();
  if (L == 0) {
    return {tape.constant(Tensor(3, 1)), tape.constant(Tensor(3, 3))};
  }

  ad::NodeId h = x;
  ad::NodeId jac = ad::kNoNode;
  for (int l = 0; l < L; ++l) {
    const ad::NodeId w = nodes.weights[static_cast<std::size_t>(l)];
    const ad::NodeId b = nodes.biases[static_cast<std::size_t>(l)];
    const ad::NodeId z = tape.add(tape.matvec(w, h), b);
    const ad::NodeId jpre = l == 0 ? w : tape.matmul(w, jac);

    if (l < L - 1) {
      ad::NodeId fprime;
      if (arch.activation == Activation::Relu) {
        h = tape.relu(z);
        fprime = tape.relu_grad(z);
      } else {
        h = tape.tanh(z);
        Tensor ones(tape.rows(z), 1);
        for (double& v : ones.data) v = 1.0;
        fprime = tape.sub(tape.constant(ones), tape.square(h));
      }
      jac = tape.rowscale(jpre, fprime);
    } else {
      h = z;
      jac = jpre;
    }
  }
  return {h, jac};
}

AnsatzEval apply_ansatz(const Vec3& x, const Vec3& y, const Mat3& jac, const BCSpec& bc) {
  AnsatzEval e;
  const Vec3 a = bc.a(x);
  const Vec3 b = bc.b(x);
  const Mat3 ga = bc.grad_a(x);
  const Mat3 gb = bc.grad_b(x);
  for (int i = 0; i < 3; ++i) {
    e.u[i] = a[i] + b[i] * y[i];
    for (int k = 0; k < 3; ++k)
      e.grad_u(i, k) = ga(i, k) + b[i] * jac(i, k) + gb(i, k) * y[i];
  }
  return e;
}

AnsatzNodes apply_ansatz_node(ad::Tape& tape, ad::NodeId a_const, ad::NodeId b_const,
                              ad::NodeId grad_a_const, ad::NodeId grad_b_const, ad::NodeId y,
                              ad::NodeId jac) {
  const ad::NodeId u = tape.add(a_const, tape.mul(b_const, y));
  const ad::NodeId grad_u = tape.add(
      grad_a_const, tape.add(tape.rowscale(jac, b_const), tape.rowscale(grad_b_const, y)));
  return {u, grad_u};
}

BCSpec make_uniaxial_hyper_bc(double delta) {
  BCSpec bc;
  bc.a = [delta](const Vec3& x) { return Vec3{delta * x[0], 0.0, 0.0}; };
  bc.grad_a = [delta](const Vec3&) {
    Mat3 g;
    g(0, 0) = delta;
    return g;
  };
  bc.b = [](const Vec3& x) { return Vec3{x[0] * (1.0 - x[0]), x[1], x[2]}; };
  bc.grad_b = [](const Vec3& x) {
    Mat3 g;
    g(0, 0) = 1.0 - 2.0 * x[0];
    g(1, 1) = 1.0;
    g(2, 2) = 1.0;
    return g;
  };
  bc.essentials = {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {2, 0, 2}};
  return bc;
}

BCSpec make_shear_bc(double gamma) {
  BCSpec bc;
  bc.a = [gamma](const Vec3& x) { return Vec3{gamma * x[1], 0.0, 0.0}; };
  bc.grad_a = [gamma](const Vec3&) {
    Mat3 g;
    g(0, 1) = gamma;
    return g;
  };
  auto bubble = [](const Vec3& x) {
    return x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) * x[2] * (1.0 - x[2]);
  };
  bc.b = [bubble](const Vec3& x) {
    const double s = bubble(x);
    return Vec3{s, s, s};
  };
  bc.grad_b = [](const Vec3& x) {
    const double p0 = x[0] * (1.0 - x[0]);
    const double p1 = x[1] * (1.0 - x[1]);
    const double p2 = x[2] * (1.0 - x[2]);
    const Vec3 d{(1.0 - 2.0 * x[0]) * p1 * p2, p0 * (1.0 - 2.0 * x[1]) * p2,
                 p0 * p1 * (1.0 - 2.0 * x[2])};
    Mat3 g;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) g(i, k) = d[k];
    return g;
  };
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side)
      for (int comp = 0; comp < 3; ++comp) bc.essentials.push_back({axis, side, comp});
  return bc;
}

BCSpec make_visco_strain_bc(double strain) {
  BCSpec bc;
  bc.a = [strain](const Vec3& x) { return Vec3{strain * x[0], 0.0, 0.0}; };
  bc.grad_a = [strain](const Vec3&) {
    Mat3 g;
    g(0, 0) = strain;
    return g;
  };
  bc.b = [](const Vec3& x) {
    return Vec3{x[0] * (1.0 - x[0]), x[1] * (1.0 - x[1]), x[2] * (1.0 - x[2])};
  };
  bc.grad_b = [](const Vec3& x) {
    Mat3 g;
    for (int i = 0; i < 3; ++i) g(i, i) = 1.0 - 2.0 * x[i];
    return g;
  };
  bc.essentials = {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 1}, {2, 0, 2}, {2, 1, 2}};
  return bc;
}

BCSpec make_visco_stress_bc(double strain) {
  BCSpec bc = make_uniaxial_hyper_bc(strain);
  return bc;
}

}  // namespace dem

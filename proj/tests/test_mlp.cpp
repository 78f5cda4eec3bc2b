#include <doctest.h>

#include <cmath>
#include <random>

#include "dem/mlp.hpp"
#include "test_util.hpp"

using namespace dem;
using namespace dem::test;

namespace {

Architecture small_arch(Activation act = Activation::Relu) {
  return {{3, 8, 8, 3}, act};
}

// Straight-line evaluation of the layer recursion, written independently of
// the production code path (no jacobian, plain loops over the flat vector).
Vec3 forward_oracle(const NetworkParams& p, const Vec3& x) {
  std::vector<double> h = {x[0], x[1], x[2]};
  std::size_t off = 0;
  const auto& layers = p.arch.layers;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const std::size_t in = static_cast<std::size_t>(layers[l]);
    const std::size_t out = static_cast<std::size_t>(layers[l + 1]);
    std::vector<double> z(out, 0.0);
    for (std::size_t i = 0; i < out; ++i)
      for (std::size_t j = 0; j < in; ++j) z[i] += p.flat[off + i * in + j] * h[j];
    off += in * out;
    for (std::size_t i = 0; i < out; ++i) z[i] += p.flat[off + i];
    off += out;
    if (l + 2 < layers.size()) {
      for (double& v : z)
        v = p.arch.activation == Activation::Relu ? (v > 0.0 ? v : 0.0) : std::tanh(v);
    }
    h = std::move(z);
  }
  return {h[0], h[1], h[2]};
}

NetEval tape_eval(const NetworkParams& p, const Vec3& x) {
  ad::Tape tape;
  const NetNodes nodes = insert_network_leaves(tape, p);
  const TapeNet net = record_network(tape, nodes, p.arch, tape.constant(Tensor::from(x)));
  return {tape.value_tensor(net.y).as_vec3(), tape.value_tensor(net.jac).as_mat3()};
}

}  // namespace

TEST_CASE("parameter layout") {
  const Architecture arch{{3, 40, 40, 40, 40, 40, 40, 3}, Activation::Relu};
  std::size_t expected = 0;
  for (std::size_t l = 0; l + 1 < arch.layers.size(); ++l)
    expected += static_cast<std::size_t>(arch.layers[l]) *
                    static_cast<std::size_t>(arch.layers[l + 1]) +
                static_cast<std::size_t>(arch.layers[l + 1]);
  CHECK(arch.param_count() == expected);
  CHECK(NetworkParams::glorot(arch, 1).flat.size() == expected);
  CHECK(Architecture{}.param_count() == 0);
}

TEST_CASE("zero network and bias passthrough") {
  const Architecture arch = small_arch();
  NetworkParams p = NetworkParams::zeros(arch);
  const NetEval all_zero = forward_plain(p, {0.4, 0.9, 0.1});
  CHECK(norm(all_zero.y) == 0.0);

  auto bias_out = p.bias(2);
  bias_out[0] = 1.0;
  bias_out[1] = 2.0;
  bias_out[2] = 3.0;
  const NetEval biased = forward_plain(p, {0.7, 0.2, 0.5});
  CHECK(biased.y[0] == 1.0);
  CHECK(biased.y[1] == 2.0);
  CHECK(biased.y[2] == 3.0);
  CHECK(max_abs(biased.jac) == 0.0);  // zero hidden weights => constant output
}

TEST_CASE("forward pass matches the independent recursion oracle") {
  for (Activation act : {Activation::Relu, Activation::Tanh}) {
    const Architecture arch{{3, 40, 40, 40, 40, 40, 40, 3}, act};
    const NetworkParams p = NetworkParams::glorot(arch, 97);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
      const Vec3 x = random_vec3(rng, 0.0, 1.0);
      const Vec3 expected = forward_oracle(p, x);
      const NetEval plain = forward_plain(p, x);
      const NetEval tape = tape_eval(p, x);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(plain.y[i] - expected[i]) < 1e-14);
        CHECK(std::abs(tape.y[i] - expected[i]) < 1e-14);
      }
      CHECK(max_abs(plain.jac - tape.jac) < 1e-14);
    }
  }
}

TEST_CASE("single affine layer has jacobian W") {
  const Architecture arch{{3, 3}, Activation::Relu};
  NetworkParams p = NetworkParams::glorot(arch, 3);
  const NetEval e = forward_plain(p, {0.3, 0.6, 0.9});
  const auto w = p.weight(0);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      CHECK(e.jac(i, k) == w[static_cast<std::size_t>(3 * i + k)]);
}

TEST_CASE("spatial jacobian matches central finite differences") {
  for (Activation act : {Activation::Tanh, Activation::Relu}) {
    const Architecture arch{{3, 16, 16, 3}, act};
    const NetworkParams p = NetworkParams::glorot(arch, 11);
    std::mt19937_64 rng(13);
    const double h = 1e-6;
    int checked = 0;
    for (int k = 0; k < 40 && checked < 20; ++k) {
      const Vec3 x = random_vec3(rng, 0.05, 0.95);
      const NetEval e = forward_plain(p, x);
      Mat3 fd;
      for (int c = 0; c < 3; ++c) {
        Vec3 xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const NetEval ep = forward_plain(p, xp);
        const NetEval em = forward_plain(p, xm);
        for (int i = 0; i < 3; ++i) fd(i, c) = (ep.y[i] - em.y[i]) / (2.0 * h);
      }
      // relu nets: skip points where the finite difference straddles a kink
      if (act == Activation::Relu && max_abs(e.jac - fd) > 1e-3) continue;
      ++checked;
      const double scale = std::max(max_abs(fd), 1.0);
      CHECK(max_abs(e.jac - fd) / scale < 1e-6);
    }
    CHECK(checked >= 10);
  }
}

TEST_CASE("ansatz: prescribed boundary values win over the network") {
  const BCSpec bc = make_uniaxial_hyper_bc(0.5);
  std::mt19937_64 rng(17);
  const Vec3 arbitrary_y = random_vec3(rng);
  const Mat3 arbitrary_jac = random_mat3(rng);

  const AnsatzEval at_end = apply_ansatz({1.0, 0.3, 0.7}, arbitrary_y, arbitrary_jac, bc);
  CHECK(at_end.u[0] == doctest::Approx(0.5).epsilon(1e-15));

  const AnsatzEval at_start = apply_ansatz({0.0, 0.3, 0.7}, arbitrary_y, arbitrary_jac, bc);
  CHECK(at_start.u[0] == 0.0);

  // y == 0 reduces to the carrier field exactly
  const Vec3 x{0.3, 0.4, 0.8};
  const AnsatzEval plain = apply_ansatz(x, Vec3{}, Mat3{}, bc);
  CHECK(norm(plain.u - bc.a(x)) == 0.0);
  CHECK(max_abs(plain.grad_u - bc.grad_a(x)) == 0.0);
}

TEST_CASE("essential boundary conditions hold exactly for random networks") {
  const Architecture arch = small_arch();
  const NetworkParams p = NetworkParams::glorot(arch, 23);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::vector<BCSpec> specs = {make_uniaxial_hyper_bc(0.37), make_shear_bc(0.21),
                                     make_visco_strain_bc(0.03), make_visco_stress_bc(0.02)};
  int samples = 0;
  for (const BCSpec& bc : specs) {
    for (int k = 0; k < 250 / static_cast<int>(specs.size()) + 1; ++k) {
      for (const BCSpec::Essential& ess : bc.essentials) {
        Vec3 x{unit(rng), unit(rng), unit(rng)};
        x[ess.axis] = ess.side == 0 ? 0.0 : 1.0;
        CHECK(bc.b(x)[ess.component] == 0.0);
        const NetEval net = forward_plain(p, x);
        const AnsatzEval a = apply_ansatz(x, net.y, net.jac, bc);
        CHECK(std::abs(a.u[ess.component] - bc.a(x)[ess.component]) <= 1e-12);
        ++samples;
      }
    }
  }
  CHECK(samples >= 1000);
}

TEST_CASE("ansatz gradient matches finite differences of the displacement") {
  const Architecture arch{{3, 16, 16, 3}, Activation::Tanh};
  const NetworkParams p = NetworkParams::glorot(arch, 31);
  const BCSpec bc = make_uniaxial_hyper_bc(0.25);
  std::mt19937_64 rng(37);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = random_vec3(rng, 0.05, 0.95);
    const NetEval net = forward_plain(p, x);
    const AnsatzEval a = apply_ansatz(x, net.y, net.jac, bc);
    Mat3 fd;
    for (int c = 0; c < 3; ++c) {
      Vec3 xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const NetEval np = forward_plain(p, xp);
      const NetEval nm = forward_plain(p, xm);
      const Vec3 up = apply_ansatz(xp, np.y, np.jac, bc).u;
      const Vec3 um = apply_ansatz(xm, nm.y, nm.jac, bc).u;
      for (int i = 0; i < 3; ++i) fd(i, c) = (up[i] - um[i]) / (2.0 * h);
    }
    const double scale = std::max(max_abs(fd), 1.0);
    CHECK(max_abs(a.grad_u - fd) / scale < 1e-6);
  }
}

TEST_CASE("parameter gradients flow through u and grad u") {
  const Architecture arch{{3, 8, 8, 3}, Activation::Tanh};
  NetworkParams p = NetworkParams::glorot(arch, 41);
  const BCSpec bc = make_uniaxial_hyper_bc(0.3);
  const Vec3 x{0.35, 0.65, 0.45};
  std::mt19937_64 rng(43);
  const Vec3 v = random_vec3(rng);
  const Mat3 w = random_mat3(rng);

  // scalar of (u, grad u) recorded on the tape
  auto scalar_of = [&](std::span<const double> flat, std::vector<double>* grad) {
    ad::Tape tape;
    const NetNodes nodes = insert_network_leaves(tape, arch, flat);
    const TapeNet net = record_network(tape, nodes, arch, tape.constant(Tensor::from(x)));
    const AnsatzNodes a = apply_ansatz_node(
        tape, tape.constant(Tensor::from(bc.a(x))), tape.constant(Tensor::from(bc.b(x))),
        tape.constant(Tensor::from(bc.grad_a(x))), tape.constant(Tensor::from(bc.grad_b(x))),
        net.y, net.jac);
    const ad::NodeId s = tape.add(tape.dot(a.u, tape.constant(Tensor::from(v))),
                                  tape.dot(a.grad_u, tape.constant(Tensor::from(w))));
    const double value = tape.scalar_value(s);
    if (grad) *grad = tape.backward(s);
    return value;
  };

  std::vector<double> grad;
  scalar_of(p.flat, &grad);
  REQUIRE(grad.size() == p.flat.size());

  std::uniform_int_distribution<std::size_t> pick(0, p.flat.size() - 1);
  double gscale = 0.0;
  for (double g : grad) gscale = std::max(gscale, std::abs(g));
  for (int k = 0; k < 25; ++k) {
    const std::size_t i = pick(rng);
    const double h = 1e-6 * std::max(1.0, std::abs(p.flat[i]));
    const double saved = p.flat[i];
    p.flat[i] = saved + h;
    const double fp = scalar_of(p.flat, nullptr);
    p.flat[i] = saved - h;
    const double fm = scalar_of(p.flat, nullptr);
    p.flat[i] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    CHECK(std::abs(grad[i] - fd) / std::max(gscale, 1e-10) < 1e-5);
  }
}

TEST_CASE("degenerate empty network") {
  const Architecture arch;
  const NetworkParams p = NetworkParams::zeros(arch);
  const NetEval e = forward_plain(p, {0.2, 0.4, 0.6});
  CHECK(norm(e.y) == 0.0);
  CHECK(max_abs(e.jac) == 0.0);

  ad::Tape tape;
  const NetNodes nodes = insert_network_leaves(tape, p);
  const TapeNet net = record_network(tape, nodes, arch, tape.constant(Tensor::from(Vec3{})));
  CHECK(norm(tape.value_tensor(net.y).as_vec3()) == 0.0);
}

TEST_CASE("architecture validation") {
  CHECK_THROWS_AS((Architecture{{4, 8, 3}, Activation::Relu}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((Architecture{{3}, Activation::Relu}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Architecture{{3, 0, 3}, Activation::Relu}.validate()),
                  std::invalid_argument);
  CHECK_NOTHROW((Architecture{{3, 40, 3}, Activation::Relu}.validate()));
  CHECK_NOTHROW(Architecture{}.validate());
}

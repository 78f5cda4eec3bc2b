#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "dem/tape.hpp"
#include "dem/viscoelastic.hpp"
#include "test_util.hpp"

using namespace dem;
using namespace dem::test;

namespace {

using Tensor4 = std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>;

double kronecker(int i, int j) { return i == j ? 1.0 : 0.0; }

Tensor4 k_projector() {
  Tensor4 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t[i][j][k][l] = 0.5 * (kronecker(i, k) * kronecker(j, l) +
                                 kronecker(i, l) * kronecker(j, k) -
                                 2.0 / 3.0 * kronecker(i, j) * kronecker(k, l));
  return t;
}

Tensor4 j_projector() {
  Tensor4 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t[i][j][k][l] = kronecker(i, j) * kronecker(k, l) / 3.0;
  return t;
}

Tensor4 iso_tensor(double shear, double bulk) {
  const Tensor4 kk = k_projector(), jj = j_projector();
  Tensor4 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t[i][j][k][l] = 2.0 * shear * kk[i][j][k][l] + 3.0 * bulk * jj[i][j][k][l];
  return t;
}

Mat3 contract(const Tensor4& t, const Mat3& e) {
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += t[i][j][k][l] * e(k, l);
      out(i, j) = s;
    }
  return out;
}

double quad_form(const Mat3& a, const Tensor4& t, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += a(i, j) * t[i][j][k][l] * b(k, l);
  return s;
}

Tensor4 compose(const Tensor4& a, const Tensor4& b) {
  Tensor4 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double s = 0.0;
          for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) s += a[i][j][m][n] * b[m][n][k][l];
          t[i][j][k][l] = s;
        }
  return t;
}

const ViscoParams kDefaults{};  // mu0=1 kappa0=2 mu1=2 kappa1=4 wK=1 wJ=2

}  // namespace

TEST_CASE("projector identities by brute-force contraction") {
  const Tensor4 kk = k_projector(), jj = j_projector();
  const Tensor4 kkkk = compose(kk, kk), jjjj = compose(jj, jj), kj = compose(kk, jj);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          CHECK(std::abs(kkkk[i][j][k][l] - kk[i][j][k][l]) < 1e-14);
          CHECK(std::abs(jjjj[i][j][k][l] - jj[i][j][k][l]) < 1e-14);
          CHECK(std::abs(kj[i][j][k][l]) < 1e-14);
          // K + J is the symmetric fourth-order identity
          const double sym_id = 0.5 * (kronecker(i, k) * kronecker(j, l) +
                                       kronecker(i, l) * kronecker(j, k));
          CHECK(std::abs(kk[i][j][k][l] + jj[i][j][k][l] - sym_id) < 1e-14);
        }
}

TEST_CASE("iso4_apply examples and brute-force agreement") {
  CHECK(max_abs(iso4_apply(1.0, 1.0, Mat3::identity()) - 3.0 * Mat3::identity()) < 1e-14);

  std::mt19937_64 rng(11);
  Mat3 traceless = random_symmetric(rng);
  const double t3 = trace(traceless) / 3.0;
  for (int i = 0; i < 3; ++i) traceless(i, i) -= t3;
  CHECK(max_abs(iso4_apply(0.7, 2.3, traceless) - 1.4 * traceless) < 1e-13);

  for (int k = 0; k < 100; ++k) {
    const Mat3 e = random_symmetric(rng);
    const double a = 0.5 + k * 0.01, b = 1.5 - k * 0.005;
    CHECK(max_abs(iso4_apply(a, b, e) - contract(iso_tensor(a, b), e)) < 1e-14);
  }
}

TEST_CASE("free energy: examples and quadratic-form oracle") {
  const ViscoParams p = kDefaults;
  CHECK(free_energy(Mat3::zero(), Mat3::zero(), p) == 0.0);

  std::mt19937_64 rng(21);
  const Mat3 e = random_symmetric(rng);
  const double dead_branch = p.mu0 * ddot(e, e) +
                             (3.0 * p.kappa0 - 2.0 * p.mu0) / 6.0 * trace(e) * trace(e);
  CHECK(std::abs(free_energy(e, e, p) - dead_branch) < 1e-13);

  const Tensor4 l0 = iso_tensor(p.mu0, p.kappa0), l1 = iso_tensor(p.mu1, p.kappa1);
  for (int k = 0; k < 100; ++k) {
    const Mat3 eps = random_symmetric(rng);
    const Mat3 eps_v = random_symmetric(rng);
    const Mat3 ee = eps - eps_v;
    const double oracle = 0.5 * quad_form(eps, l0, eps) + 0.5 * quad_form(ee, l1, ee);
    CHECK(std::abs(free_energy(eps, eps_v, p) - oracle) < 1e-13);
    CHECK(free_energy(eps, eps_v, p) >= -1e-15);
  }
}

TEST_CASE("dissipation: examples, oracle and nonnegativity") {
  const ViscoParams p = kDefaults;
  CHECK(dissipation(Mat3::zero(), p) == 0.0);

  // rate = c I with wJ = 2, c = 1: eta = (3/2) wJ tr(rate)^2 / 3 = 9
  CHECK(dissipation(Mat3::identity(), p) == doctest::Approx(9.0).epsilon(1e-14));

  std::mt19937_64 rng(33);
  const Tensor4 m = iso_tensor(p.omega_k, p.omega_j);
  for (int k = 0; k < 1000; ++k) {
    const Mat3 rate = random_symmetric(rng);
    const double eta = dissipation(rate, p);
    CHECK(std::abs(eta - 0.5 * quad_form(rate, m, rate)) < 1e-13);
    CHECK(eta >= 0.0);
  }
}

TEST_CASE("cauchy stress: instantaneous and equilibrium moduli") {
  const ViscoParams p = kDefaults;
  Mat3 eps;
  eps(0, 0) = 0.03;
  CHECK(cauchy_stress(eps, Mat3::zero(), p)(0, 0) ==
        doctest::Approx(0.30).epsilon(1e-12));                        // L0 + L1
  CHECK(cauchy_stress(eps, eps, p)(0, 0) == doctest::Approx(0.10).epsilon(1e-12));  // L0 only

  std::mt19937_64 rng(44);
  const Tensor4 l0 = iso_tensor(p.mu0, p.kappa0), l1 = iso_tensor(p.mu1, p.kappa1);
  for (int k = 0; k < 100; ++k) {
    const Mat3 e = random_symmetric(rng), ev = random_symmetric(rng);
    const Mat3 oracle = contract(l0, e) + contract(l1, e - ev);
    CHECK(max_abs(cauchy_stress(e, ev, p) - oracle) < 1e-13);
  }
}

TEST_CASE("sigma = d psi / d eps by finite differences") {
  const ViscoParams p = kDefaults;
  std::mt19937_64 rng(55);
  for (int t = 0; t < 100; ++t) {
    const Mat3 e = random_symmetric(rng), ev = random_symmetric(rng);
    const Mat3 s = cauchy_stress(e, ev, p);
    const double h = 1e-4;  // psi is quadratic: central differences are exact in h
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        // symmetric perturbation: off-diagonal entries move in pairs
        Mat3 ep = e, em = e;
        ep(i, j) += h;
        ep(j, i) = ep(i, j);
        em(i, j) -= h;
        em(j, i) = em(i, j);
        const double fd = (free_energy(ep, ev, p) - free_energy(em, ev, p)) / (2.0 * h);
        const double expected = i == j ? s(i, i) : 2.0 * s(i, j);
        CHECK(rel_err(expected, fd) < 1e-7);
      }
  }
}

TEST_CASE("evolution rate: fixed point, deviatoric case, residual of the stationarity") {
  const ViscoParams p = kDefaults;
  std::mt19937_64 rng(66);
  const Mat3 e = random_symmetric(rng);
  CHECK(max_abs(evolution_rate(e, e, p)) < 1e-15);

  Mat3 d = random_symmetric(rng);
  const double t3 = trace(d) / 3.0;
  for (int i = 0; i < 3; ++i) d(i, i) -= t3;  // traceless difference
  CHECK(max_abs(evolution_rate(d, Mat3::zero(), p) - (p.mu1 / p.omega_k) * d) < 1e-14);

  const Tensor4 l1 = iso_tensor(p.mu1, p.kappa1), m = iso_tensor(p.omega_k, p.omega_j);
  for (int k = 0; k < 100; ++k) {
    const Mat3 eps = random_symmetric(rng), ev = random_symmetric(rng);
    const Mat3 g = evolution_rate(eps, ev, p);
    // -L1 (eps - eps_v) + M G = 0
    const Mat3 residual = contract(m, g) - contract(l1, eps - ev);
    CHECK(max_abs(residual) < 1e-12);
  }
}

TEST_CASE("stationarity: d psi / d eps_v + d eta / d rate = 0 at rate = G") {
  const ViscoParams p = kDefaults;
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const Mat3 e = random_symmetric(rng), ev = random_symmetric(rng);
    const Mat3 g = evolution_rate(e, ev, p);
    const double h = 1e-4;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Mat3 evp = ev, evm = ev;
        evp(i, j) += h;
        evp(j, i) = evp(i, j);
        evm(i, j) -= h;
        evm(j, i) = evm(i, j);
        const double dpsi = (free_energy(e, evp, p) - free_energy(e, evm, p)) / (2.0 * h);
        Mat3 gp = g, gm = g;
        gp(i, j) += h;
        gp(j, i) = gp(i, j);
        gm(i, j) -= h;
        gm(j, i) = gm(i, j);
        const double deta = (dissipation(gp, p) - dissipation(gm, p)) / (2.0 * h);
        CHECK(std::abs(dpsi + deta) < 1e-6);
      }
  }
}

TEST_CASE("tape versions agree with the plain functions") {
  const ViscoParams p = kDefaults;
  std::mt19937_64 rng(88);
  for (int k = 0; k < 25; ++k) {
    const Mat3 e = random_symmetric(rng), ev = random_symmetric(rng);
    ad::Tape tape;
    const ad::NodeId en = tape.leaf(Tensor::from(e));
    const ad::NodeId evn = tape.constant(Tensor::from(ev));
    CHECK(std::abs(tape.scalar_value(free_energy_node(tape, en, evn, p)) -
                   free_energy(e, ev, p)) < 1e-13);
    CHECK(std::abs(tape.scalar_value(dissipation_node(tape, en, p)) - dissipation(e, p)) <
          1e-13);
    CHECK(max_abs(tape.value_tensor(evolution_rate_node(tape, en, evn, p)).as_mat3() -
                  evolution_rate(e, ev, p)) < 1e-14);
  }
}

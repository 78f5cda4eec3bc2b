#include "dem/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "dem/rk5.hpp"

namespace dem {

namespace {

Mat3 uniaxial_f(double l1, double l2) {
  Mat3 f;
  f(0, 0) = l1;
  f(1, 1) = l2;
  f(2, 2) = l2;
  return f;
}

}  // namespace

OracleResult uniaxial_oracle(double lambda1, const HyperParams& p) {
  if (lambda1 <= 0.0) throw std::invalid_argument("uniaxial_oracle: lambda1 must be > 0");
  auto p22 = [&](double l2) { return first_pk_stress(uniaxial_f(lambda1, l2), p)(1, 1); };

  double lo = 0.3, hi = 1.5;
  double flo = p22(lo), fhi = p22(hi);
  if (flo * fhi > 0.0) {
    lo = 0.1;
    hi = 3.0;
    flo = p22(lo);
    fhi = p22(hi);
    if (flo * fhi > 0.0)
      throw std::runtime_error("uniaxial_oracle: no sign change for lateral stretch");
  }

  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = p22(mid);
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }

  double l2 = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double f = p22(l2);
  for (int it = 0; it < 8 && std::abs(f) > 1e-13; ++it) {  // secant polish
    const double h = 1e-9;
    const double df = (p22(l2 + h) - p22(l2 - h)) / (2.0 * h);
    if (df == 0.0) break;
    l2 -= f / df;
    f = p22(l2);
  }

  const Mat3 fdef = uniaxial_f(lambda1, l2);
  OracleResult r;
  r.applied = lambda1;
  r.lateral = l2;
  r.stress = first_pk_stress(fdef, p)(0, 0);
  r.energy = strain_energy(fdef, p);
  return r;
}

OracleResult shear_oracle(double gamma, const HyperParams& p) {
  Mat3 f = Mat3::identity();
  f(0, 1) = gamma;
  OracleResult r;
  r.applied = gamma;
  r.stress = first_pk_stress(f, p)(0, 1);
  r.energy = strain_energy(f, p);
  return r;
}

double StrainSchedule::at(double t) const {
  if (times.empty()) return 0.0;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (t <= times[i]) {
      const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
      return values[i - 1] + w * (values[i] - values[i - 1]);
    }
  }
  return values.back();
}

namespace {

// Lateral strain making sigma22 = sigma33 = 0 for eps = diag(e, s, s), given
// the current viscous strain. The condition is linear in s.
double solve_lateral(double e, const Mat3& eps_v, const ViscoParams& p) {
  auto s22 = [&](double s) {
    Mat3 eps;
    eps(0, 0) = e;
    eps(1, 1) = s;
    eps(2, 2) = s;
    return cauchy_stress(eps, eps_v, p)(1, 1);
  };
  const double a = s22(0.0);
  const double slope = s22(1.0) - a;
  return -a / slope;
}

Mat3 total_strain(double e, const Mat3& eps_v, const ViscoParams& p, ViscoBcMode mode) {
  Mat3 eps;
  eps(0, 0) = e;
  if (mode == ViscoBcMode::UniaxialStress) {
    const double s = solve_lateral(e, eps_v, p);
    eps(1, 1) = s;
    eps(2, 2) = s;
  }
  return eps;
}

}  // namespace

std::vector<SlsSample> sls_oracle(const StrainSchedule& schedule, const ViscoParams& p,
                                  double fine_dt, std::span<const double> sample_times,
                                  ViscoBcMode mode) {
  if (fine_dt <= 0.0) throw std::invalid_argument("sls_oracle: fine_dt must be > 0");
  std::vector<SlsSample> out;
  out.reserve(sample_times.size());

  Mat3 eps_v;
  double t = 0.0;
  for (double ts : sample_times) {
    if (ts < t - 1e-12) throw std::invalid_argument("sls_oracle: sample times must increase");
    if (ts > t) {
      const int m = static_cast<int>(std::ceil((ts - t) / fine_dt - 1e-12));
      const double dt = (ts - t) / m;
      for (int i = 0; i < m; ++i) {
        const double t_end = t + dt;
        const Mat3 eps = total_strain(schedule.at(t_end), eps_v, p, mode);
        eps_v = rk5_step(eps_v, eps, dt, p);
        t = t_end;
      }
      t = ts;
    }
    SlsSample s;
    s.time = ts;
    s.strain = schedule.at(ts);
    const Mat3 eps = total_strain(s.strain, eps_v, p, mode);
    s.stress = cauchy_stress(eps, eps_v, p)(0, 0);
    s.eps_v = eps_v;
    out.push_back(s);
  }
  return out;
}

}  // namespace dem

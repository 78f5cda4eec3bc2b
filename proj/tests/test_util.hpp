#pragma once

#include <cmath>
#include <random>

#include "dem/tensor.hpp"

namespace dem::test {

inline double rel_err(double value, double reference) {
  const double d = std::abs(value - reference);
  return std::abs(reference) > 1e-14 ? d / std::abs(reference) : d;
}

inline Vec3 random_vec3(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return {dist(rng), dist(rng), dist(rng)};
}

inline Mat3 random_mat3(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Mat3 m;
  for (int i = 0; i < 9; ++i) m.m[static_cast<std::size_t>(i)] = dist(rng);
  return m;
}

inline Mat3 random_symmetric(std::mt19937_64& rng, double scale = 1.0) {
  Mat3 m = random_mat3(rng, -scale, scale);
  return sym(m);
}

/// Well-conditioned random deformation gradient near the identity.
inline Mat3 random_admissible_f(std::mt19937_64& rng, double spread = 0.3) {
  Mat3 f = Mat3::identity() + random_mat3(rng, -spread, spread);
  if (det(f) <= 0.05) return random_admissible_f(rng, spread * 0.5);
  return f;
}

/// Rotation from a normalized random quaternion.
inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  double q0 = dist(rng), q1 = dist(rng), q2 = dist(rng), q3 = dist(rng);
  const double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  q0 /= n;
  q1 /= n;
  q2 /= n;
  q3 /= n;
  Mat3 r;
  r(0, 0) = 1 - 2 * (q2 * q2 + q3 * q3);
  r(0, 1) = 2 * (q1 * q2 - q0 * q3);
  r(0, 2) = 2 * (q1 * q3 + q0 * q2);
  r(1, 0) = 2 * (q1 * q2 + q0 * q3);
  r(1, 1) = 1 - 2 * (q1 * q1 + q3 * q3);
  r(1, 2) = 2 * (q2 * q3 - q0 * q1);
  r(2, 0) = 2 * (q1 * q3 - q0 * q2);
  r(2, 1) = 2 * (q2 * q3 + q0 * q1);
  r(2, 2) = 1 - 2 * (q1 * q1 + q2 * q2);
  return r;
}

/// Independent determinant oracle: full 6-term Leibniz expansion.
inline double det_leibniz(const Mat3& a) {
  return a(0, 0) * a(1, 1) * a(2, 2) + a(0, 1) * a(1, 2) * a(2, 0) +
         a(0, 2) * a(1, 0) * a(2, 1) - a(0, 2) * a(1, 1) * a(2, 0) -
         a(0, 1) * a(1, 0) * a(2, 2) - a(0, 0) * a(1, 2) * a(2, 1);
}

}  // namespace dem::test

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dem {

struct Vec3 {
  std::array<double, 3> v{};

  Vec3() = default;
  Vec3(double x, double y, double z) : v{x, y, z} {}

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  Vec3& operator+=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Dense 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
  double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }

  static Mat3 identity() {
    Mat3 I;
    I(0, 0) = I(1, 1) = I(2, 2) = 1.0;
    return I;
  }
  static Mat3 zero() { return {}; }

  Mat3& operator+=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }
};

inline Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
  return r;
}
inline Mat3 operator*(double s, const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.m[i] = s * a.m[i];
  return r;
}
inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < 3; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}
inline Vec3 operator*(const Mat3& a, const Vec3& x) {
  Vec3 y;
  for (int i = 0; i < 3; ++i)
    y[i] = a(i, 0) * x[0] + a(i, 1) * x[1] + a(i, 2) * x[2];
  return y;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

inline double trace(const Mat3& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

inline double det(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Cofactor matrix: cof(A)_ij = d det(A) / d A_ij.
inline Mat3 cofactor(const Mat3& a) {
  Mat3 c;
  c(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  c(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  c(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  c(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  c(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  c(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  c(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  c(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  c(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return c;
}

/// Inverse via adjugate/determinant. Throws on singular input.
inline Mat3 inverse(const Mat3& a) {
  const double d = det(a);
  if (d == 0.0) throw std::runtime_error("inverse: singular 3x3 matrix");
  return (1.0 / d) * transpose(cofactor(a));
}

inline Mat3 sym(const Mat3& a) { return 0.5 * (a + transpose(a)); }

inline Mat3 dev(const Mat3& a) {
  Mat3 r = a;
  const double t = trace(a) / 3.0;
  r(0, 0) -= t;
  r(1, 1) -= t;
  r(2, 2) -= t;
  return r;
}

/// Frobenius inner product.
inline double ddot(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += a.m[i] * b.m[i];
  return s;
}

inline double frobenius_norm(const Mat3& a) { return std::sqrt(ddot(a, a)); }

inline double max_abs(const Mat3& a) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s = std::max(s, std::abs(a.m[i]));
  return s;
}

/// Shaped dense payload used at the autodiff API boundary. A scalar is 1x1,
/// a length-n vector is nx1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  static Tensor scalar(double x) {
    Tensor t(1, 1);
    t.data[0] = x;
    return t;
  }
  static Tensor vector(const std::vector<double>& v) {
    Tensor t(static_cast<int>(v.size()), 1);
    t.data = v;
    return t;
  }
  static Tensor from(const Vec3& v) {
    Tensor t(3, 1);
    for (int i = 0; i < 3; ++i) t.data[i] = v[i];
    return t;
  }
  static Tensor from(const Mat3& m) {
    Tensor t(3, 3);
    for (int i = 0; i < 9; ++i) t.data[i] = m.m[i];
    return t;
  }

  int size() const { return rows * cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }

  Mat3 as_mat3() const {
    if (rows != 3 || cols != 3) throw std::runtime_error("Tensor: not 3x3");
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.m[i] = data[i];
    return m;
  }
  Vec3 as_vec3() const {
    if (size() != 3) throw std::runtime_error("Tensor: not length 3");
    return {data[0], data[1], data[2]};
  }
};

}  // namespace dem

#include "dem/quadrature.hpp"

#include <stdexcept>

namespace dem {

namespace {

// 1-D composite trapezoid weight for lattice index i of n points: h except
// h/2 at the two ends.
double axis_weight(int i, int n, double h) {
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

FaceGrid build_face(int axis, int side, int n, double h) {
  FaceGrid f;
  f.axis = axis;
  f.side = side;
  f.points.reserve(static_cast<std::size_t>(n) * n);
  f.weights.reserve(static_cast<std::size_t>(n) * n);
  const int u = (axis + 1) % 3;
  const int v = (axis + 2) % 3;
  const double fixed = side == 0 ? 0.0 : 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec3 p;
      p[axis] = fixed;
      p[u] = i * h;
      p[v] = j * h;
      f.points.push_back(p);
      f.weights.push_back(axis_weight(i, n, h) * axis_weight(j, n, h));
    }
  return f;
}

}  // namespace

QuadratureGrid build_grid(int n) {
  if (n < 2) throw std::invalid_argument("grid must have n >= 2");
  QuadratureGrid g;
  g.n = n;
  g.h = 1.0 / (n - 1);
  g.points.reserve(static_cast<std::size_t>(n) * n * n);
  g.weights.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        g.points.emplace_back(i * g.h, j * g.h, k * g.h);
        g.weights.push_back(axis_weight(i, n, g.h) * axis_weight(j, n, g.h) *
                            axis_weight(k, n, g.h));
      }
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side)
      g.faces[static_cast<std::size_t>(2 * axis + side)] = build_face(axis, side, n, g.h);
  return g;
}

double integrate(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size())
    throw std::invalid_argument("integrate: " + std::to_string(values.size()) +
                                " values for " + std::to_string(weights.size()) + " weights");
  // Kahan summation keeps the multilinear-exactness contract on large grids.
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = weights[i] * values[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace dem

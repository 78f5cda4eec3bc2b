#pragma once

#include <array>
#include <span>
#include <vector>

#include "dem/tensor.hpp"

namespace dem {

/// One face of the unit cube: axis in {0,1,2}, side in {0,1} where side 0 is
/// the plane X_axis = 0 and side 1 is X_axis = 1.
struct FaceGrid {
  int axis = 0;
  int side = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;  // 2-D composite trapezoid, sums to 1
};

/// Evenly spaced boundary-inclusive lattice on [0,1]^3 with tensor-product
/// composite trapezoid weights, plus the six face lattices. Point ordering is
/// lexicographic in (i,j,k) with k fastest.
struct QuadratureGrid {
  int n = 0;
  double h = 0.0;
  std::vector<Vec3> points;
  std::vector<double> weights;  // sums to 1 (unit cube)
  std::array<FaceGrid, 6> faces;

  const FaceGrid& face(int axis, int side) const {
    return faces[static_cast<std::size_t>(2 * axis + side)];
  }
};

/// Builds the n^3 lattice with spacing h = 1/(n-1). Throws
/// std::invalid_argument("grid must have n >= 2") for n < 2.
QuadratureGrid build_grid(int n);

/// Composite trapezoid sum: one value per grid point, weighted. Throws on
/// length mismatch. Exact for multilinear integrands.
double integrate(std::span<const double> values, std::span<const double> weights);

}  // namespace dem

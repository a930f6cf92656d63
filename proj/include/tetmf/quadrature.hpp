#pragma once

#include <vector>

#include "tetmf/types.hpp"

namespace tetmf {

enum class QuadratureVariant { Standard, Modified };

/// Points live on the reference tetrahedron (0,0,0),(1,0,0),(0,1,0),(0,0,1)
/// or on the reference triangle (0,0),(1,0),(0,1). For triangle rules the
/// third coordinate of every point is zero.
struct QuadratureRule {
  int dim = 3;
  std::vector<Vec3> points;
  std::vector<double> weights;
  /// Guaranteed polynomial exactness. The underlying table may be exact to a
  /// higher degree.
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Fully symmetric positive-weight rule on the reference tetrahedron that is
/// exact for polynomials of total degree <= degree (0 <= degree <= 7).
QuadratureRule tet_rule(int degree);

/// Fully symmetric positive-weight rule on the reference triangle,
/// 0 <= degree <= 6.
QuadratureRule triangle_rule(int degree);

/// Cell rule for polynomial degree p in 1..3. Standard rules are exact to
/// 2p, modified rules to 2p-2 (degree 1 for p = 1).
QuadratureRule make_cell_quadrature(int p, QuadratureVariant variant);

/// Face rule exact to 2p.
QuadratureRule make_face_quadrature(int p);

}  // namespace tetmf

#pragma once

#include <vector>

#include "tetmf/mesh.hpp"
#include "tetmf/quadrature.hpp"

namespace tetmf {

enum class GeometryMode { Affine, PerQuadraturePoint };

/// Per-point data of one family of faces (interior or boundary).
struct FaceGeometry {
  std::size_t n_faces = 0;
  /// Unit normal pointing out of the minus cell, n_faces * n_qf.
  std::vector<Vec3> normals;
  /// Surface quadrature weight times area element, n_faces * n_qf.
  std::vector<double> jxw;
  /// PerQuadraturePoint mode only: inverse transpose Jacobians of the two
  /// adjacent cells at the face points, n_faces * n_qf.
  std::vector<Mat3> jac_inv_t_minus;
  std::vector<Mat3> jac_inv_t_plus;
  std::vector<double> area;
};

/// Geometry factors of the operator's quadrature-point action.
struct GeometryData {
  GeometryMode mode = GeometryMode::Affine;
  std::size_t n_cells = 0;
  int n_q = 0;
  int n_qf = 0;
  std::vector<double> weights;
  /// Affine: one entry per cell. PerQuadraturePoint: n_cells * n_q.
  std::vector<Mat3> jac_inv_t;
  /// Affine only: det J per cell, combined with the reference weights.
  std::vector<double> det_j;
  /// PerQuadraturePoint only: n_cells * n_q.
  std::vector<double> jxw_points;
  std::vector<double> cell_volume;
  FaceGeometry interior;
  FaceGeometry boundary;

  double jxw(std::size_t cell, int q) const {
    return mode == GeometryMode::Affine ? weights[q] * det_j[cell] : jxw_points[cell * n_q + q];
  }
  const Mat3& jac_inv_t_at(std::size_t cell, int q) const {
    return mode == GeometryMode::Affine ? jac_inv_t[cell] : jac_inv_t[cell * n_q + q];
  }
  bool has_faces() const { return n_qf > 0; }
};

/// face_rule may be null when only cell terms are needed. Affine mode
/// requires a straight-sided mesh. Throws Error naming the first cell with
/// det J <= 0.
GeometryData build_geometry(const TetMesh& mesh, const QuadratureRule& cell_rule, const QuadratureRule* face_rule,
                            GeometryMode mode);

/// Affine for straight-sided meshes, PerQuadraturePoint otherwise.
inline GeometryMode natural_geometry_mode(const TetMesh& mesh) {
  return mesh.is_curved() ? GeometryMode::PerQuadraturePoint : GeometryMode::Affine;
}

}  // namespace tetmf

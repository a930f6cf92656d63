#include "tetmf/geometry.hpp"

#include <string>

namespace tetmf {

namespace {

Mat3 checked_inverse_transpose(const Mat3& j, std::size_t cell, double& d) {
  d = det(j);
  if (!(d > 0)) throw Error("cell " + std::to_string(cell) + " has det(J) = " + std::to_string(d) + " <= 0");
  return inverse_transpose(j);
}

struct FaceSide {
  index_t cell;
  int face;
};

// Fills normals, jxw and (curved) per-point inverse Jacobians for one face.
void face_points(const TetMesh& mesh, const GeometryData& g, const QuadratureRule& rule, FaceSide minus,
                 const FaceSide* plus, FaceOrientation o, FaceGeometry& out) {
  const Vec3& n_ref = ref::face_normals()[minus.face];
  const double scale = ref::face_area_scale(minus.face);
  double area = 0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3& st = rule.points[q];
    Mat3 jit;
    double d;
    if (g.mode == GeometryMode::Affine) {
      jit = g.jac_inv_t[minus.cell];
      d = g.det_j[minus.cell];
    } else {
      jit = checked_inverse_transpose(mesh.jacobian(minus.cell, ref::face_to_cell(minus.face, st[0], st[1])),
                                      minus.cell, d);
      out.jac_inv_t_minus.push_back(jit);
      if (plus) {
        const auto pl = plus_side_point(o, st[0], st[1]);
        double dp;
        out.jac_inv_t_plus.push_back(checked_inverse_transpose(
            mesh.jacobian(plus->cell, ref::face_to_cell(plus->face, pl[0], pl[1])), plus->cell, dp));
      }
    }
    const Vec3 nn = matvec(jit, n_ref);
    const double len = norm(nn);
    out.normals.push_back((1.0 / len) * nn);
    const double jxw = rule.weights[q] * scale * d * len;
    out.jxw.push_back(jxw);
    area += jxw;
  }
  out.area.push_back(area);
}

}  // namespace

GeometryData build_geometry(const TetMesh& mesh, const QuadratureRule& cell_rule, const QuadratureRule* face_rule,
                            GeometryMode mode) {
  if (mode == GeometryMode::Affine && mesh.is_curved())
    throw Error("affine geometry requires a straight-sided mesh");
  GeometryData g;
  g.mode = mode;
  g.n_cells = mesh.n_cells();
  g.n_q = static_cast<int>(cell_rule.size());
  g.n_qf = face_rule ? static_cast<int>(face_rule->size()) : 0;
  g.weights = cell_rule.weights;
  g.cell_volume.resize(g.n_cells);

  if (mode == GeometryMode::Affine) {
    g.jac_inv_t.resize(g.n_cells);
    g.det_j.resize(g.n_cells);
    double wsum = 0;
    for (double w : cell_rule.weights) wsum += w;
    for (std::size_t c = 0; c < g.n_cells; ++c) {
      g.jac_inv_t[c] = checked_inverse_transpose(mesh.vertex_jacobian(c), c, g.det_j[c]);
      g.cell_volume[c] = wsum * g.det_j[c];
    }
  } else {
    g.jac_inv_t.resize(g.n_cells * g.n_q);
    g.jxw_points.resize(g.n_cells * g.n_q);
    for (std::size_t c = 0; c < g.n_cells; ++c) {
      double vol = 0;
      for (int q = 0; q < g.n_q; ++q) {
        double d;
        g.jac_inv_t[c * g.n_q + q] = checked_inverse_transpose(mesh.jacobian(c, cell_rule.points[q]), c, d);
        g.jxw_points[c * g.n_q + q] = cell_rule.weights[q] * d;
        vol += g.jxw_points[c * g.n_q + q];
      }
      g.cell_volume[c] = vol;
    }
  }

  if (!face_rule) return g;
  g.interior.n_faces = mesh.interior_faces.size();
  for (const auto& f : mesh.interior_faces) {
    const FaceSide plus{f.cell_plus, f.face_plus};
    face_points(mesh, g, *face_rule, {f.cell_minus, f.face_minus}, &plus, f.orientation, g.interior);
  }
  g.boundary.n_faces = mesh.boundary_faces.size();
  for (const auto& f : mesh.boundary_faces)
    face_points(mesh, g, *face_rule, {f.cell, f.face}, nullptr, FaceOrientation(), g.boundary);
  return g;
}

}  // namespace tetmf

#include "tetmf/discretization.hpp"

#include <algorithm>

namespace tetmf {

Discretization make_discretization(const TetMesh& mesh, int p, Space space, int n_components,
                                   std::span<const int> dirichlet_boundary_ids, QuadratureVariant variant,
                                   std::optional<GeometryMode> mode) {
  Discretization d;
  d.mesh = &mesh;
  d.dofs = build_dof_map(mesh, p, space, n_components, dirichlet_boundary_ids);
  d.variant = variant;
  d.cell_rule = make_cell_quadrature(p, variant);
  if (space == Space::DG) d.face_rule = make_face_quadrature(p);
  d.basis = tabulate_basis(p, d.cell_rule, d.face_rule);
  d.geometry = build_geometry(mesh, d.cell_rule, space == Space::DG ? &d.face_rule : nullptr,
                              mode.value_or(natural_geometry_mode(mesh)));
  return d;
}

std::vector<int> boundary_ids(const TetMesh& mesh) {
  std::vector<int> ids;
  for (const auto& f : mesh.boundary_faces) ids.push_back(f.boundary_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace tetmf

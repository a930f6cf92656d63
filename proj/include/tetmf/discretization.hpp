#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tetmf/basis.hpp"
#include "tetmf/dof.hpp"
#include "tetmf/geometry.hpp"
#include "tetmf/mesh.hpp"
#include "tetmf/quadrature.hpp"

namespace tetmf {

/// Everything an operator needs about one finite element space on one mesh.
/// The mesh is referenced, not copied, and must outlive the bundle.
struct Discretization {
  const TetMesh* mesh = nullptr;
  DoFMap dofs;
  QuadratureVariant variant = QuadratureVariant::Standard;
  QuadratureRule cell_rule;
  /// Empty for CG spaces.
  QuadratureRule face_rule;
  BasisTable basis;
  GeometryData geometry;

  int degree() const { return dofs.degree; }
  Space space() const { return dofs.space; }
  int n_components() const { return dofs.n_components; }
  std::size_t n_dofs() const { return dofs.n_global_dofs; }
};

/// mode defaults to natural_geometry_mode(mesh). Face data is built for DG
/// spaces only; DG face terms always use the standard 2p face rule.
Discretization make_discretization(const TetMesh& mesh, int p, Space space, int n_components,
                                   std::span<const int> dirichlet_boundary_ids,
                                   QuadratureVariant variant = QuadratureVariant::Standard,
                                   std::optional<GeometryMode> mode = std::nullopt);

/// Sorted list of the boundary ids present in the mesh.
std::vector<int> boundary_ids(const TetMesh& mesh);

}  // namespace tetmf

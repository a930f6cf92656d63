#include "tetmf/forms.hpp"

#include <algorithm>

namespace tetmf {

void HelmholtzCoefficients::validate() const {
  if (mass_scale < 0 || nu < 0) throw Error("Helmholtz coefficients must be non-negative");
  if (mass_scale == 0 && nu == 0) throw Error("Helmholtz coefficients must not both be zero");
}

PenaltyData compute_penalty(const Discretization& disc, const SipgConfig& sipg) {
  if (!(sipg.penalty_constant > 0)) throw Error("penalty constant must be positive");
  const TetMesh& mesh = *disc.mesh;
  const GeometryData& g = disc.geometry;
  const int p = disc.degree();
  const double factor = sipg.penalty_constant * (p + 1) * (p + 3) / 3.0;
  PenaltyData out;
  out.interior.resize(mesh.interior_faces.size());
  for (std::size_t i = 0; i < mesh.interior_faces.size(); ++i) {
    const auto& f = mesh.interior_faces[i];
    const double a = g.interior.area[i];
    out.interior[i] = factor * std::max(a / g.cell_volume[f.cell_minus], a / g.cell_volume[f.cell_plus]);
  }
  out.boundary.resize(mesh.boundary_faces.size());
  for (std::size_t i = 0; i < mesh.boundary_faces.size(); ++i)
    out.boundary[i] = 2.0 * factor * g.boundary.area[i] / g.cell_volume[mesh.boundary_faces[i].cell];
  return out;
}

std::vector<char> dirichlet_boundary_faces(const Discretization& disc) {
  const auto& ids = disc.dofs.dirichlet_boundary_ids;
  std::vector<char> out;
  for (const auto& f : disc.mesh->boundary_faces)
    out.push_back(std::find(ids.begin(), ids.end(), f.boundary_id) != ids.end());
  return out;
}

}  // namespace tetmf

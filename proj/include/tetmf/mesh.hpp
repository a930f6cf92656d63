#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "tetmf/reference_cell.hpp"
#include "tetmf/types.hpp"

namespace tetmf {

struct InteriorFace {
  index_t cell_minus;
  std::uint8_t face_minus;
  index_t cell_plus;
  std::uint8_t face_plus;
  FaceOrientation orientation;
};

struct BoundaryFace {
  index_t cell;
  std::uint8_t face;
  int boundary_id;
};

/// Unstructured tetrahedral mesh. The minus cell of an interior face is the
/// one with the lower cell id; it owns the face parameterization.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<index_t, 4>> cells;
  std::vector<InteriorFace> interior_faces;
  std::vector<BoundaryFace> boundary_faces;

  /// Quadratic geometry nodes on the local edges (ref::edges order). Empty
  /// for straight-sided meshes.
  std::vector<std::array<Vec3, 6>> edge_nodes;

  /// Refinement genealogy, empty unless produced by refine_uniform: parent
  /// cell and the parent reference coordinates of the child's vertices.
  std::vector<index_t> parent;
  std::vector<std::array<Vec3, 4>> parent_ref_vertices;

  std::size_t n_cells() const { return cells.size(); }
  bool is_curved() const { return !edge_nodes.empty(); }
  bool has_genealogy() const { return !parent.empty(); }

  /// Reference-to-physical map of a cell.
  Vec3 map(std::size_t cell, const Vec3& xi) const;
  /// J[3 r + c] = d x_r / d xi_c
  Mat3 jacobian(std::size_t cell, const Vec3& xi) const;
  /// Affine Jacobian built from the vertices only.
  Mat3 vertex_jacobian(std::size_t cell) const;
};

enum class Deformation { None, Smooth };

/// 5 n^3 tetrahedra on [-1,1]^3. Each cube is split into a central and four
/// corner tetrahedra; the central one always joins the grid vertices of even
/// index parity so that neighboring cubes share face diagonals. Boundary ids
/// 0..5 stand for x=-1, x=1, y=-1, y=1, z=-1, z=1.
TetMesh generate_cube_mesh(int n_subdivisions, Deformation deformation = Deformation::None);

/// Displacement applied to every coordinate by Deformation::Smooth.
double smooth_displacement(const Vec3& x);

/// 1:8 octasection; the inner octahedron is split along its shortest
/// diagonal. Curved meshes are refined in reference space.
TetMesh refine_uniform(const TetMesh& mesh);

/// Recomputes interior and boundary faces. boundary_id(cell, local_face) is
/// queried for each boundary face.
void build_connectivity(TetMesh& mesh, const std::function<int(index_t, int)>& boundary_id);

/// Throws Error naming the first violated invariant.
void check_mesh(const TetMesh& mesh);

/// Sum of cell volumes of the straight-sided mesh.
double mesh_volume(const TetMesh& mesh);

/// 3 r_in / r_circ, equal to 1 for the regular tetrahedron.
double cell_quality(const TetMesh& mesh, std::size_t cell);

/// New mesh whose cell new_of_old[c] is cell c of the input.
TetMesh permute_cells(const TetMesh& mesh, std::span<const index_t> new_of_old);

enum class MeshFormat { GmshMsh2, InternalBinary };

/// Gmsh 2.2 ASCII (element type 4 only; boundary faces get id 0) or the
/// internal little-endian binary format. Negatively oriented cells are
/// repaired by swapping two vertices. Throws ParseError with the line.
TetMesh import_mesh(const std::filesystem::path& path, MeshFormat format);
void export_mesh(const TetMesh& mesh, const std::filesystem::path& path, MeshFormat format);

}  // namespace tetmf

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tetmf/basis.hpp"
#include "tetmf/mesh.hpp"

namespace tetmf {

enum class Space { CG, DG };

/// Cell-to-global index map (the gather operator) plus Dirichlet mask.
///
/// Per cell the indices are stored component-major: entry c * n + j is the
/// global index of node j of component c. DG numbers cells contiguously,
/// CG numbers nodes in order of first appearance in the cell loop, so the
/// cell order determines the vector layout in both spaces.
struct DoFMap {
  Space space = Space::CG;
  int degree = 1;
  int n_components = 1;
  int n_dofs_per_cell = 0;  ///< per component
  std::size_t n_global_dofs = 0;
  std::vector<index_t> cell_dofs;
  /// 1 for constrained DoFs (CG only; DG imposes Dirichlet data weakly).
  std::vector<std::uint8_t> dirichlet_mask;
  std::vector<int> dirichlet_boundary_ids;

  int dofs_per_cell_total() const { return n_dofs_per_cell * n_components; }
  std::size_t n_cells() const { return cell_dofs.size() / dofs_per_cell_total(); }
  std::span<const index_t> dofs(std::size_t cell) const {
    return {cell_dofs.data() + cell * dofs_per_cell_total(), static_cast<std::size_t>(dofs_per_cell_total())};
  }
  bool constrained(std::size_t i) const { return dirichlet_mask[i] != 0; }
  std::size_t n_constrained() const;
};

/// Throws Error for a boundary id that no boundary face of the mesh carries.
DoFMap build_dof_map(const TetMesh& mesh, int p, Space space, int n_components,
                     std::span<const int> dirichlet_boundary_ids);

/// Global positions of the DoF nodes (one entry per scalar node; for vector
/// spaces component c of node i shares the position).
std::vector<Vec3> dof_support_points(const TetMesh& mesh, const DoFMap& dofs);

/// Number of cells referencing each DoF.
std::vector<int> dof_multiplicity(const DoFMap& dofs);

/// W * cells_per_lane cell slots. Slot s = column * W + lane. The last batch
/// is padded by repeating its last cell with active = 0.
struct CellBatch {
  int lane_width = 1;
  int cells_per_lane = 1;
  std::vector<index_t> cells;
  std::vector<std::uint8_t> active;

  int n_slots() const { return lane_width * cells_per_lane; }
  int n_active() const;
};

std::vector<CellBatch> make_cell_batches(std::size_t n_cells, int lane_width, int cells_per_lane);

/// How a batch is laid out as a block[j][column][lane].
struct BlockLayout {
  enum class Kind { Cells, Components } kind = Kind::Cells;
  /// Cells: the component gathered into the cell columns.
  int component = 0;

  int columns(const CellBatch& batch, const DoFMap& dofs) const {
    return kind == Kind::Cells ? batch.cells_per_lane : dofs.n_components;
  }
};

/// Constrained DoFs and inactive slots read as zero.
void gather_masked(const DoFMap& dofs, const CellBatch& batch, BlockLayout layout, std::span<const double> global,
                   std::span<double> block);

/// Adjoint of gather_masked: adds the block into the global vector, skipping
/// constrained rows and inactive slots.
void scatter_add_masked(const DoFMap& dofs, const CellBatch& batch, BlockLayout layout, std::span<const double> block,
                        std::span<double> global);

/// Greedy coloring of items so that items of one color touch disjoint
/// resources. resources[i] lists the resource ids written by item i.
std::vector<int> greedy_coloring(const std::vector<std::vector<index_t>>& resources, std::size_t n_resources);

/// Coloring of batches whose scatters do not overlap within a color.
std::vector<int> color_batches(const DoFMap& dofs, std::span<const CellBatch> batches);

}  // namespace tetmf

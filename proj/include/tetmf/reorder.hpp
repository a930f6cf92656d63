#pragma once

#include <cstdint>
#include <vector>

#include "tetmf/mesh.hpp"

namespace tetmf {

/// new_of_old[c] is the position of cell c in the new order.
struct CellPermutation {
  std::vector<index_t> new_of_old;

  std::size_t size() const { return new_of_old.size(); }
  bool is_bijection() const;
  std::vector<index_t> old_of_new() const;
  static CellPermutation identity(std::size_t n);
  /// Uniformly random permutation from a 64-bit seed.
  static CellPermutation random(std::size_t n, std::uint64_t seed);
};

struct LocalityReport {
  /// Mean |new(a) - new(b)| over face-adjacent cell pairs.
  double mean_neighbor_index_distance = 0;
  /// Max of the same quantity.
  std::uint64_t max_bandwidth = 0;
  /// Mean spread (max - min) of first-touch vertex indices inside batches
  /// of consecutive cells.
  double dof_span_per_batch = 0;
};

/// Recursive grouping. Each level is traversed breadth-first from its
/// lowest-degree node, taking neighbors with more shared faces first, and
/// consecutive runs of group_size nodes become the nodes of the next, weighted
/// level. The top level is traversed the same way and groups are expanded in
/// place, so every group occupies a contiguous index range.
CellPermutation hierarchical_reorder(const TetMesh& mesh, int group_size = 8);

LocalityReport locality_metrics(const TetMesh& mesh, const CellPermutation& perm, int batch_size = 8);

}  // namespace tetmf

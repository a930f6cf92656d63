#include "tetmf/dof.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace tetmf {

namespace {

bool node_on_face(const NodeInfo& info, int face) {
  switch (info.kind) {
    case NodeInfo::Kind::Vertex:
      return info.entity != face;
    case NodeInfo::Kind::Edge:
      return ref::edges[info.entity][0] != face && ref::edges[info.entity][1] != face;
    case NodeInfo::Kind::Face:
      return info.entity == face;
    default:
      return false;
  }
}

}  // namespace

std::size_t DoFMap::n_constrained() const {
  return static_cast<std::size_t>(std::count(dirichlet_mask.begin(), dirichlet_mask.end(), 1));
}

DoFMap build_dof_map(const TetMesh& mesh, int p, Space space, int n_components,
                     std::span<const int> dirichlet_boundary_ids) {
  LagrangeBasis basis(p);
  if (n_components < 1) throw Error("n_components must be positive");
  for (int id : dirichlet_boundary_ids) {
    const bool found = std::any_of(mesh.boundary_faces.begin(), mesh.boundary_faces.end(),
                                   [id](const BoundaryFace& f) { return f.boundary_id == id; });
    if (!found) throw Error("unknown boundary id " + std::to_string(id));
  }

  DoFMap d;
  d.space = space;
  d.degree = p;
  d.n_components = n_components;
  d.n_dofs_per_cell = basis.size();
  d.dirichlet_boundary_ids.assign(dirichlet_boundary_ids.begin(), dirichlet_boundary_ids.end());
  const int n = d.n_dofs_per_cell;
  const std::size_t nc = mesh.n_cells();
  d.cell_dofs.resize(nc * n * n_components);

  if (space == Space::DG) {
    d.n_global_dofs = nc * n * n_components;
    for (std::size_t i = 0; i < d.cell_dofs.size(); ++i) d.cell_dofs[i] = static_cast<index_t>(i);
    d.dirichlet_mask.assign(d.n_global_dofs, 0);
    return d;
  }

  if (mesh.vertices.size() >= (1u << 21)) throw Error("too many vertices for CG numbering");
  // Scalar node numbering by first touch.
  std::vector<index_t> scalar(nc * n);
  std::vector<index_t> vertex_node(mesh.vertices.size(), static_cast<index_t>(-1));
  std::unordered_map<std::uint64_t, index_t> edge_node;
  std::unordered_map<std::uint64_t, index_t> face_node;
  index_t next = 0;
  const auto& info = basis.node_info();
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& cv = mesh.cells[c];
    for (int j = 0; j < n; ++j) {
      const NodeInfo& ni = info[j];
      index_t id = 0;
      if (ni.kind == NodeInfo::Kind::Vertex) {
        index_t& v = vertex_node[cv[ni.entity]];
        if (v == static_cast<index_t>(-1)) v = next++;
        id = v;
      } else if (ni.kind == NodeInfo::Kind::Edge) {
        index_t a = cv[ref::edges[ni.entity][0]], b = cv[ref::edges[ni.entity][1]];
        const int pos = a < b ? ni.position : (p - 2) - ni.position;
        if (a > b) std::swap(a, b);
        const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
        auto [it, inserted] = edge_node.emplace(key, next);
        if (inserted) next += p - 1;
        id = it->second + pos;
      } else {
        std::array<index_t, 3> fv{cv[ref::faces[ni.entity][0]], cv[ref::faces[ni.entity][1]],
                                  cv[ref::faces[ni.entity][2]]};
        std::sort(fv.begin(), fv.end());
        const std::uint64_t key = (static_cast<std::uint64_t>(fv[0]) << 42) |
                                  (static_cast<std::uint64_t>(fv[1]) << 21) | fv[2];
        auto [it, inserted] = face_node.emplace(key, next);
        if (inserted) ++next;
        id = it->second;
      }
      scalar[c * n + j] = id;
    }
  }
  d.n_global_dofs = static_cast<std::size_t>(next) * n_components;
  for (std::size_t c = 0; c < nc; ++c)
    for (int comp = 0; comp < n_components; ++comp)
      for (int j = 0; j < n; ++j)
        d.cell_dofs[(c * n_components + comp) * n + j] = scalar[c * n + j] * n_components + comp;

  d.dirichlet_mask.assign(d.n_global_dofs, 0);
  for (const auto& bf : mesh.boundary_faces) {
    if (std::find(dirichlet_boundary_ids.begin(), dirichlet_boundary_ids.end(), bf.boundary_id) ==
        dirichlet_boundary_ids.end())
      continue;
    for (int j = 0; j < n; ++j)
      if (node_on_face(info[j], bf.face))
        for (int comp = 0; comp < n_components; ++comp)
          d.dirichlet_mask[scalar[bf.cell * n + j] * n_components + comp] = 1;
  }
  return d;
}

std::vector<Vec3> dof_support_points(const TetMesh& mesh, const DoFMap& dofs) {
  LagrangeBasis basis(dofs.degree);
  const int n = dofs.n_dofs_per_cell;
  const int nc = dofs.n_components;
  std::vector<Vec3> pts(dofs.n_global_dofs / nc);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    auto cd = dofs.dofs(c);
    for (int j = 0; j < n; ++j) {
      const index_t g = cd[j];
      const std::size_t node = dofs.space == Space::CG ? g / nc : (c * n + j);
      pts[node] = mesh.map(c, basis.nodes()[j]);
    }
  }
  return pts;
}

std::vector<int> dof_multiplicity(const DoFMap& dofs) {
  std::vector<int> m(dofs.n_global_dofs, 0);
  for (index_t g : dofs.cell_dofs) ++m[g];
  return m;
}

int CellBatch::n_active() const { return static_cast<int>(std::count(active.begin(), active.end(), 1)); }

std::vector<CellBatch> make_cell_batches(std::size_t n_cells, int lane_width, int cells_per_lane) {
  std::vector<CellBatch> out;
  const std::size_t slots = static_cast<std::size_t>(lane_width) * cells_per_lane;
  for (std::size_t start = 0; start < n_cells; start += slots) {
    CellBatch b;
    b.lane_width = lane_width;
    b.cells_per_lane = cells_per_lane;
    b.cells.resize(slots);
    b.active.resize(slots);
    for (std::size_t s = 0; s < slots; ++s) {
      const bool act = start + s < n_cells;
      b.cells[s] = static_cast<index_t>(act ? start + s : n_cells - 1);
      b.active[s] = act;
    }
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

template <class F>
void for_each_slot_entry(const DoFMap& dofs, const CellBatch& batch, BlockLayout layout, F&& f) {
  const int n = dofs.n_dofs_per_cell;
  const int W = batch.lane_width;
  const int cols = layout.columns(batch, dofs);
  for (int s = 0; s < batch.n_slots(); ++s) {
    if (!batch.active[s]) continue;
    const int lane = s % W;
    auto cd = dofs.dofs(batch.cells[s]);
    if (layout.kind == BlockLayout::Kind::Cells) {
      const int col = s / W;
      for (int j = 0; j < n; ++j) f(cd[layout.component * n + j], (j * cols + col) * W + lane);
    } else {
      for (int col = 0; col < cols; ++col)
        for (int j = 0; j < n; ++j) f(cd[col * n + j], (j * cols + col) * W + lane);
    }
  }
}

}  // namespace

void gather_masked(const DoFMap& dofs, const CellBatch& batch, BlockLayout layout, std::span<const double> global,
                   std::span<double> block) {
  if (global.size() != dofs.n_global_dofs) throw DimensionMismatch("gather: vector length mismatch");
  const std::size_t need =
      static_cast<std::size_t>(dofs.n_dofs_per_cell) * layout.columns(batch, dofs) * batch.lane_width;
  if (block.size() < need) throw DimensionMismatch("gather: block too small");
  std::fill(block.begin(), block.begin() + need, 0.0);
  for_each_slot_entry(dofs, batch, layout, [&](index_t g, int slot) {
    if (!dofs.dirichlet_mask[g]) block[slot] = global[g];
  });
}

void scatter_add_masked(const DoFMap& dofs, const CellBatch& batch, BlockLayout layout, std::span<const double> block,
                        std::span<double> global) {
  if (global.size() != dofs.n_global_dofs) throw DimensionMismatch("scatter: vector length mismatch");
  for_each_slot_entry(dofs, batch, layout, [&](index_t g, int slot) {
    if (!dofs.dirichlet_mask[g]) global[g] += block[slot];
  });
}

std::vector<int> greedy_coloring(const std::vector<std::vector<index_t>>& resources, std::size_t n_resources) {
  std::vector<std::vector<int>> used(n_resources);
  std::vector<int> color(resources.size());
  std::vector<char> forbidden;
  for (std::size_t i = 0; i < resources.size(); ++i) {
    std::fill(forbidden.begin(), forbidden.end(), 0);
    for (index_t r : resources[i])
      for (int c : used[r]) {
        if (c >= static_cast<int>(forbidden.size())) forbidden.resize(c + 1, 0);
        forbidden[c] = 1;
      }
    int c = 0;
    while (c < static_cast<int>(forbidden.size()) && forbidden[c]) ++c;
    color[i] = c;
    for (index_t r : resources[i]) {
      auto& u = used[r];
      if (std::find(u.begin(), u.end(), c) == u.end()) u.push_back(c);
    }
  }
  return color;
}

std::vector<int> color_batches(const DoFMap& dofs, std::span<const CellBatch> batches) {
  std::vector<std::vector<index_t>> res(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    for (int s = 0; s < batches[b].n_slots(); ++s) {
      if (!batches[b].active[s]) continue;
      for (index_t g : dofs.dofs(batches[b].cells[s])) res[b].push_back(g);
    }
    std::sort(res[b].begin(), res[b].end());
    res[b].erase(std::unique(res[b].begin(), res[b].end()), res[b].end());
  }
  return greedy_coloring(res, dofs.n_global_dofs);
}

}  // namespace tetmf

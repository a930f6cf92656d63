#include "tetmf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

namespace tetmf {

namespace {

// Quadratic (10-node) shape functions on the reference tet; vertices first,
// then edge midpoints in ref::edges order.
void p2_shape(const Vec3& xi, double* n, double* dn) {
  const double l[4] = {1.0 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]};
  // dl[i][c] = d lambda_i / d xi_c
  static const double dl[4][3] = {{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 4; ++i) {
    n[i] = l[i] * (2.0 * l[i] - 1.0);
    for (int c = 0; c < 3; ++c) dn[3 * i + c] = (4.0 * l[i] - 1.0) * dl[i][c];
  }
  for (int e = 0; e < 6; ++e) {
    const int a = ref::edges[e][0], b = ref::edges[e][1];
    n[4 + e] = 4.0 * l[a] * l[b];
    for (int c = 0; c < 3; ++c) dn[3 * (4 + e) + c] = 4.0 * (dl[a][c] * l[b] + l[a] * dl[b][c]);
  }
}

std::uint64_t pair_key(index_t a, index_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

double affine_det(const std::array<Vec3, 4>& x) {
  const Vec3 a = x[1] - x[0], b = x[2] - x[0], c = x[3] - x[0];
  return dot(a, cross(b, c));
}

}  // namespace

Vec3 TetMesh::map(std::size_t cell, const Vec3& xi) const {
  const auto& c = cells[cell];
  if (!is_curved()) {
    const double l0 = 1.0 - xi[0] - xi[1] - xi[2];
    return l0 * vertices[c[0]] + xi[0] * vertices[c[1]] + xi[1] * vertices[c[2]] + xi[2] * vertices[c[3]];
  }
  double n[10], dn[30];
  p2_shape(xi, n, dn);
  Vec3 x{0, 0, 0};
  for (int i = 0; i < 4; ++i) x = x + n[i] * vertices[c[i]];
  for (int e = 0; e < 6; ++e) x = x + n[4 + e] * edge_nodes[cell][e];
  return x;
}

Mat3 TetMesh::vertex_jacobian(std::size_t cell) const {
  const auto& c = cells[cell];
  const Vec3& x0 = vertices[c[0]];
  Mat3 j{};
  for (int col = 0; col < 3; ++col) {
    const Vec3 d = vertices[c[col + 1]] - x0;
    for (int r = 0; r < 3; ++r) j[3 * r + col] = d[r];
  }
  return j;
}

Mat3 TetMesh::jacobian(std::size_t cell, const Vec3& xi) const {
  if (!is_curved()) return vertex_jacobian(cell);
  double n[10], dn[30];
  p2_shape(xi, n, dn);
  Mat3 j{};
  const auto& c = cells[cell];
  for (int i = 0; i < 10; ++i) {
    const Vec3& x = i < 4 ? vertices[c[i]] : edge_nodes[cell][i - 4];
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) j[3 * r + col] += x[r] * dn[3 * i + col];
  }
  return j;
}

double smooth_displacement(const Vec3& x) {
  using std::numbers::pi;
  return 0.05 * std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
}

TetMesh generate_cube_mesh(int n, Deformation deformation) {
  if (n < 1) throw Error("n_subdivisions must be positive");
  TetMesh mesh;
  const int m = n + 1;
  auto vid = [m](int i, int j, int k) { return static_cast<index_t>(i + m * (j + m * k)); };
  mesh.vertices.reserve(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        mesh.vertices.push_back({-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, -1.0 + 2.0 * k / n});

  mesh.cells.reserve(5 * static_cast<std::size_t>(n) * n * n);
  auto add = [&mesh](std::array<index_t, 4> c) {
    std::array<Vec3, 4> x{mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]], mesh.vertices[c[3]]};
    if (affine_det(x) < 0) std::swap(c[2], c[3]);
    mesh.cells.push_back(c);
  };
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        std::array<index_t, 4> even{};
        int ne = 0;
        for (int c = 0; c < 8; ++c) {
          const int a = c & 1, b = (c >> 1) & 1, d = (c >> 2) & 1;
          if ((i + a + j + b + k + d) % 2 == 0) even[ne++] = vid(i + a, j + b, k + d);
        }
        add(even);
        for (int c = 0; c < 8; ++c) {
          const int a = c & 1, b = (c >> 1) & 1, d = (c >> 2) & 1;
          if ((i + a + j + b + k + d) % 2 == 0) continue;
          add({vid(i + a, j + b, k + d), vid(i + (1 - a), j + b, k + d), vid(i + a, j + (1 - b), k + d),
               vid(i + a, j + b, k + (1 - d))});
        }
      }

  if (deformation == Deformation::Smooth) {
    auto displaced = [](const Vec3& x) {
      const double d = smooth_displacement(x);
      return Vec3{x[0] + d, x[1] + d, x[2] + d};
    };
    mesh.edge_nodes.resize(mesh.cells.size());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c)
      for (int e = 0; e < 6; ++e) {
        const Vec3 mid = 0.5 * (mesh.vertices[mesh.cells[c][ref::edges[e][0]]] +
                                mesh.vertices[mesh.cells[c][ref::edges[e][1]]]);
        mesh.edge_nodes[c][e] = displaced(mid);
      }
    for (auto& v : mesh.vertices) v = displaced(v);
  }

  const double tol = 1e-12;
  build_connectivity(mesh, [&mesh, tol](index_t cell, int face) {
    const auto& fv = ref::faces[face];
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        const double target = side ? 1.0 : -1.0;
        bool on = true;
        for (int k = 0; k < 3; ++k)
          on = on && std::abs(mesh.vertices[mesh.cells[cell][fv[k]]][axis] - target) < tol;
        if (on) return 2 * axis + side;
      }
    return -1;
  });
  return mesh;
}

TetMesh refine_uniform(const TetMesh& mesh) {
  TetMesh fine;
  fine.vertices = mesh.vertices;
  std::unordered_map<std::uint64_t, index_t> midpoint;
  const bool curved = mesh.is_curved();

  // Local nodes 0..3 vertices, 4..9 edge midpoints.
  std::array<Vec3, 10> ref_nodes;
  for (int v = 0; v < 4; ++v) ref_nodes[v] = ref::vertices[v];
  for (int e = 0; e < 6; ++e)
    ref_nodes[4 + e] = 0.5 * (ref::vertices[ref::edges[e][0]] + ref::vertices[ref::edges[e][1]]);
  auto m = [](int a, int b) { return 4 + ref::edge_index(a, b); };

  const std::array<std::array<int, 2>, 3> diagonals{{{m(0, 1), m(2, 3)}, {m(0, 2), m(1, 3)}, {m(0, 3), m(1, 2)}}};
  const std::array<std::array<int, 4>, 3> equators{{{m(0, 2), m(0, 3), m(1, 3), m(1, 2)},
                                                    {m(0, 1), m(0, 3), m(2, 3), m(1, 2)},
                                                    {m(0, 1), m(0, 2), m(2, 3), m(1, 3)}}};

  fine.cells.reserve(8 * mesh.n_cells());
  fine.parent.reserve(8 * mesh.n_cells());
  fine.parent_ref_vertices.reserve(8 * mesh.n_cells());
  if (curved) fine.edge_nodes.reserve(8 * mesh.n_cells());

  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cv = mesh.cells[c];
    std::array<index_t, 10> gid;
    std::array<Vec3, 10> phys;
    for (int v = 0; v < 4; ++v) {
      gid[v] = cv[v];
      phys[v] = mesh.vertices[cv[v]];
    }
    for (int e = 0; e < 6; ++e) {
      const index_t a = cv[ref::edges[e][0]], b = cv[ref::edges[e][1]];
      phys[4 + e] = curved ? mesh.edge_nodes[c][e] : 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
      auto [it, inserted] = midpoint.emplace(pair_key(a, b), static_cast<index_t>(fine.vertices.size()));
      if (inserted) fine.vertices.push_back(phys[4 + e]);
      gid[4 + e] = it->second;
    }

    std::vector<std::array<int, 4>> children{{0, m(0, 1), m(0, 2), m(0, 3)},
                                             {m(0, 1), 1, m(1, 2), m(1, 3)},
                                             {m(0, 2), m(1, 2), 2, m(2, 3)},
                                             {m(0, 3), m(1, 3), m(2, 3), 3}};
    int best = 0;
    double best_len = 0;
    for (int d = 0; d < 3; ++d) {
      const double len = norm(phys[diagonals[d][0]] - phys[diagonals[d][1]]);
      if (d == 0 || len < best_len * (1.0 - 1e-12)) {
        best = d;
        best_len = len;
      }
    }
    const auto& eq = equators[best];
    for (int k = 0; k < 4; ++k)
      children.push_back({diagonals[best][0], diagonals[best][1], eq[k], eq[(k + 1) % 4]});

    for (auto ch : children) {
      std::array<Vec3, 4> rv{ref_nodes[ch[0]], ref_nodes[ch[1]], ref_nodes[ch[2]], ref_nodes[ch[3]]};
      if (affine_det(rv) < 0) {
        std::swap(ch[2], ch[3]);
        std::swap(rv[2], rv[3]);
      }
      fine.cells.push_back({gid[ch[0]], gid[ch[1]], gid[ch[2]], gid[ch[3]]});
      fine.parent.push_back(static_cast<index_t>(c));
      fine.parent_ref_vertices.push_back(rv);
      if (curved) {
        std::array<Vec3, 6> en;
        for (int e = 0; e < 6; ++e)
          en[e] = mesh.map(c, 0.5 * (rv[ref::edges[e][0]] + rv[ref::edges[e][1]]));
        fine.edge_nodes.push_back(en);
      }
    }
  }

  // Boundary ids are inherited from the parent face containing the child face.
  std::unordered_map<std::uint64_t, int> parent_bid;
  for (const auto& bf : mesh.boundary_faces)
    parent_bid[(static_cast<std::uint64_t>(bf.cell) << 3) | bf.face] = bf.boundary_id;
  auto on_parent_face = [](const Vec3& x, int f) {
    const double tol = 1e-12;
    if (f == 0) return std::abs(x[0] + x[1] + x[2] - 1.0) < tol;
    return std::abs(x[f - 1]) < tol;
  };
  build_connectivity(fine, [&](index_t cell, int face) {
    const auto& rv = fine.parent_ref_vertices[cell];
    for (int f = 0; f < 4; ++f) {
      bool on = true;
      for (int k = 0; k < 3; ++k) on = on && on_parent_face(rv[ref::faces[face][k]], f);
      if (!on) continue;
      auto it = parent_bid.find((static_cast<std::uint64_t>(fine.parent[cell]) << 3) | f);
      if (it != parent_bid.end()) return it->second;
    }
    return -1;
  });
  return fine;
}

void build_connectivity(TetMesh& mesh, const std::function<int(index_t, int)>& boundary_id) {
  struct Slot {
    index_t cell;
    int face;
    int count;
  };
  std::unordered_map<std::uint64_t, Slot> first;
  std::unordered_map<std::uint64_t, index_t> pair_ids;
  auto triple_key = [&pair_ids](std::array<index_t, 3> v) {
    std::sort(v.begin(), v.end());
    auto [it, ins] = pair_ids.emplace(pair_key(v[0], v[1]), static_cast<index_t>(pair_ids.size()));
    (void)ins;
    return (static_cast<std::uint64_t>(it->second) << 32) | v[2];
  };

  mesh.interior_faces.clear();
  mesh.boundary_faces.clear();
  first.reserve(4 * mesh.n_cells());
  for (index_t c = 0; c < mesh.n_cells(); ++c)
    for (int f = 0; f < 4; ++f) {
      const auto& fv = ref::faces[f];
      const auto& cv = mesh.cells[c];
      const std::uint64_t key = triple_key({cv[fv[0]], cv[fv[1]], cv[fv[2]]});
      auto [it, inserted] = first.emplace(key, Slot{c, f, 1});
      if (inserted) continue;
      Slot& s = it->second;
      if (++s.count > 2) throw Error("face shared by more than two cells at cell " + std::to_string(c));
      const auto& mv = mesh.cells[s.cell];
      std::array<int, 3> perm{};
      for (int i = 0; i < 3; ++i) {
        perm[i] = -1;
        for (int k = 0; k < 3; ++k)
          if (mv[ref::faces[s.face][k]] == cv[fv[i]]) perm[i] = k;
      }
      mesh.interior_faces.push_back({s.cell, static_cast<std::uint8_t>(s.face), c, static_cast<std::uint8_t>(f),
                                     FaceOrientation::from_perm(perm)});
    }
  for (const auto& [key, s] : first) {
    if (s.count != 1) continue;
    mesh.boundary_faces.push_back({s.cell, static_cast<std::uint8_t>(s.face), boundary_id(s.cell, s.face)});
  }
  std::sort(mesh.interior_faces.begin(), mesh.interior_faces.end(), [](const auto& a, const auto& b) {
    return a.cell_minus != b.cell_minus ? a.cell_minus < b.cell_minus : a.face_minus < b.face_minus;
  });
  std::sort(mesh.boundary_faces.begin(), mesh.boundary_faces.end(), [](const auto& a, const auto& b) {
    return a.cell != b.cell ? a.cell < b.cell : a.face < b.face;
  });
}

void check_mesh(const TetMesh& mesh) {
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    for (index_t v : mesh.cells[c])
      if (v >= mesh.vertices.size()) throw Error("cell " + std::to_string(c) + " references missing vertex");
    if (det(mesh.vertex_jacobian(c)) <= 0) throw Error("cell " + std::to_string(c) + " has det(J) <= 0");
  }
  if (4 * mesh.n_cells() != 2 * mesh.interior_faces.size() + mesh.boundary_faces.size())
    throw Error("face count mismatch: 4 N_el != 2 interior + boundary");
  std::vector<int> seen(4 * mesh.n_cells(), 0);
  for (const auto& f : mesh.interior_faces) {
    ++seen[4 * f.cell_minus + f.face_minus];
    ++seen[4 * f.cell_plus + f.face_plus];
    if (f.cell_minus >= f.cell_plus) throw Error("interior face with minus cell id >= plus cell id");
    const auto& p = f.orientation.perm();
    for (int i = 0; i < 3; ++i)
      if (mesh.cells[f.cell_plus][ref::faces[f.face_plus][i]] != mesh.cells[f.cell_minus][ref::faces[f.face_minus][p[i]]])
        throw Error("orientation code inconsistent at interior face of cell " + std::to_string(f.cell_minus));
  }
  for (const auto& f : mesh.boundary_faces) ++seen[4 * f.cell + f.face];
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i] != 1) throw Error("local face " + std::to_string(i % 4) + " of cell " + std::to_string(i / 4) +
                                  " referenced " + std::to_string(seen[i]) + " times");
}

double mesh_volume(const TetMesh& mesh) {
  double v = 0;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) v += std::abs(det(mesh.vertex_jacobian(c))) / 6.0;
  return v;
}

double cell_quality(const TetMesh& mesh, std::size_t cell) {
  const auto& c = mesh.cells[cell];
  const Vec3& x0 = mesh.vertices[c[0]];
  const Vec3 a = mesh.vertices[c[1]] - x0, b = mesh.vertices[c[2]] - x0, d = mesh.vertices[c[3]] - x0;
  const double vol6 = std::abs(dot(a, cross(b, d)));
  double area = 0;
  for (const auto& f : ref::faces) {
    const Vec3& p = mesh.vertices[c[f[0]]];
    area += 0.5 * norm(cross(mesh.vertices[c[f[1]]] - p, mesh.vertices[c[f[2]]] - p));
  }
  const double r_in = vol6 / 2.0 / area;
  // circumcenter relative to x0
  const Vec3 num = dot(a, a) * cross(b, d) + dot(b, b) * cross(d, a) + dot(d, d) * cross(a, b);
  const double r_circ = norm(num) / (2.0 * vol6);
  return 3.0 * r_in / r_circ;
}

TetMesh permute_cells(const TetMesh& mesh, std::span<const index_t> new_of_old) {
  const std::size_t n = mesh.n_cells();
  if (new_of_old.size() != n) throw DimensionMismatch("permutation length does not match cell count");
  std::vector<index_t> old_of_new(n, static_cast<index_t>(-1));
  for (std::size_t c = 0; c < n; ++c) {
    if (new_of_old[c] >= n || old_of_new[new_of_old[c]] != static_cast<index_t>(-1))
      throw Error("cell permutation is not a bijection");
    old_of_new[new_of_old[c]] = static_cast<index_t>(c);
  }
  TetMesh out;
  out.vertices = mesh.vertices;
  out.cells.resize(n);
  if (mesh.is_curved()) out.edge_nodes.resize(n);
  if (mesh.has_genealogy()) {
    out.parent.resize(n);
    out.parent_ref_vertices.resize(n);
  }
  for (std::size_t c = 0; c < n; ++c) {
    const index_t d = new_of_old[c];
    out.cells[d] = mesh.cells[c];
    if (mesh.is_curved()) out.edge_nodes[d] = mesh.edge_nodes[c];
    if (mesh.has_genealogy()) {
      out.parent[d] = mesh.parent[c];
      out.parent_ref_vertices[d] = mesh.parent_ref_vertices[c];
    }
  }
  std::unordered_map<std::uint64_t, int> bid;
  for (const auto& bf : mesh.boundary_faces) bid[(static_cast<std::uint64_t>(bf.cell) << 3) | bf.face] = bf.boundary_id;
  build_connectivity(out, [&](index_t cell, int face) {
    auto it = bid.find((static_cast<std::uint64_t>(old_of_new[cell]) << 3) | face);
    return it == bid.end() ? -1 : it->second;
  });
  return out;
}

}  // namespace tetmf

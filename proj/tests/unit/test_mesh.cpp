#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "tetmf/mesh.hpp"
#include "tetmf/quadrature.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

// Face counts by brute-force enumeration of sorted vertex triples.
std::pair<std::size_t, std::size_t> enumerate_faces(const TetMesh& m) {
  std::map<std::array<index_t, 3>, int> count;
  for (const auto& c : m.cells)
    for (const auto& f : ref::faces) {
      std::array<index_t, 3> t{c[f[0]], c[f[1]], c[f[2]]};
      std::sort(t.begin(), t.end());
      ++count[t];
    }
  std::size_t interior = 0, boundary = 0;
  for (const auto& [k, n] : count) {
    REQUIRE(n <= 2);
    (n == 2 ? interior : boundary)++;
  }
  return {interior, boundary};
}

double min_quality(const TetMesh& m) {
  double q = 1;
  for (std::size_t c = 0; c < m.n_cells(); ++c) q = std::min(q, cell_quality(m, c));
  return q;
}

}  // namespace

TEST_CASE("single cube split") {
  const TetMesh m = generate_cube_mesh(1);
  CHECK(m.n_cells() == 5);
  CHECK(m.vertices.size() == 8);
  CHECK(m.interior_faces.size() == 4);
  CHECK(m.boundary_faces.size() == 12);
  const auto [interior, boundary] = enumerate_faces(m);
  CHECK(interior == m.interior_faces.size());
  CHECK(boundary == m.boundary_faces.size());
  CHECK(mesh_volume(m) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK_NOTHROW(check_mesh(m));
}

TEST_CASE("cube meshes satisfy the connectivity invariants") {
  for (int n : {1, 2, 3, 4}) {
    const TetMesh m = generate_cube_mesh(n);
    CAPTURE(n);
    CHECK(m.n_cells() == static_cast<std::size_t>(5 * n * n * n));
    CHECK(4 * m.n_cells() == 2 * m.interior_faces.size() + m.boundary_faces.size());
    const auto [interior, boundary] = enumerate_faces(m);
    CHECK(interior == m.interior_faces.size());
    CHECK(boundary == m.boundary_faces.size());
    for (std::size_t c = 0; c < m.n_cells(); ++c) CHECK(det(m.vertex_jacobian(c)) > 0);
    // each cell side appears exactly once among the faces
    std::vector<int> seen(4 * m.n_cells(), 0);
    for (const auto& f : m.interior_faces) {
      CHECK(f.cell_minus < f.cell_plus);
      ++seen[4 * f.cell_minus + f.face_minus];
      ++seen[4 * f.cell_plus + f.face_plus];
    }
    for (const auto& f : m.boundary_faces) {
      ++seen[4 * f.cell + f.face];
      CHECK(f.boundary_id >= 0);
      CHECK(f.boundary_id <= 5);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    CHECK(mesh_volume(m) == doctest::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("face pairing follows the orientation code") {
  for (const TetMesh& m : {generate_cube_mesh(3), refine_uniform(generate_cube_mesh(2)), test::two_tets()}) {
    for (const auto& f : m.interior_faces) {
      const auto& cm = m.cells[f.cell_minus];
      const auto& cp = m.cells[f.cell_plus];
      const auto& perm = f.orientation.perm();
      for (int i = 0; i < 3; ++i)
        CHECK(cp[ref::faces[f.face_plus][i]] == cm[ref::faces[f.face_minus][perm[i]]]);
    }
  }
}

TEST_CASE("boundary ids name the cube sides") {
  const TetMesh m = generate_cube_mesh(2);
  for (const auto& f : m.boundary_faces) {
    const auto& c = m.cells[f.cell];
    const int axis = f.boundary_id / 2;
    const double side = f.boundary_id % 2 ? 1.0 : -1.0;
    for (int i = 0; i < 3; ++i) CHECK(m.vertices[c[ref::faces[f.face][i]]][axis] == side);
  }
}

TEST_CASE("uniform refinement") {
  const TetMesh m0 = generate_cube_mesh(1);
  const TetMesh m1 = refine_uniform(m0);
  CHECK(m1.n_cells() == 40);
  CHECK(mesh_volume(m1) == doctest::Approx(mesh_volume(m0)).epsilon(1e-12));
  CHECK_NOTHROW(check_mesh(m1));
  REQUIRE(m1.has_genealogy());

  SUBCASE("children nest in their parents") {
    for (std::size_t c = 0; c < m1.n_cells(); ++c)
      for (int i = 0; i < 4; ++i) {
        const Vec3& r = m1.parent_ref_vertices[c][i];
        // parent vertices and edge midpoints have coordinates in {0, 1/2, 1}
        for (int k = 0; k < 3; ++k) CHECK(std::abs(2 * r[k] - std::round(2 * r[k])) < 1e-14);
        CHECK(r[0] + r[1] + r[2] <= 1 + 1e-14);
        const int halves = static_cast<int>(std::round(2 * (r[0] + r[1] + r[2])));
        CHECK(halves <= 2);
        const Vec3 x = m0.map(m1.parent[c], r);
        const Vec3& v = m1.vertices[m1.cells[c][i]];
        for (int k = 0; k < 3; ++k) CHECK(std::abs(x[k] - v[k]) < 1e-14);
      }
  }

  SUBCASE("cell quality does not degenerate") {
    TetMesh m = m0;
    const double q0 = min_quality(m);
    double prev = q0;
    for (int r = 0; r < 3; ++r) {
      m = refine_uniform(m);
      const double q = min_quality(m);
      CHECK(q > 0.5 * q0);
      if (r > 0) CHECK(q >= prev * (1 - 1e-12));  // refinement families repeat after the first step
      prev = q;
    }
    CHECK(mesh_volume(m) == doctest::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("deformed meshes") {
  const TetMesh m = generate_cube_mesh(2, Deformation::Smooth);
  CHECK(m.is_curved());
  CHECK(m.edge_nodes.size() == m.n_cells());
  CHECK_NOTHROW(check_mesh(m));
  // vertices and edge nodes are displaced, the cube boundary is kept
  const TetMesh flat = generate_cube_mesh(2);
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    for (int k = 0; k < 3; ++k)
      if (std::abs(flat.vertices[v][k]) == 1.0) CHECK(m.vertices[v][k] == flat.vertices[v][k]);
  const TetMesh r = refine_uniform(m);
  CHECK(r.is_curved());
  // refined children follow the parent map
  for (std::size_t c = 0; c < r.n_cells(); c += 7)
    for (int i = 0; i < 4; ++i) {
      const Vec3 x = m.map(r.parent[c], r.parent_ref_vertices[c][i]);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(x[k] - r.vertices[r.cells[c][i]][k]) < 1e-13);
    }
}

TEST_CASE("permute_cells") {
  const TetMesh m = generate_cube_mesh(2);
  std::vector<index_t> perm(m.n_cells());
  for (std::size_t c = 0; c < perm.size(); ++c) perm[c] = static_cast<index_t>((c * 7 + 3) % perm.size());
  const TetMesh p = permute_cells(m, perm);
  CHECK_NOTHROW(check_mesh(p));
  for (std::size_t c = 0; c < m.n_cells(); ++c) CHECK(p.cells[perm[c]] == m.cells[c]);
  CHECK(p.interior_faces.size() == m.interior_faces.size());
  std::multiset<int> ids_m, ids_p;
  for (const auto& f : m.boundary_faces) ids_m.insert(f.boundary_id);
  for (const auto& f : p.boundary_faces) ids_p.insert(f.boundary_id);
  CHECK(ids_m == ids_p);
  std::vector<index_t> bad(m.n_cells(), 0);
  CHECK_THROWS_AS(permute_cells(m, bad), Error);
}

TEST_CASE("check_mesh rejects inverted cells") {
  TetMesh m = test::reference_tet();
  std::swap(m.cells[0][0], m.cells[0][1]);
  CHECK_THROWS_AS(check_mesh(m), Error);
}

#include <cmath>

#include "doctest.h"
#include "tetmf/geometry.hpp"
#include "tetmf/quadrature.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

double total_jxw(const GeometryData& g) {
  double s = 0;
  for (std::size_t c = 0; c < g.n_cells; ++c)
    for (int q = 0; q < g.n_q; ++q) s += g.jxw(c, q);
  return s;
}

// Volume of a curved mesh by a degree-7 rule on the exact map.
double oracle_volume(const TetMesh& m) {
  const QuadratureRule r = tet_rule(7);
  double s = 0;
  for (std::size_t c = 0; c < m.n_cells(); ++c)
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * det(m.jacobian(c, r.points[q]));
  return s;
}

}  // namespace

TEST_CASE("reference cell has identity geometry") {
  const TetMesh m = test::reference_tet();
  const QuadratureRule rule = tet_rule(4);
  const GeometryData g = build_geometry(m, rule, nullptr, GeometryMode::Affine);
  REQUIRE(g.jac_inv_t.size() == 1);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(g.jac_inv_t[0][3 * r + c] == doctest::Approx(r == c ? 1.0 : 0.0));
  for (int q = 0; q < g.n_q; ++q) CHECK(g.jxw(0, q) == doctest::Approx(rule.weights[q]).epsilon(1e-15));
  CHECK_FALSE(g.has_faces());
}

TEST_CASE("scaling the mesh scales det J") {
  TetMesh m = generate_cube_mesh(2);
  const QuadratureRule rule = tet_rule(2);
  const GeometryData g1 = build_geometry(m, rule, nullptr, GeometryMode::Affine);
  for (auto& v : m.vertices) v = 2.0 * v;
  const GeometryData g2 = build_geometry(m, rule, nullptr, GeometryMode::Affine);
  for (std::size_t c = 0; c < m.n_cells(); ++c) {
    CHECK(g2.det_j[c] == doctest::Approx(8 * g1.det_j[c]).epsilon(1e-14));
    for (int q = 0; q < g1.n_q; ++q) CHECK(g2.jxw(c, q) == doctest::Approx(8 * g1.jxw(c, q)).epsilon(1e-14));
  }
}

TEST_CASE("affine geometry stores one Jacobian per cell and conserves volume") {
  const TetMesh m = refine_uniform(generate_cube_mesh(2));
  for (int p = 1; p <= 3; ++p) {
    const QuadratureRule cell = make_cell_quadrature(p, QuadratureVariant::Standard);
    const QuadratureRule face = make_face_quadrature(p);
    const GeometryData g = build_geometry(m, cell, &face, GeometryMode::Affine);
    CHECK(g.jac_inv_t.size() == m.n_cells());
    CHECK(g.det_j.size() == m.n_cells());
    CHECK(g.jxw_points.empty());
    for (std::size_t c = 0; c < m.n_cells(); ++c)
      for (int q = 0; q < g.n_q; ++q) CHECK(g.jxw(c, q) > 0);
    CHECK(total_jxw(g) == doctest::Approx(8.0).epsilon(1e-12));

    // faces: unit normals, total boundary area 24
    for (const Vec3& n : g.interior.normals) CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-14));
    double area = 0;
    for (double w : g.boundary.jxw) area += w;
    CHECK(area == doctest::Approx(24.0).epsilon(1e-12));
  }
}

TEST_CASE("interior normals point from the minus to the plus cell") {
  const TetMesh m = generate_cube_mesh(2);
  const QuadratureRule cell = tet_rule(2);
  const QuadratureRule face = triangle_rule(2);
  const GeometryData g = build_geometry(m, cell, &face, GeometryMode::Affine);
  auto centroid = [&](index_t c) {
    Vec3 x{0, 0, 0};
    for (index_t v : m.cells[c]) x = x + 0.25 * m.vertices[v];
    return x;
  };
  for (std::size_t f = 0; f < m.interior_faces.size(); ++f) {
    const auto& face_data = m.interior_faces[f];
    const Vec3 d = centroid(face_data.cell_plus) - centroid(face_data.cell_minus);
    for (int q = 0; q < g.n_qf; ++q) CHECK(dot(g.interior.normals[f * g.n_qf + q], d) > 0);
  }
}

TEST_CASE("per-point geometry on deformed meshes") {
  const TetMesh m = generate_cube_mesh(2, Deformation::Smooth);
  CHECK_THROWS_AS(build_geometry(m, tet_rule(2), nullptr, GeometryMode::Affine), Error);
  const double oracle = oracle_volume(m);
  for (int p = 2; p <= 3; ++p) {
    const QuadratureRule cell = make_cell_quadrature(p, QuadratureVariant::Standard);
    const GeometryData g = build_geometry(m, cell, nullptr, GeometryMode::PerQuadraturePoint);
    CHECK(g.jac_inv_t.size() == m.n_cells() * g.n_q);
    CHECK(std::abs(total_jxw(g) - oracle) < 1e-10 * oracle);
  }
  // straight meshes give the same numbers in either mode
  const TetMesh flat = generate_cube_mesh(2);
  const QuadratureRule cell = tet_rule(4);
  const GeometryData a = build_geometry(flat, cell, nullptr, GeometryMode::Affine);
  const GeometryData b = build_geometry(flat, cell, nullptr, GeometryMode::PerQuadraturePoint);
  for (std::size_t c = 0; c < flat.n_cells(); ++c)
    for (int q = 0; q < a.n_q; ++q) {
      CHECK(b.jxw(c, q) == doctest::Approx(a.jxw(c, q)).epsilon(1e-14));
      for (int k = 0; k < 9; ++k) CHECK(std::abs(b.jac_inv_t_at(c, q)[k] - a.jac_inv_t_at(c, q)[k]) < 1e-13);
    }
}

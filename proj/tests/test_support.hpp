#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "tetmf/mesh.hpp"

namespace tetmf::test {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline double max_abs(std::span<const double> a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// max |a - b| / max |b|
inline double relative_difference(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  const double s = max_abs(b);
  return s > 0 ? d / s : d;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Single cell on the reference tetrahedron.
inline TetMesh reference_tet() {
  TetMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.cells = {{0, 1, 2, 3}};
  build_connectivity(m, [](index_t, int) { return 0; });
  return m;
}

inline TetMesh two_tets() {
  TetMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  m.cells = {{0, 1, 2, 3}, {1, 2, 3, 4}};
  if (det(m.vertex_jacobian(1)) < 0) std::swap(m.cells[1][2], m.cells[1][3]);
  build_connectivity(m, [](index_t, int) { return 0; });
  return m;
}

// Path of n cells, cell i on vertices i..i+3 of the moment curve, so only
// consecutive cells share a face.
inline TetMesh tet_chain(std::size_t n) {
  TetMesh m;
  for (std::size_t i = 0; i < n + 3; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    m.vertices.push_back({t, t * t, t * t * t});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<index_t>(i);
    std::array<index_t, 4> c{v, v + 1, v + 2, v + 3};
    m.cells.push_back(c);
    if (det(m.vertex_jacobian(i)) < 0) std::swap(m.cells[i][2], m.cells[i][3]);
  }
  build_connectivity(m, [](index_t, int) { return 0; });
  return m;
}

}  // namespace tetmf::test

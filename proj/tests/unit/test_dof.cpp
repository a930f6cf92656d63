#include <map>
#include <set>

#include "doctest.h"
#include "tetmf/discretization.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

const std::vector<int> kAllIds{0, 1, 2, 3, 4, 5};
const std::vector<int> kSomeIds{0, 3};

std::size_t block_size(const DoFMap& d, const CellBatch& b, BlockLayout layout) {
  return static_cast<std::size_t>(d.n_dofs_per_cell) * layout.columns(b, d) * b.lane_width;
}

}  // namespace

TEST_CASE("DoF counts") {
  const TetMesh m = generate_cube_mesh(1);
  const std::vector<int> none;
  CHECK(build_dof_map(m, 1, Space::CG, 1, none).n_global_dofs == 8);
  CHECK(build_dof_map(m, 1, Space::DG, 1, none).n_global_dofs == 20);
  // 8 vertices and 18 edges (12 cube edges, 6 face diagonals)
  CHECK(build_dof_map(m, 2, Space::CG, 1, none).n_global_dofs == 26);
  CHECK(build_dof_map(m, 3, Space::DG, 3, none).n_global_dofs == 300);
  // 20 480 cells of the cube family at p = 1 DG
  const TetMesh fine = refine_uniform(refine_uniform(generate_cube_mesh(4)));
  CHECK(fine.n_cells() == 20480);
  CHECK(build_dof_map(fine, 1, Space::DG, 1, none).n_global_dofs == 81920);
  CHECK_THROWS_AS(build_dof_map(m, 1, Space::CG, 1, std::vector<int>{7}), Error);
}

TEST_CASE("DG numbering is contiguous per cell") {
  const TetMesh m = generate_cube_mesh(2);
  for (int nc : {1, 3}) {
    const DoFMap d = build_dof_map(m, 2, Space::DG, nc, kAllIds);
    const int n = d.dofs_per_cell_total();
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
      const auto cd = d.dofs(c);
      for (int j = 0; j < n; ++j) CHECK(cd[j] == c * n + j);
    }
    CHECK(d.n_constrained() == 0);
  }
}

TEST_CASE("CG numbering shares nodes between cells") {
  const TetMesh m = generate_cube_mesh(2, Deformation::Smooth);
  for (int p = 1; p <= 3; ++p) {
    const DoFMap d = build_dof_map(m, p, Space::CG, 1, kSomeIds);
    const auto pts = dof_support_points(m, d);
    // the same physical node gets the same index in every cell, and vice versa
    std::map<std::array<long, 3>, index_t> by_position;
    std::vector<char> referenced(d.n_global_dofs, 0);
    for (std::size_t c = 0; c < m.n_cells(); ++c)
      for (index_t i : d.dofs(c)) {
        REQUIRE(i < d.n_global_dofs);
        referenced[i] = 1;
        const Vec3& x = pts[i];
        const std::array<long, 3> key{std::lround(x[0] * 1e8), std::lround(x[1] * 1e8), std::lround(x[2] * 1e8)};
        const auto [it, fresh] = by_position.emplace(key, i);
        CHECK(it->second == i);
      }
    CHECK(by_position.size() == d.n_global_dofs);
    CHECK(std::all_of(referenced.begin(), referenced.end(), [](char r) { return r == 1; }));
  }
}

TEST_CASE("CG Dirichlet mask covers exactly the nodes on the chosen sides") {
  const TetMesh m = generate_cube_mesh(2);
  const DoFMap d = build_dof_map(m, 2, Space::CG, 1, kSomeIds);
  const auto pts = dof_support_points(m, d);
  for (std::size_t i = 0; i < d.n_global_dofs; ++i) {
    const bool on = std::abs(pts[i][0] + 1) < 1e-14 || std::abs(pts[i][1] - 1) < 1e-14;
    CHECK(d.constrained(i) == on);
  }
}

TEST_CASE("multiplicity counts adjacent cells") {
  const TetMesh m = generate_cube_mesh(1);
  const DoFMap d = build_dof_map(m, 1, Space::CG, 1, std::vector<int>{});
  const auto mult = dof_multiplicity(d);
  int total = 0;
  for (int k : mult) total += k;
  CHECK(total == 20);
  // the corner vertices of the central tet touch it and three corner tets
  int fours = 0;
  for (int k : mult) fours += k == 4;
  CHECK(fours == 4);
}

TEST_CASE("cell batches pad with inactive slots") {
  const auto batches = make_cell_batches(10, 4, 1);
  REQUIRE(batches.size() == 3);
  CHECK(batches[2].n_active() == 2);
  CHECK(batches[2].cells[3] == 9);
  CHECK(batches[2].active[3] == 0);
  const auto wide = make_cell_batches(10, 2, 4);
  REQUIRE(wide.size() == 2);
  CHECK(wide[0].n_slots() == 8);
  CHECK(wide[1].n_active() == 2);
}

TEST_CASE("gather and scatter") {
  const TetMesh m = generate_cube_mesh(2);
  for (Space space : {Space::CG, Space::DG})
    for (int nc : {1, 3})
      for (auto kind : {BlockLayout::Kind::Cells, BlockLayout::Kind::Components}) {
        if (kind == BlockLayout::Kind::Components && nc == 1) continue;
        const DoFMap d = build_dof_map(m, 2, space, nc, kSomeIds);
        const auto batches = make_cell_batches(m.n_cells(), 4, kind == BlockLayout::Kind::Cells ? 2 : 1);
        const int components = kind == BlockLayout::Kind::Cells ? nc : 1;
        CAPTURE(static_cast<int>(space));
        CAPTURE(nc);

        SUBCASE("adjointness") {
          const auto u = test::random_vector(d.n_global_dofs, 1);
          double lhs = 0, rhs = 0;
          std::vector<double> gt(d.n_global_dofs, 0.0);
          for (const auto& b : batches)
            for (int comp = 0; comp < components; ++comp) {
              const BlockLayout layout{kind, comp};
              const auto v = test::random_vector(block_size(d, b, layout), 100 + comp);
              std::vector<double> gu(v.size());
              gather_masked(d, b, layout, u, gu);
              lhs += test::dot(v, gu);
              std::fill(gt.begin(), gt.end(), 0.0);
              scatter_add_masked(d, b, layout, v, gt);
              rhs += test::dot(gt, u);
            }
          CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, std::abs(lhs)));
        }

        SUBCASE("constrained entries are never read or written") {
          std::vector<double> u(d.n_global_dofs, 0.0);
          for (std::size_t i = 0; i < u.size(); ++i)
            if (d.constrained(i)) u[i] = 1.0;
          std::vector<double> out(d.n_global_dofs, 0.0);
          for (const auto& b : batches)
            for (int comp = 0; comp < components; ++comp) {
              const BlockLayout layout{kind, comp};
              std::vector<double> block(block_size(d, b, layout));
              gather_masked(d, b, layout, u, block);
              CHECK(test::max_abs(block) == 0.0);
              std::fill(block.begin(), block.end(), 1.0);
              scatter_add_masked(d, b, layout, block, out);
            }
          for (std::size_t i = 0; i < out.size(); ++i)
            if (d.constrained(i)) CHECK(out[i] == 0.0);
        }

        SUBCASE("scatter of gathered unit vectors counts adjacent cells") {
          const auto mult = dof_multiplicity(d);
          for (std::size_t k = 0; k < d.n_global_dofs; k += 7) {
            std::vector<double> e(d.n_global_dofs, 0.0), out(d.n_global_dofs, 0.0);
            e[k] = 1.0;
            for (const auto& b : batches)
              for (int comp = 0; comp < components; ++comp) {
                const BlockLayout layout{kind, comp};
                std::vector<double> block(block_size(d, b, layout));
                gather_masked(d, b, layout, e, block);
                scatter_add_masked(d, b, layout, block, out);
              }
            CHECK(out[k] == (d.constrained(k) ? 0.0 : static_cast<double>(mult[k])));
            if (space == Space::DG) CHECK(out[k] == 1.0);
            double others = 0;
            for (std::size_t i = 0; i < out.size(); ++i)
              if (i != k) others += std::abs(out[i]);
            CHECK(others == 0.0);
          }
        }
      }
}

TEST_CASE("fully constrained cell gathers zeros") {
  const TetMesh m = generate_cube_mesh(1);
  const DoFMap d = build_dof_map(m, 1, Space::CG, 1, kAllIds);
  CHECK(d.n_constrained() == 8);
  const auto batches = make_cell_batches(m.n_cells(), 8, 1);
  const auto u = test::random_vector(d.n_global_dofs, 3);
  std::vector<double> block(4 * 8);
  gather_masked(d, batches[0], {}, u, block);
  CHECK(test::max_abs(block) == 0.0);
}

TEST_CASE("batch coloring separates overlapping scatters") {
  const TetMesh m = generate_cube_mesh(3);
  const DoFMap d = build_dof_map(m, 2, Space::CG, 1, kSomeIds);
  const auto batches = make_cell_batches(m.n_cells(), 4, 1);
  const auto colors = color_batches(d, batches);
  REQUIRE(colors.size() == batches.size());
  std::map<int, std::set<index_t>> written;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    std::set<index_t> mine;
    for (int s = 0; s < batches[b].n_slots(); ++s)
      if (batches[b].active[s])
        for (index_t i : d.dofs(batches[b].cells[s])) mine.insert(i);
    for (index_t i : mine) CHECK(written[colors[b]].insert(i).second);
  }
  const std::vector<std::vector<index_t>> res{{0, 1}, {1, 2}, {2, 3}, {4}};
  const auto c = greedy_coloring(res, 5);
  CHECK(c[0] != c[1]);
  CHECK(c[1] != c[2]);
  CHECK(c[0] == c[2]);
  CHECK(c[3] == 0);
}

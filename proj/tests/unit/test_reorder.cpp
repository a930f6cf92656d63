#include <cmath>

#include "doctest.h"
#include "tetmf/reorder.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

TetMesh shuffled(const TetMesh& m, std::uint64_t seed) {
  return permute_cells(m, CellPermutation::random(m.n_cells(), seed).new_of_old);
}

}  // namespace

TEST_CASE("permutation helpers") {
  const auto id = CellPermutation::identity(5);
  CHECK(id.is_bijection());
  const auto r = CellPermutation::random(100, 42);
  CHECK(r.is_bijection());
  CHECK(r.new_of_old == CellPermutation::random(100, 42).new_of_old);
  CHECK(r.new_of_old != CellPermutation::random(100, 43).new_of_old);
  const auto inv = r.old_of_new();
  for (std::size_t c = 0; c < 100; ++c) CHECK(inv[r.new_of_old[c]] == c);
  CellPermutation bad{{0, 0, 1}};
  CHECK_FALSE(bad.is_bijection());
}

TEST_CASE("locality metrics") {
  const TetMesh two = test::two_tets();
  CHECK(locality_metrics(two, CellPermutation::identity(2)).mean_neighbor_index_distance == 1.0);

  const TetMesh chain = test::tet_chain(100);
  const auto id = locality_metrics(chain, CellPermutation::identity(100));
  CHECK(id.mean_neighbor_index_distance == 1.0);
  CHECK(id.max_bandwidth == 1);
  CellPermutation rev;
  for (index_t c = 0; c < 100; ++c) rev.new_of_old.push_back(99 - c);
  CHECK(locality_metrics(chain, rev).mean_neighbor_index_distance == 1.0);

  // brute force over the path edges
  const auto p = CellPermutation::random(100, 7);
  double sum = 0;
  std::uint64_t mx = 0;
  for (std::size_t c = 0; c + 1 < 100; ++c) {
    const auto d = static_cast<std::uint64_t>(std::llabs(static_cast<long long>(p.new_of_old[c]) - p.new_of_old[c + 1]));
    sum += static_cast<double>(d);
    mx = std::max(mx, d);
  }
  const auto lr = locality_metrics(chain, p);
  CHECK(lr.mean_neighbor_index_distance == doctest::Approx(sum / 99));
  CHECK(lr.max_bandwidth == mx);

  CHECK_THROWS_AS(locality_metrics(chain, CellPermutation{std::vector<index_t>(100, 0)}), Error);
  CHECK_THROWS_AS(locality_metrics(chain, CellPermutation::identity(99)), Error);
}

TEST_CASE("reordering chains") {
  const TetMesh chain = test::tet_chain(8);
  const auto p = hierarchical_reorder(chain, 2);
  CHECK(p.is_bijection());
  CHECK(locality_metrics(chain, p).max_bandwidth <= 1);

  const TetMesh mixed = shuffled(test::tet_chain(256), 3);
  const auto q = hierarchical_reorder(mixed, 8);
  CHECK(q.is_bijection());
  CHECK(locality_metrics(mixed, q).max_bandwidth <= 16);
  CHECK_THROWS_AS(hierarchical_reorder(chain, 1), Error);
}

TEST_CASE("reordering a shuffled cube mesh") {
  const TetMesh mesh = shuffled(generate_cube_mesh(8), 42);
  const auto before = locality_metrics(mesh, CellPermutation::identity(mesh.n_cells()));
  const auto p = hierarchical_reorder(mesh);
  REQUIRE(p.is_bijection());
  const auto after = locality_metrics(mesh, p);
  CHECK(before.mean_neighbor_index_distance / after.mean_neighbor_index_distance >= 2.0);
  CHECK(static_cast<double>(before.max_bandwidth) / static_cast<double>(after.max_bandwidth) >= 4.0);
  CHECK(after.dof_span_per_batch < before.dof_span_per_batch);

  CHECK(hierarchical_reorder(mesh).new_of_old == p.new_of_old);

  // a second pass does not undo the first
  const TetMesh again = permute_cells(mesh, p.new_of_old);
  const auto second = locality_metrics(again, hierarchical_reorder(again));
  CHECK(second.max_bandwidth <= after.max_bandwidth);
}

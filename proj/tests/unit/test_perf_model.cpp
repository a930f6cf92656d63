#include <limits>

#include "doctest.h"
#include "tetmf/perf_model.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

const std::vector<int> kAllIds{0, 1, 2, 3, 4, 5};

CostReport model_for(const Discretization& d, int lanes) {
  const int n_q = static_cast<int>(d.cell_rule.size());
  if (d.space() == Space::CG) return predict_cg(d.degree(), lanes, n_q, d.mesh->is_curved());
  return predict_dg(d.degree(), lanes, n_q, static_cast<int>(d.face_rule.size()));
}

CounterValidation measure(const TetMesh& m, int p, Space s) {
  const Discretization d = make_discretization(m, p, s, 1, kAllIds);
  const MatrixFreeOperator<double> op(d, OperatorForm::laplace(), {});
  op.reset_counters();
  op.apply(test::random_vector(d.n_dofs(), 1));
  return validate_against_counters(model_for(d, op.config().resolved_lane_width()), op.counters(), m);
}

}  // namespace

TEST_CASE("pinned model values") {
  const CostReport cg1 = predict_cg(1, 8, 4, false);
  CHECK(cg1.bytes_per_cell == doctest::Approx(22.55).epsilon(1e-12));
  CHECK(cg1.flops_per_cell == doctest::Approx(328.0));
  CHECK(cg1.dofs_per_cell == 4);
  CHECK(cg1.unique_dofs_per_cell == doctest::Approx(0.2));
  CHECK(predict_cg(3, 8, 35, false).flops_per_cell == doctest::Approx(9575.0));
  const CostReport dg1 = predict_dg(1, 8, 4, 3);
  CHECK(dg1.bytes_per_cell == doctest::Approx(123.25).epsilon(1e-12));
  CHECK(dg1.face_flop_share() == doctest::Approx(0.75).epsilon(0.1));
  // per-point Jacobians add 72 bytes per point
  CHECK(predict_cg(2, 8, 14, true).bytes_per_cell - predict_cg(2, 8, 14, false).bytes_per_cell ==
        doctest::Approx(72.0 * 14));
  CHECK(unique_dofs_per_cell(1) == doctest::Approx(0.2));
}

TEST_CASE("model trends") {
  const int nq[] = {0, 4, 14, 35};
  const int nqf[] = {0, 3, 6, 12};
  for (int p = 1; p < 3; ++p) {
    CHECK(predict_cg(p + 1, 8, nq[p + 1], false).flops_per_cell > predict_cg(p, 8, nq[p], false).flops_per_cell);
    CHECK(predict_cg(p + 1, 8, nq[p + 1], false).arithmetic_intensity >
          predict_cg(p, 8, nq[p], false).arithmetic_intensity);
    CHECK(predict_dg(p + 1, 8, nq[p + 1], nqf[p + 1]).bytes_per_cell >
          predict_dg(p, 8, nq[p], nqf[p]).bytes_per_cell);
  }
  for (int p = 1; p <= 3; ++p) {
    const CostReport cg = predict_cg(p, 8, nq[p], false);
    const CostReport dg = predict_dg(p, 8, nq[p], nqf[p]);
    // DG adds the face terms to the same cell work
    CHECK(dg.cell_flops_per_cell == doctest::Approx(cg.flops_per_cell));
    CHECK(dg.flops_per_cell - cg.flops_per_cell ==
          doctest::Approx(2.0 * (32.0 * nqf[p] * dg.dofs_per_cell + 43.0 * nqf[p])));
  }
}

TEST_CASE("roofline limits") {
  const CostReport r = predict_cg(2, 8, 14, false);
  MachineSpec m = MachineSpec::two_socket();
  m.peak_flops = 1e30;
  CHECK(roofline_bound(r, m).limit == Limit::Memory);
  m = MachineSpec::two_socket();
  m.mem_bandwidth = 1e30;
  CHECK(roofline_bound(r, m).limit == Limit::Compute);
  const Roofline b = roofline_bound(r, MachineSpec::two_socket());
  CHECK(b.bound_dofs_per_s == doctest::Approx(std::min(b.compute_bound_dofs_per_s, b.memory_bound_dofs_per_s)));
  CHECK(b.instructions_per_cell > 0);
  CHECK(roofline_bound(predict_cg(3, 8, 35, false), MachineSpec::two_socket()).limit == Limit::Compute);
  m.clock = -1;
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK(std::string(to_string(Limit::Instruction)) == "instruction-bound");
}

TEST_CASE("counters agree with the model") {
  const TetMesh m = generate_cube_mesh(8);
  SUBCASE("CG p3") {
    const auto v = measure(m, 3, Space::CG);
    CHECK(v.within_tolerance);
    CHECK(v.deviation < 0.1);
    CHECK_FALSE(v.boundary_dominated);
  }
  SUBCASE("DG p2 face and cell split") {
    const auto v = measure(m, 2, Space::DG);
    CHECK(v.deviation < 0.1);
    CHECK(std::abs(v.measured_face_share - v.predicted_face_share) < 0.1 * v.predicted_face_share);
  }
  SUBCASE("DG p1 face share") {
    const auto v = measure(m, 1, Space::DG);
    CHECK(std::abs(v.measured_face_share - 0.75) < 0.1);
  }
}

TEST_CASE("tiny meshes are flagged as boundary dominated") {
  const auto v = measure(generate_cube_mesh(1), 1, Space::DG);
  CHECK(v.boundary_dominated);
  CHECK(v.boundary_face_fraction == doctest::Approx(12.0 / 16.0));
}

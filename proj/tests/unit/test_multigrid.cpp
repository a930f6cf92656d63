#include <cmath>

#include "doctest.h"
#include "tetmf/multigrid.hpp"
#include "tetmf/rhs.hpp"
#include "tetmf/studies.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

const std::vector<int> kAllIds{0, 1, 2, 3, 4, 5};

std::vector<const TetMesh*> pointers(const std::vector<TetMesh>& meshes) {
  std::vector<const TetMesh*> p;
  for (const auto& m : meshes) p.push_back(&m);
  return p;
}

double cubic(const Vec3& x) { return x[0] * x[0] * x[1] - 2 * x[2] * x[2] * x[2] + x[0] * x[1] * x[2] + 1; }
double quadratic(const Vec3& x) { return x[0] * x[1] - x[2] * x[2] + 0.5 * x[0] + 2; }
double affine(const Vec3& x) { return 1 + x[0] - 3 * x[1] + 0.25 * x[2]; }

}  // namespace

TEST_CASE("level sequence") {
  const auto meshes = cube_hierarchy(1, 1);
  const OperatorForm form = OperatorForm::laplace();
  SUBCASE("DG p3 with cph") {
    const MultigridPreconditioner mg(pointers(meshes), 3, Space::DG, 1, kAllIds, form, {});
    const auto lv = mg.levels();
    REQUIRE(lv.size() == 5);
    CHECK((lv[4].space == Space::DG && lv[4].degree == 3 && lv[4].transfer == TransferKind::None));
    CHECK((lv[3].space == Space::CG && lv[3].degree == 3 && lv[3].transfer == TransferKind::Continuous));
    CHECK((lv[2].degree == 2 && lv[2].transfer == TransferKind::Degree));
    CHECK((lv[1].degree == 1 && lv[1].mesh_index == 1 && lv[1].transfer == TransferKind::Degree));
    CHECK((lv[0].degree == 1 && lv[0].mesh_index == 0 && lv[0].transfer == TransferKind::Mesh));
  }
  SUBCASE("CG p1 with ph is a pure h hierarchy") {
    MultigridOptions o;
    o.sequence = "ph";
    const MultigridPreconditioner mg(pointers(meshes), 1, Space::CG, 1, kAllIds, form, o);
    const auto lv = mg.levels();
    REQUIRE(lv.size() == 2);
    CHECK(lv[0].transfer == TransferKind::Mesh);
  }
  SUBCASE("h before p") {
    MultigridOptions o;
    o.sequence = "hp";
    const MultigridPreconditioner mg(pointers(meshes), 2, Space::CG, 1, kAllIds, form, o);
    const auto lv = mg.levels();
    REQUIRE(lv.size() == 3);
    CHECK((lv[1].degree == 2 && lv[1].mesh_index == 0 && lv[1].transfer == TransferKind::Mesh));
    CHECK((lv[0].degree == 1 && lv[0].transfer == TransferKind::Degree));
  }
}

TEST_CASE("sequence parsing") {
  CHECK(parse_mg_sequence("cph") == "cph");
  CHECK(parse_mg_sequence("none").empty());
  CHECK_THROWS_AS(parse_mg_sequence("cpx"), Error);
}

TEST_CASE("prolongation is exact on coarse-space polynomials") {
  const auto meshes = cube_hierarchy(1, 1, Deformation::None);
  const std::vector<int> none;
  struct Case {
    int pc, pf;
    Space sc, sf;
    std::size_t mc;
    TransferKind kind;
    double (*f)(const Vec3&);
  };
  const Case cases[] = {
      {3, 3, Space::CG, Space::DG, 1, TransferKind::Continuous, cubic},
      {1, 1, Space::CG, Space::DG, 1, TransferKind::Continuous, affine},
      {2, 3, Space::CG, Space::CG, 1, TransferKind::Degree, quadratic},
      {1, 2, Space::CG, Space::CG, 1, TransferKind::Degree, affine},
      {1, 1, Space::CG, Space::CG, 0, TransferKind::Mesh, affine},
      {3, 3, Space::CG, Space::CG, 0, TransferKind::Mesh, cubic},
      {2, 2, Space::DG, Space::DG, 0, TransferKind::Mesh, quadratic},
  };
  for (const auto& c : cases) {
    CAPTURE(static_cast<int>(c.kind));
    CAPTURE(c.pc);
    const Discretization coarse = make_discretization(meshes[c.mc], c.pc, c.sc, 1, none);
    const Discretization fine = make_discretization(meshes[1], c.pf, c.sf, 1, none);
    const CsrMatrix p = build_prolongation(coarse, fine, c.kind);
    CHECK(p.n_rows == fine.n_dofs());
    CHECK(p.n_cols == coarse.n_dofs());
    const auto uc = interpolate(coarse, c.f);
    const auto uf = interpolate(fine, c.f);
    CHECK(test::relative_difference(spmv(p, uc), uf) < 1e-13);

    // adjointness of the transpose used for restriction
    const auto v = test::random_vector(coarse.n_dofs(), 1);
    const auto w = test::random_vector(fine.n_dofs(), 2);
    const double lhs = test::dot(spmv(p, v), w);
    const double rhs = test::dot(v, spmv(transpose(p), w));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("prolongation zeroes constrained rows and columns") {
  const auto meshes = cube_hierarchy(1, 1);
  const Discretization coarse = make_discretization(meshes[0], 1, Space::CG, 1, kAllIds);
  const Discretization fine = make_discretization(meshes[1], 1, Space::CG, 1, kAllIds);
  const CsrMatrix p = build_prolongation(coarse, fine, TransferKind::Mesh);
  for (std::size_t i = 0; i < p.n_rows; ++i)
    for (auto k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k)
      if (p.values[k] != 0.0) {
        CHECK_FALSE(fine.dofs.constrained(i));
        CHECK_FALSE(coarse.dofs.constrained(p.col_idx[k]));
      }
}

TEST_CASE("V-cycle behaviour") {
  const auto meshes = cube_hierarchy(1, 3);
  const OperatorForm form = OperatorForm::laplace();
  MultigridOptions o;
  o.sequence = "h";
  const MultigridPreconditioner mg(pointers(meshes), 1, Space::CG, 1, kAllIds, form, o);
  const std::size_t n = mg.discretization(mg.n_levels() - 1).n_dofs();

  SUBCASE("zero stays zero") {
    std::vector<double> z(n, 1.0), r(n, 0.0);
    mg.precondition(r, z);
    CHECK(test::max_abs(z) == 0.0);
  }

  SUBCASE("contraction is strong and stationary") {
    const auto b = test::random_vector(n, 7);
    const auto factors = vcycle_contraction(mg, b, 6);
    REQUIRE(factors.size() == 6);
    for (double f : factors) CHECK(f >= 5.0);
    // settles after the first few cycles
    for (std::size_t k = 3; k < factors.size(); ++k)
      CHECK(std::abs(factors[k] / factors[2] - 1) < 0.2);
  }

  SUBCASE("applications per cycle") {
    mg.reset_counts();
    std::vector<double> r = test::random_vector(n, 3), z(n);
    mg.precondition(r, z);
    const auto lv = mg.levels();
    // degree - 1 before, degree after and one residual on every smoothed level
    for (std::size_t l = 1; l < lv.size(); ++l) CHECK(lv[l].operator_applications == 10);
    CHECK(lv[0].operator_applications == 0);
  }

  SUBCASE("MG-CG agrees with Jacobi-CG") {
    const auto b = test::random_vector(n, 8);
    const auto& op = mg.fine_operator();
    const LinearMap<double> a = [&op](std::span<const double> s, std::span<double> y) { op.vmult(y, s); };
    const auto with_mg = cg_solve(n, a, b, {1e-12, 200, true}, mg.as_preconditioner());
    const auto with_jacobi =
        cg_solve(n, a, b, {1e-12, 2000, true}, jacobi_preconditioner(assemble_diagonal(op.discretization(), form)));
    CHECK(test::relative_difference(with_mg.x, with_jacobi.x) < 1e-8);
    CHECK(with_mg.iterations < with_jacobi.iterations);
  }

  SUBCASE("single precision cycle") {
    MultigridOptions o32 = o;
    o32.single_precision = true;
    const MultigridPreconditioner mg32(pointers(meshes), 1, Space::CG, 1, kAllIds, form, o32);
    const auto b = test::random_vector(n, 9);
    const auto f64 = vcycle_contraction(mg, b, 3);
    const auto f32 = vcycle_contraction(mg32, b, 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(f32[k] / f64[k] - 1) < 0.05);
  }
}

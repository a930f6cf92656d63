#include <cmath>
#include <random>

#include "doctest.h"
#include "tetmf/basis.hpp"

using namespace tetmf;

namespace {

// Random polynomial of total degree <= p and its gradient.
struct Poly {
  std::vector<std::array<int, 3>> exps;
  std::vector<double> coef;

  double operator()(const Vec3& x) const {
    double s = 0;
    for (std::size_t m = 0; m < exps.size(); ++m)
      s += coef[m] * std::pow(x[0], exps[m][0]) * std::pow(x[1], exps[m][1]) * std::pow(x[2], exps[m][2]);
    return s;
  }
  Vec3 grad(const Vec3& x) const {
    Vec3 g{0, 0, 0};
    for (std::size_t m = 0; m < exps.size(); ++m)
      for (int k = 0; k < 3; ++k) {
        if (exps[m][k] == 0) continue;
        double t = coef[m] * exps[m][k];
        for (int d = 0; d < 3; ++d) t *= std::pow(x[d], d == k ? exps[m][d] - 1 : exps[m][d]);
        g[k] += t;
      }
    return g;
  }
};

Poly random_poly(int p, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1, 1);
  Poly f;
  for (int a = 0; a <= p; ++a)
    for (int b = 0; a + b <= p; ++b)
      for (int c = 0; a + b + c <= p; ++c) {
        f.exps.push_back({a, b, c});
        f.coef.push_back(dist(rng));
      }
  return f;
}

}  // namespace

TEST_CASE("Lagrange basis is nodal") {
  for (int p = 1; p <= 3; ++p) {
    const LagrangeBasis b(p);
    CHECK(b.size() == dofs_per_cell(p));
    std::vector<double> v(b.size());
    for (int i = 0; i < b.size(); ++i) {
      b.values(b.nodes()[i], v.data());
      for (int j = 0; j < b.size(); ++j) CHECK(std::abs(v[j] - (i == j ? 1.0 : 0.0)) < 1e-13);
    }
  }
  CHECK(dofs_per_cell(3) == 20);
  CHECK_THROWS_AS(LagrangeBasis(4), Error);
}

TEST_CASE("node ordering: vertices, edges, faces, interior") {
  const LagrangeBasis b(3);
  const auto& info = b.node_info();
  for (int i = 0; i < 4; ++i) CHECK(info[i].kind == NodeInfo::Kind::Vertex);
  for (int i = 4; i < 16; ++i) CHECK(info[i].kind == NodeInfo::Kind::Edge);
  for (int i = 16; i < 20; ++i) CHECK(info[i].kind == NodeInfo::Kind::Face);
  for (int i = 0; i < 4; ++i) CHECK(b.nodes()[i] == ref::vertices[i]);
}

TEST_CASE("tabulated matrices: partition of unity and gradient sums") {
  for (int p = 1; p <= 3; ++p) {
    const auto cell = make_cell_quadrature(p, QuadratureVariant::Standard);
    const auto face = make_face_quadrature(p);
    const BasisTable t = tabulate_basis(p, cell, face);
    const int n = t.n_dofs;
    CHECK(t.value_matrix.size() == static_cast<std::size_t>(t.n_q * n));
    CHECK(t.grad_matrix.size() == static_cast<std::size_t>(3 * t.n_q * n));
    for (int q = 0; q < t.n_q; ++q) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += t.value_matrix[q * n + j];
      CHECK(std::abs(s - 1) < 1e-13);
      for (int k = 0; k < 3; ++k) {
        double g = 0;
        for (int j = 0; j < n; ++j) g += t.grad_matrix[(3 * q + k) * n + j];
        CHECK(std::abs(g) < 1e-13);
      }
    }
    for (int f = 0; f < 4; ++f)
      for (int o = 0; o < FaceOrientation::n_codes; ++o) {
        const auto& fv = t.face_values(f, o);
        for (int q = 0; q < t.n_qf; ++q) {
          double s = 0;
          for (int j = 0; j < n; ++j) s += fv[q * n + j];
          CHECK(std::abs(s - 1) < 1e-13);
        }
      }
  }
  // E_e of the gradient at p = 3 is 105 x 20
  const BasisTable t3 = tabulate_basis(3, make_cell_quadrature(3, QuadratureVariant::Standard), {});
  CHECK(3 * t3.n_q == 105);
  CHECK(t3.n_dofs == 20);
  CHECK(t3.n_qf == 0);
}

TEST_CASE("p = 1 values and gradients") {
  const BasisTable t = tabulate_basis(1, tet_rule(1), {});
  REQUIRE(t.n_q == 1);
  for (int j = 0; j < 4; ++j) CHECK(t.value_matrix[j] == doctest::Approx(0.25).epsilon(1e-14));
  const BasisTable t2 = tabulate_basis(1, tet_rule(2), {});
  for (int q = 0; q < t2.n_q; ++q)
    for (int k = 0; k < 3; ++k) CHECK(t2.grad_matrix[(3 * q + k) * 4 + 0] == doctest::Approx(-1.0));
}

TEST_CASE("interpolation and gradient exactness for polynomials of degree p") {
  for (int p = 1; p <= 3; ++p) {
    const LagrangeBasis b(p);
    const auto rule = tet_rule(7);
    const BasisTable t = tabulate_basis(p, rule, {});
    const int n = t.n_dofs;
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const Poly f = random_poly(p, seed);
      std::vector<double> u(n);
      for (int j = 0; j < n; ++j) u[j] = f(b.nodes()[j]);
      for (int q = 0; q < t.n_q; ++q) {
        double v = 0;
        Vec3 g{0, 0, 0};
        for (int j = 0; j < n; ++j) {
          v += t.value_matrix[q * n + j] * u[j];
          for (int k = 0; k < 3; ++k) g[k] += t.grad_matrix[(3 * q + k) * n + j] * u[j];
        }
        CHECK(std::abs(v - f(rule.points[q])) < 1e-12);
        const Vec3 ge = f.grad(rule.points[q]);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(g[k] - ge[k]) < 1e-11);
      }
    }
  }
}

TEST_CASE("face points follow the orientation codes") {
  const auto face_rule = make_face_quadrature(2);
  const BasisTable t = tabulate_basis(2, make_cell_quadrature(2, QuadratureVariant::Standard), face_rule);
  for (int f = 0; f < 4; ++f)
    for (int o = 0; o < FaceOrientation::n_codes; ++o) {
      const auto& perm = FaceOrientation(o).perm();
      for (int q = 0; q < t.n_qf; ++q) {
        const double s = face_rule.points[q][0], tt = face_rule.points[q][1];
        const double lambda_minus[3] = {1 - s - tt, s, tt};
        // plus vertex i sits where minus vertex perm[i] is
        Vec3 expected{0, 0, 0};
        for (int i = 0; i < 3; ++i)
          expected = expected + lambda_minus[perm[i]] * ref::vertices[ref::faces[f][i]];
        const Vec3& got = t.face_points[BasisTable::face_index(f, o)][q];
        for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - expected[k]) < 1e-14);
      }
    }
}

TEST_CASE("orientation codes form the symmetric group of the triangle") {
  for (int a = 0; a < 6; ++a) {
    const FaceOrientation oa(a);
    CHECK(oa.compose(oa.inverse()) == FaceOrientation(0));
    for (int b = 0; b < 6; ++b) {
      const FaceOrientation c = oa.compose(FaceOrientation(b));
      for (int i = 0; i < 3; ++i) CHECK(c.perm()[i] == oa.perm()[FaceOrientation(b).perm()[i]]);
    }
  }
}

#include <cmath>

#include "doctest.h"
#include "tetmf/quadrature.hpp"

using namespace tetmf;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b z^c over the reference tetrahedron.
double tet_moment(int a, int b, int c) { return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3); }

// Integral of s^a t^b over the reference triangle.
double triangle_moment(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double integrate(const QuadratureRule& r, int a, int b, int c) {
  double s = 0;
  for (std::size_t q = 0; q < r.size(); ++q)
    s += r.weights[q] * std::pow(r.points[q][0], a) * std::pow(r.points[q][1], b) * std::pow(r.points[q][2], c);
  return s;
}

}  // namespace

TEST_CASE("tetrahedral rules integrate monomials up to their degree") {
  for (int degree = 0; degree <= 7; ++degree) {
    const QuadratureRule r = tet_rule(degree);
    CAPTURE(degree);
    CHECK(r.dim == 3);
    CHECK(r.exactness_degree >= degree);
    double sum = 0;
    for (double w : r.weights) {
      CHECK(w > 0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0 / 6).epsilon(1e-14));
    for (const Vec3& x : r.points) {
      CHECK(x[0] >= 0);
      CHECK(x[1] >= 0);
      CHECK(x[2] >= 0);
      CHECK(x[0] + x[1] + x[2] <= 1 + 1e-14);
    }
    for (int a = 0; a <= r.exactness_degree; ++a)
      for (int b = 0; a + b <= r.exactness_degree; ++b)
        for (int c = 0; a + b + c <= r.exactness_degree; ++c)
          CHECK(std::abs(integrate(r, a, b, c) - tet_moment(a, b, c)) < 1e-12);
  }
}

TEST_CASE("triangle rules integrate monomials up to their degree") {
  for (int degree = 0; degree <= 6; ++degree) {
    const QuadratureRule r = triangle_rule(degree);
    CAPTURE(degree);
    CHECK(r.dim == 2);
    CHECK(r.exactness_degree >= degree);
    double sum = 0;
    for (double w : r.weights) {
      CHECK(w > 0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    for (const Vec3& x : r.points) CHECK(x[2] == 0.0);
    for (int a = 0; a <= r.exactness_degree; ++a)
      for (int b = 0; a + b <= r.exactness_degree; ++b)
        CHECK(std::abs(integrate(r, a, b, 0) - triangle_moment(a, b)) < 1e-12);
  }
}

TEST_CASE("out of range degrees are rejected") {
  CHECK_THROWS_AS(tet_rule(8), Error);
  CHECK_THROWS_AS(tet_rule(-1), Error);
  CHECK_THROWS_AS(triangle_rule(7), Error);
  CHECK_THROWS_AS(make_cell_quadrature(4, QuadratureVariant::Standard), Error);
  CHECK_THROWS_AS(make_face_quadrature(0), Error);
}

TEST_CASE("cell rules per degree and variant") {
  for (int p = 1; p <= 3; ++p) {
    CHECK(make_cell_quadrature(p, QuadratureVariant::Standard).exactness_degree >= 2 * p);
    CHECK(make_cell_quadrature(p, QuadratureVariant::Modified).exactness_degree >= std::max(2 * p - 2, 1));
    CHECK(make_cell_quadrature(p, QuadratureVariant::Modified).size() <=
          make_cell_quadrature(p, QuadratureVariant::Standard).size());
    CHECK(make_face_quadrature(p).exactness_degree >= 2 * p);
  }
  // 105 x 20 gradient matrix at p = 3
  CHECK(make_cell_quadrature(3, QuadratureVariant::Standard).size() == 35);

  const QuadratureRule m2 = make_cell_quadrature(2, QuadratureVariant::Modified);
  CHECK(m2.exactness_degree == 2);
  CHECK(integrate(m2, 1, 1, 0) == doctest::Approx(1.0 / 120).epsilon(1e-14));

  const QuadratureRule f3 = make_face_quadrature(3);
  CHECK(integrate(f3, 6, 0, 0) == doctest::Approx(1.0 / 56).epsilon(1e-13));
  CHECK(make_face_quadrature(1).exactness_degree == 2);
}

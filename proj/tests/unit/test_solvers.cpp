#include <cmath>

#include "doctest.h"
#include "tetmf/operator.hpp"
#include "tetmf/solvers.hpp"
#include "tetmf/sparse.hpp"
#include "test_support.hpp"

using namespace tetmf;

namespace {

LinearMap<double> csr_map(const CsrMatrix& a) {
  return [&a](std::span<const double> src, std::span<double> dst) { spmv(a, src, dst); };
}

// Gaussian elimination with partial pivoting on a dense copy.
std::vector<double> dense_solve(const CsrMatrix& a, std::vector<double> b) {
  const std::size_t n = a.n_rows;
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a.at(i, j);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
    for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i * n + k] / m[k * n + k];
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * x[j];
    x[i] = s / m[i * n + i];
  }
  return x;
}

}  // namespace

TEST_CASE("CG on the identity converges in one step") {
  const std::size_t n = 17;
  const auto b = test::random_vector(n, 1);
  const auto id = [](std::span<const double> s, std::span<double> d) { std::copy(s.begin(), s.end(), d.begin()); };
  const SolveResult r = cg_solve(n, id, b, {1e-12, 10, true});
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK(test::relative_difference(r.x, b) < 1e-15);
  CHECK(r.residuals.size() == 2);
}

TEST_CASE("CG matches a dense solve") {
  const TetMesh m = generate_cube_mesh(1);
  const std::vector<int> none;
  const Discretization d = make_discretization(m, 1, Space::CG, 1, none);
  const OperatorForm form = OperatorForm::helmholtz({1.0, 1.0});
  const CsrMatrix a = assemble(d, form);
  REQUIRE(a.n_rows == 8);
  const auto b = test::random_vector(8, 2);
  const auto oracle = dense_solve(a, b);
  const SolveResult r = cg_solve(8, csr_map(a), b, {1e-14, 100, true});
  CHECK(test::relative_difference(r.x, oracle) < 1e-12);
  CHECK(r.iterations <= 8);
  DenseCholesky chol(a);
  std::vector<double> x(8);
  chol.solve(b, x);
  CHECK(test::relative_difference(x, oracle) < 1e-12);
  const auto x0 = oracle;
  const SolveResult warm = cg_solve(8, csr_map(a), b, {1e-10, 100, true}, {}, x0);
  CHECK(warm.iterations == 0);
}

TEST_CASE("Jacobi solves a mass-dominated DG system in few iterations") {
  const TetMesh m = generate_cube_mesh(2);
  const std::vector<int> ids{0, 1, 2, 3, 4, 5};
  const Discretization d = make_discretization(m, 1, Space::DG, 1, ids);
  const OperatorForm form = OperatorForm::helmholtz({1e6, 1.0});
  const MatrixFreeOperator<double> op(d, form, {});
  const auto diag = assemble_diagonal(d, form);
  const auto b = test::random_vector(d.n_dofs(), 3);
  const LinearMap<double> a = [&op](std::span<const double> s, std::span<double> y) { op.vmult(y, s); };
  const SolveResult r = cg_solve(d.n_dofs(), a, b, {1e-8, 50, true}, jacobi_preconditioner(diag));
  CHECK(r.iterations <= 5);
  const auto ax = op.apply(r.x);
  double res = 0, nb = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    res += (ax[i] - b[i]) * (ax[i] - b[i]);
    nb += b[i] * b[i];
  }
  CHECK(std::sqrt(res / nb) < 1e-8);
}

TEST_CASE("CG failure modes") {
  const std::size_t n = 5;
  const auto b = test::random_vector(n, 4);
  const auto neg = [](std::span<const double> s, std::span<double> d) {
    for (std::size_t i = 0; i < s.size(); ++i) d[i] = -s[i];
  };
  CHECK_THROWS_AS(cg_solve(n, neg, b, {}), NumericalError);
  // diagonal with spread-out spectrum cannot converge in two steps
  const auto diag = [](std::span<const double> s, std::span<double> d) {
    for (std::size_t i = 0; i < s.size(); ++i) d[i] = (i + 1.0) * s[i];
  };
  CHECK_THROWS_AS(cg_solve(n, diag, b, {1e-12, 2, true}), NumericalError);
  const SolveResult r = cg_solve(n, diag, b, {1e-12, 2, false});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  std::vector<double> short_b(n - 1);
  CHECK_THROWS(cg_solve(n, diag, short_b, {}));
}

TEST_CASE("n10 interpolates the residual history") {
  std::vector<double> geometric(12);
  for (std::size_t k = 0; k < geometric.size(); ++k) geometric[k] = std::pow(10.0, -static_cast<double>(k));
  CHECK(n10(geometric) == doctest::Approx(10.0));
  std::vector<double> halves(12);
  for (std::size_t k = 0; k < halves.size(); ++k) halves[k] = std::pow(10.0, -2.0 * k);
  CHECK(n10(halves) == doctest::Approx(5.0));
  // 1e10 is crossed between iterations 3 and 4 at log10 = -10: 3 + 1/3
  const std::vector<double> uneven{1.0, 1e-3, 1e-6, 1e-9, 1e-12};
  CHECK(n10(uneven) == doctest::Approx(3.0 + 1.0 / 3.0));
  const std::vector<double> stalled{1.0, 1e-3, 1e-6};
  CHECK_THROWS_AS(n10(stalled), NumericalError);
}

TEST_CASE("Chebyshev smoothing reduces the error") {
  const TetMesh m = generate_cube_mesh(2);
  const std::vector<int> ids{0, 1, 2, 3, 4, 5};
  const Discretization d = make_discretization(m, 2, Space::CG, 1, ids);
  const CsrMatrix a = assemble(d, OperatorForm::laplace());
  const auto diag = extract_diagonal(a);
  const ChebyshevSmoother<double> smoother(csr_map(a), diag, {});
  // lambda_max of D^-1 A is bounded by the Gershgorin estimate
  double gersh = 0;
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    double s = 0;
    for (auto k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += std::abs(a.values[k]);
    gersh = std::max(gersh, s / diag[i]);
  }
  CHECK(smoother.lambda_estimate() > 0);
  CHECK(smoother.lambda_estimate() <= gersh * (1 + 1e-12));
  CHECK(smoother.lambda_max() == doctest::Approx(1.1 * smoother.lambda_estimate()));
  CHECK(smoother.applications(true) == 4);
  CHECK(smoother.applications(false) == 5);

  const auto exact = test::random_vector(a.n_rows, 5);
  const auto b = spmv(a, exact);
  std::vector<double> x(a.n_rows, 0.0);
  auto err = [&] {
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = x[i] - exact[i];
    return std::sqrt(test::dot(e, spmv(a, e)));
  };
  double prev = err();
  smoother.smooth(b, x, true);
  for (int k = 0; k < 3; ++k) {
    const double now = err();
    CHECK(now < prev);
    prev = now;
    smoother.smooth(b, x, false);
  }
}

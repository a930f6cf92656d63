#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tetmf/sparse.hpp"
#include "tetmf/types.hpp"

namespace tetmf {

/// dst = A src
template <class Number>
using LinearMap = std::function<void(std::span<const Number> src, std::span<Number> dst)>;

struct SolverControl {
  double rel_tol = 1e-10;
  int max_iterations = 1000;
  /// Stop at rel_tol instead of throwing when max_iterations is reached.
  bool throw_on_failure = true;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  /// Residual norms, entry k after k iterations.
  std::vector<double> residuals;
  bool converged = false;
};

/// Preconditioned conjugate gradients from x = 0, or from x0 when given.
/// Throws NumericalError when p^T A p <= 0 and, with throw_on_failure,
/// when the tolerance is not met within max_iterations.
SolveResult cg_solve(std::size_t n, const LinearMap<double>& a, std::span<const double> b, const SolverControl& control,
                     const LinearMap<double>& precond = {}, std::span<const double> x0 = {});

/// z = D^-1 r
LinearMap<double> jacobi_preconditioner(std::vector<double> diagonal);

struct ChebyshevOptions {
  int degree = 5;
  double alpha = 30.0;
  int power_iterations = 20;
  double safety = 1.1;
  std::uint64_t seed = 42;
};

/// Chebyshev iteration on D^-1 A over [lambda_max / alpha, lambda_max].
template <class Number>
class ChebyshevSmoother {
 public:
  using Options = ChebyshevOptions;

  ChebyshevSmoother() = default;
  /// Estimates lambda_max by power iteration with the Rayleigh quotient.
  ChebyshevSmoother(LinearMap<Number> a, std::vector<Number> diagonal, Options options);

  /// degree steps towards A x = b. A zero initial guess saves one operator
  /// application.
  void smooth(std::span<const Number> b, std::span<Number> x, bool x_is_zero) const;
  /// Operator applications of one smooth() call.
  int applications(bool x_is_zero) const { return x_is_zero ? options_.degree - 1 : options_.degree; }
  double lambda_max() const { return lambda_max_; }
  double lambda_estimate() const { return lambda_estimate_; }

 private:
  LinearMap<Number> a_;
  std::vector<Number> inv_diag_;
  Options options_;
  double lambda_estimate_ = 0;
  double lambda_max_ = 0;
};

extern template class ChebyshevSmoother<double>;
extern template class ChebyshevSmoother<float>;

/// Fractional iterations to reduce the residual by 1e10, interpolating
/// log10 of the residual linearly between the bracketing iterations.
/// Throws NumericalError when the history does not reach the reduction.
double n10(std::span<const double> residuals);

/// Dense Cholesky factorization of a symmetric positive definite matrix.
class DenseCholesky {
 public:
  explicit DenseCholesky(const CsrMatrix& a);
  std::size_t size() const { return n_; }
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  std::size_t n_;
  std::vector<double> l_;
};

}  // namespace tetmf

#include "tetmf/solvers.hpp"

#include <cmath>
#include <random>
#include <string>

namespace tetmf {

namespace {

template <class Number>
double dot(std::span<const Number> a, std::span<const Number> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

}  // namespace

SolveResult cg_solve(std::size_t n, const LinearMap<double>& a, std::span<const double> b, const SolverControl& control,
                     const LinearMap<double>& precond, std::span<const double> x0) {
  if (b.size() != n || (!x0.empty() && x0.size() != n)) throw DimensionMismatch("cg_solve: vector length mismatch");
  SolveResult res;
  res.x.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  if (!x0.empty()) {
    res.x.assign(x0.begin(), x0.end());
    a(res.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] -= q[i];
  }
  const double bnorm = std::sqrt(dot<double>(b, b));
  double rnorm = std::sqrt(dot<double>(r, r));
  res.residuals.push_back(rnorm);
  const double target = control.rel_tol * (bnorm > 0 ? bnorm : 1.0);
  if (rnorm <= target) {
    res.converged = true;
    return res;
  }
  auto apply_precond = [&] {
    if (precond)
      precond(r, z);
    else
      z = r;
  };
  apply_precond();
  p = z;
  double rz = dot<double>(r, z);
  for (int it = 1; it <= control.max_iterations; ++it) {
    a(p, q);
    const double pq = dot<double>(p, q);
    if (!(pq > 0)) throw NumericalError("cg_solve: operator not positive definite (p^T A p = " + std::to_string(pq) + ")");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = std::sqrt(dot<double>(r, r));
    res.residuals.push_back(rnorm);
    res.iterations = it;
    if (!std::isfinite(rnorm)) throw NumericalError("cg_solve: residual is not finite");
    if (rnorm <= target) {
      res.converged = true;
      return res;
    }
    apply_precond();
    const double rz_new = dot<double>(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (control.throw_on_failure)
    throw NumericalError("cg_solve: no convergence after " + std::to_string(control.max_iterations) +
                         " iterations, relative residual " + std::to_string(rnorm / (bnorm > 0 ? bnorm : 1.0)));
  return res;
}

LinearMap<double> jacobi_preconditioner(std::vector<double> diagonal) {
  for (std::size_t i = 0; i < diagonal.size(); ++i)
    if (!(diagonal[i] != 0)) throw NumericalError("zero diagonal entry in row " + std::to_string(i));
  return [d = std::move(diagonal)](std::span<const double> r, std::span<double> z) {
    for (std::size_t i = 0; i < d.size(); ++i) z[i] = r[i] / d[i];
  };
}

template <class Number>
ChebyshevSmoother<Number>::ChebyshevSmoother(LinearMap<Number> a, std::vector<Number> diagonal, Options options)
    : a_(std::move(a)), options_(options) {
  if (options_.degree < 1) throw Error("Chebyshev degree must be positive");
  const std::size_t n = diagonal.size();
  inv_diag_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(diagonal[i] > 0)) throw NumericalError("non-positive diagonal entry in row " + std::to_string(i));
    inv_diag_[i] = Number(1) / diagonal[i];
  }
  std::mt19937_64 rng(options_.seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<Number> v(n), av(n);
  for (auto& x : v) x = static_cast<Number>(dist(rng));
  double lambda = 0;
  for (int it = 0; it < options_.power_iterations; ++it) {
    // D-normalized iterate of D^-1 A
    double dn = 0;
    for (std::size_t i = 0; i < n; ++i) dn += static_cast<double>(v[i]) * v[i] * diagonal[i];
    const double s = 1.0 / std::sqrt(dn);
    for (auto& x : v) x = static_cast<Number>(x * s);
    a_(v, av);
    lambda = dot<Number>(v, av);
    for (std::size_t i = 0; i < n; ++i) v[i] = av[i] * inv_diag_[i];
  }
  lambda_estimate_ = lambda;
  lambda_max_ = options_.safety * lambda;
}

template <class Number>
void ChebyshevSmoother<Number>::smooth(std::span<const Number> b, std::span<Number> x, bool x_is_zero) const {
  const std::size_t n = inv_diag_.size();
  const double hi = lambda_max_, lo = lambda_max_ / options_.alpha;
  const double theta = 0.5 * (hi + lo), delta = 0.5 * (hi - lo);
  const double sigma = theta / delta;
  double rho = 1.0 / sigma;
  std::vector<Number> r(n), d(n);
  if (x_is_zero) {
    std::fill(x.begin(), x.end(), Number(0));
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i];
  } else {
    a_(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = static_cast<Number>(inv_diag_[i] * r[i] / theta);
    x[i] += d[i];
  }
  for (int k = 1; k < options_.degree; ++k) {
    const double rho_new = 1.0 / (2.0 * sigma - rho);
    a_(x, r);
    const Number c1 = static_cast<Number>(rho_new * rho), c2 = static_cast<Number>(2.0 * rho_new / delta);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = c1 * d[i] + c2 * inv_diag_[i] * (b[i] - r[i]);
      x[i] += d[i];
    }
    rho = rho_new;
  }
}

template class ChebyshevSmoother<double>;
template class ChebyshevSmoother<float>;

double n10(std::span<const double> residuals) {
  if (residuals.empty() || !(residuals[0] > 0)) throw NumericalError("n10: empty or zero residual history");
  const double target = std::log10(residuals[0]) - 10.0;
  for (std::size_t k = 1; k < residuals.size(); ++k) {
    if (residuals[k] > 0 && std::log10(residuals[k]) > target) continue;
    if (residuals[k] <= 0) return static_cast<double>(k);
    const double lo = std::log10(residuals[k - 1]), hi = std::log10(residuals[k]);
    return static_cast<double>(k - 1) + (lo - target) / (lo - hi);
  }
  throw NumericalError("n10: residual history does not reach a reduction of 1e10");
}

DenseCholesky::DenseCholesky(const CsrMatrix& a) : n_(a.n_rows) {
  if (a.n_rows != a.n_cols) throw DimensionMismatch("DenseCholesky: matrix is not square");
  l_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) l_[i * n_ + a.col_idx[k]] = a.values[k];
  for (std::size_t k = 0; k < n_; ++k) {
    double* lk = &l_[k * n_];
    double d = lk[k];
    for (std::size_t s = 0; s < k; ++s) d -= lk[s] * lk[s];
    if (!(d > 0)) throw NumericalError("DenseCholesky: matrix not positive definite at row " + std::to_string(k));
    lk[k] = std::sqrt(d);
    for (std::size_t i = k + 1; i < n_; ++i) {
      double* li = &l_[i * n_];
      double v = li[k];
      for (std::size_t s = 0; s < k; ++s) v -= li[s] * lk[s];
      li[k] = v / lk[k];
    }
  }
}

void DenseCholesky::solve(std::span<const double> b, std::span<double> x) const {
  if (b.size() != n_ || x.size() != n_) throw DimensionMismatch("DenseCholesky::solve: vector length mismatch");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t s = 0; s < i; ++s) y[i] -= l_[i * n_ + s] * y[s];
    y[i] /= l_[i * n_ + i];
  }
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t s = i + 1; s < n_; ++s) y[i] -= l_[s * n_ + i] * y[s];
    y[i] /= l_[i * n_ + i];
  }
  std::copy(y.begin(), y.end(), x.begin());
}

}  // namespace tetmf

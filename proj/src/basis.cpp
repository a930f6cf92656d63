#include "tetmf/basis.hpp"

#include <cmath>
#include <string>

namespace tetmf {

namespace {

// Dense solve of A X = B in place, A is n x n, B is n x m (row-major).
void solve_dense(std::vector<double> a, std::vector<double>& b, int n, int m) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (std::abs(a[piv * n + k]) < 1e-14) throw NumericalError("singular Vandermonde matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      for (int j = 0; j < m; ++j) std::swap(b[k * m + j], b[piv * m + j]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      for (int j = 0; j < m; ++j) b[i * m + j] -= f * b[k * m + j];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j < m; ++j) {
      double s = b[k * m + j];
      for (int i = k + 1; i < n; ++i) s -= a[k * n + i] * b[i * m + j];
      b[k * m + j] = s / a[k * n + k];
    }
  }
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) throw Error("unsupported polynomial degree " + std::to_string(degree));
  const double h = 1.0 / degree;
  for (int v = 0; v < 4; ++v) {
    nodes_.push_back(ref::vertices[v]);
    info_.push_back({NodeInfo::Kind::Vertex, v, 0});
  }
  for (int e = 0; e < 6; ++e) {
    const Vec3& a = ref::vertices[ref::edges[e][0]];
    const Vec3& b = ref::vertices[ref::edges[e][1]];
    for (int k = 1; k < degree; ++k) {
      nodes_.push_back(a + (k * h) * (b - a));
      info_.push_back({NodeInfo::Kind::Edge, e, k - 1});
    }
  }
  if (degree == 3) {
    for (int f = 0; f < 4; ++f) {
      const auto& fv = ref::faces[f];
      Vec3 c{0, 0, 0};
      for (int k = 0; k < 3; ++k) c = c + (1.0 / 3.0) * ref::vertices[fv[k]];
      nodes_.push_back(c);
      info_.push_back({NodeInfo::Kind::Face, f, 0});
    }
  }

  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      for (int c = 0; a + b + c <= degree; ++c) exponents_.push_back({a, b, c});

  const int n = size();
  // V[i][m] = mono_m(node_i); coefficients = V^{-1}
  std::vector<double> vand(n * n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) {
      const auto& ex = exponents_[m];
      vand[i * n + m] = ipow(nodes_[i][0], ex[0]) * ipow(nodes_[i][1], ex[1]) * ipow(nodes_[i][2], ex[2]);
    }
  coefficients_.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) coefficients_[i * n + i] = 1.0;
  solve_dense(vand, coefficients_, n, n);
}

void LagrangeBasis::values(const Vec3& x, double* values) const {
  const int n = size();
  for (int j = 0; j < n; ++j) values[j] = 0.0;
  for (int m = 0; m < n; ++m) {
    const auto& ex = exponents_[m];
    const double mono = ipow(x[0], ex[0]) * ipow(x[1], ex[1]) * ipow(x[2], ex[2]);
    for (int j = 0; j < n; ++j) values[j] += coefficients_[m * n + j] * mono;
  }
}

void LagrangeBasis::gradients(const Vec3& x, double* grads) const {
  const int n = size();
  for (int j = 0; j < 3 * n; ++j) grads[j] = 0.0;
  for (int m = 0; m < n; ++m) {
    const auto& ex = exponents_[m];
    double d[3];
    for (int k = 0; k < 3; ++k) {
      if (ex[k] == 0) {
        d[k] = 0.0;
        continue;
      }
      double v = ex[k];
      for (int l = 0; l < 3; ++l) v *= ipow(x[l], l == k ? ex[l] - 1 : ex[l]);
      d[k] = v;
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < 3; ++k) grads[3 * j + k] += coefficients_[m * n + j] * d[k];
  }
}

namespace {

void tabulate_points(const LagrangeBasis& basis, const std::vector<Vec3>& points, std::vector<double>& values,
                     std::vector<double>& grads) {
  const int n = basis.size();
  const int nq = static_cast<int>(points.size());
  values.assign(nq * n, 0.0);
  grads.assign(3 * nq * n, 0.0);
  std::vector<double> g(3 * n);
  for (int q = 0; q < nq; ++q) {
    basis.values(points[q], values.data() + q * n);
    basis.gradients(points[q], g.data());
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < 3; ++k) grads[(3 * q + k) * n + j] = g[3 * j + k];
  }
}

}  // namespace

BasisTable tabulate_basis(int p, const QuadratureRule& cell_rule, const QuadratureRule& face_rule) {
  LagrangeBasis basis(p);
  BasisTable t;
  t.degree = p;
  t.n_dofs = basis.size();
  t.n_q = static_cast<int>(cell_rule.size());
  t.n_qf = static_cast<int>(face_rule.size());
  tabulate_points(basis, cell_rule.points, t.value_matrix, t.grad_matrix);
  if (t.n_qf == 0) return t;

  const int n_tables = 4 * FaceOrientation::n_codes;
  t.face_value_matrices.resize(n_tables);
  t.face_grad_matrices.resize(n_tables);
  t.face_points.resize(n_tables);
  for (int f = 0; f < 4; ++f)
    for (int o = 0; o < FaceOrientation::n_codes; ++o) {
      const int idx = BasisTable::face_index(f, o);
      auto& pts = t.face_points[idx];
      for (const Vec3& st : face_rule.points) {
        const auto pl = plus_side_point(FaceOrientation(o), st[0], st[1]);
        pts.push_back(ref::face_to_cell(f, pl[0], pl[1]));
      }
      tabulate_points(basis, pts, t.face_value_matrices[idx], t.face_grad_matrices[idx]);
    }
  return t;
}

}  // namespace tetmf

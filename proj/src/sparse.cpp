#include "tetmf/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "tetmf/element_matrices.hpp"

namespace tetmf {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto b = col_idx.begin() + row_ptr[i], e = col_idx.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(b, e, static_cast<index_t>(j));
  return it != e && *it == j ? values[it - col_idx.begin()] : 0.0;
}

CsrMatrix CsrMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> t) {
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_ptr.assign(n_rows + 1, 0);
  for (std::size_t i = 0; i < t.size();) {
    if (t[i].row >= n_rows || t[i].col >= n_cols) throw DimensionMismatch("triplet index out of range");
    double v = 0;
    std::size_t k = i;
    for (; k < t.size() && t[k].row == t[i].row && t[k].col == t[i].col; ++k) v += t[k].value;
    m.col_idx.push_back(t[i].col);
    m.values.push_back(v);
    ++m.row_ptr[t[i].row + 1];
    i = k;
  }
  for (std::size_t r = 0; r < n_rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

namespace {

template <class Sink>
void for_each_element(const Discretization& disc, const OperatorForm& form, Sink&& add) {
  const TetMesh& mesh = *disc.mesh;
  const DoFMap& d = disc.dofs;
  const ElementMatrices em(disc, form);
  const int n = em.n();
  const int nc = d.n_components;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto k = em.cell(c);
    const auto cd = d.dofs(c);
    for (int comp = 0; comp < nc; ++comp)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) add(cd[comp * n + i], cd[comp * n + j], k[i * n + j]);
  }
  if (!em.has_faces()) return;
  for (std::size_t f = 0; f < mesh.interior_faces.size(); ++f) {
    const auto k = em.interior_face(f);
    const auto dm = d.dofs(mesh.interior_faces[f].cell_minus);
    const auto dp = d.dofs(mesh.interior_faces[f].cell_plus);
    auto idx = [&](int comp, int i) { return i < n ? dm[comp * n + i] : dp[comp * n + i - n]; };
    for (int comp = 0; comp < nc; ++comp)
      for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) add(idx(comp, i), idx(comp, j), k[i * 2 * n + j]);
  }
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    if (!em.dirichlet_faces()[f]) continue;
    const auto k = em.boundary_face(f);
    const auto cd = d.dofs(mesh.boundary_faces[f].cell);
    for (int comp = 0; comp < nc; ++comp)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) add(cd[comp * n + i], cd[comp * n + j], k[i * n + j]);
  }
}

}  // namespace

CsrMatrix assemble(const Discretization& disc, const OperatorForm& form) {
  const DoFMap& d = disc.dofs;
  std::vector<Triplet> t;
  for_each_element(disc, form, [&](index_t i, index_t j, double v) {
    if (d.dirichlet_mask[i] || d.dirichlet_mask[j]) return;
    t.push_back({i, j, v});
  });
  for (std::size_t i = 0; i < d.n_global_dofs; ++i)
    if (d.dirichlet_mask[i]) t.push_back({static_cast<index_t>(i), static_cast<index_t>(i), 1.0});
  return CsrMatrix::from_triplets(d.n_global_dofs, d.n_global_dofs, std::move(t));
}

std::vector<double> assemble_diagonal(const Discretization& disc, const OperatorForm& form) {
  const TetMesh& mesh = *disc.mesh;
  const DoFMap& d = disc.dofs;
  const ElementMatrices em(disc, form);
  const int n = em.n();
  const int nc = d.n_components;
  std::vector<double> diag(d.n_global_dofs, 0.0);
  auto add = [&](std::span<const index_t> dofs, const std::vector<double>& k, int offset) {
    for (int comp = 0; comp < nc; ++comp)
      for (int i = 0; i < n; ++i) diag[dofs[comp * n + i]] += k[offset + i];
  };
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) add(d.dofs(c), em.cell_diagonal(c), 0);
  if (em.has_faces()) {
    for (std::size_t f = 0; f < mesh.interior_faces.size(); ++f) {
      const auto k = em.interior_face_diagonal(f);
      add(d.dofs(mesh.interior_faces[f].cell_minus), k, 0);
      add(d.dofs(mesh.interior_faces[f].cell_plus), k, n);
    }
    for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f)
      if (em.dirichlet_faces()[f]) add(d.dofs(mesh.boundary_faces[f].cell), em.boundary_face_diagonal(f), 0);
  }
  for (std::size_t i = 0; i < d.n_global_dofs; ++i)
    if (d.dirichlet_mask[i]) diag[i] = 1.0;
  return diag;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, bool parallel) {
  if (x.size() != a.n_cols || y.size() != a.n_rows)
    throw DimensionMismatch("spmv: matrix " + std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols) +
                            ", vectors " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  const long n = static_cast<long>(a.n_rows);
#pragma omp parallel for schedule(static) if (parallel)
  for (long i = 0; i < n; ++i) {
    double s = 0;
    for (std::uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n_rows);
  spmv(a, x, y);
  return y;
}

std::vector<double> extract_diagonal(const CsrMatrix& a) {
  if (a.n_rows != a.n_cols) throw DimensionMismatch("extract_diagonal: matrix is not square");
  std::vector<double> d(a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    d[i] = a.at(i, i);
    if (d[i] == 0.0) throw NumericalError("zero diagonal entry in row " + std::to_string(i));
  }
  return d;
}

CsrMatrix transpose(const CsrMatrix& a) {
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      t.push_back({a.col_idx[k], static_cast<index_t>(i), a.values[k]});
  return CsrMatrix::from_triplets(a.n_cols, a.n_rows, std::move(t));
}

double symmetry_defect(const CsrMatrix& a) {
  double m = 0;
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      m = std::max(m, std::abs(a.values[k] - a.at(a.col_idx[k], i)));
  return m;
}

double max_abs(const CsrMatrix& a) {
  double m = 0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

void write_matrix_market(const CsrMatrix& a, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      os << i + 1 << ' ' << a.col_idx[k] + 1 << ' ' << a.values[k] << '\n';
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_matrix_market(a, os);
}

}  // namespace tetmf

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tetmf/discretization.hpp"
#include "tetmf/forms.hpp"

namespace tetmf {

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

/// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint64_t> row_ptr;
  std::vector<index_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  /// 4 nnz + 8 nnz + 8 (n_rows + 1)
  std::size_t memory_bytes() const { return 12 * nnz() + 8 * (n_rows + 1); }
  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  /// Duplicates are summed.
  static CsrMatrix from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> triplets);
};

/// Global matrix of the form on the discretization, built from the element
/// matrices. Constrained rows and columns are zero except for a unit
/// diagonal.
CsrMatrix assemble(const Discretization& disc, const OperatorForm& form);

/// Diagonal of assemble(disc, form) without building the matrix.
std::vector<double> assemble_diagonal(const Discretization& disc, const OperatorForm& form);

/// y = A x. Throws DimensionMismatch. Rows are split across threads when
/// parallel is set; the result does not depend on it.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, bool parallel = false);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);
inline std::uint64_t spmv_flops(const CsrMatrix& a) { return 2 * a.nnz(); }

/// Throws NumericalError naming the first row with a zero diagonal entry.
std::vector<double> extract_diagonal(const CsrMatrix& a);

CsrMatrix transpose(const CsrMatrix& a);

/// max |A - A^T| over all entries.
double symmetry_defect(const CsrMatrix& a);
double max_abs(const CsrMatrix& a);

void write_matrix_market(const CsrMatrix& a, std::ostream& os);
void write_matrix_market(const CsrMatrix& a, const std::string& path);

}  // namespace tetmf

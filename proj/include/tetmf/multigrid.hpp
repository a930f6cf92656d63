#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tetmf/discretization.hpp"
#include "tetmf/forms.hpp"
#include "tetmf/operator.hpp"
#include "tetmf/solvers.hpp"
#include "tetmf/sparse.hpp"

namespace tetmf {

enum class TransferKind { None, Continuous, Degree, Mesh };

struct MultigridOptions {
  /// Tokens c (DG to CG), p (degree k to k-1) and h (mesh coarsening), each
  /// applied as often as possible in the given order.
  std::string sequence = "cph";
  ChebyshevOptions smoother;
  /// Run the V-cycle in single precision.
  bool single_precision = false;
  /// Operator settings of the level operators; precision is set per cycle.
  OperatorConfig operator_config;
  /// Dense Cholesky up to this many coarse DoFs, Jacobi-CG beyond.
  std::size_t direct_limit = 8000;
};

/// Description of one level, coarsest first.
struct LevelInfo {
  Space space;
  int degree;
  std::size_t mesh_index;
  std::size_t n_dofs;
  /// How this level was obtained from the next finer one.
  TransferKind transfer;
  /// Operator applications spent on this level by vcycle().
  std::uint64_t operator_applications;
};

/// Nodal interpolation from the coarse to the fine space, assembled. For
/// Mesh transfers the fine mesh must be refine_uniform(coarse mesh).
/// Rows of constrained fine DoFs and columns of constrained coarse DoFs are
/// zero.
CsrMatrix build_prolongation(const Discretization& coarse, const Discretization& fine, TransferKind kind);

/// Hybrid multigrid V-cycle over c, p and h levels with Chebyshev smoothing
/// (degree-1 applications before, degree after the coarse correction, one
/// residual) and a direct coarse solve.
class MultigridPreconditioner {
 public:
  /// meshes: coarse to fine, each refine_uniform of the previous one. The
  /// finest space lives on meshes.back().
  MultigridPreconditioner(std::vector<const TetMesh*> meshes, int degree, Space space, int n_components,
                          std::vector<int> dirichlet_ids, const OperatorForm& form, const MultigridOptions& options);
  ~MultigridPreconditioner();
  MultigridPreconditioner(MultigridPreconditioner&&) noexcept;

  std::size_t n_levels() const;
  std::vector<LevelInfo> levels() const;
  const Discretization& discretization(std::size_t level) const;
  const CsrMatrix& prolongation(std::size_t level) const;
  /// Fine level operator in double precision.
  const MatrixFreeOperator<double>& fine_operator() const;

  /// One V-cycle on A x = b starting from x (x in/out).
  void vcycle(std::span<const double> b, std::span<double> x, bool x_is_zero = false) const;
  /// z = V(r) from a zero initial guess.
  void precondition(std::span<const double> r, std::span<double> z) const;
  LinearMap<double> as_preconditioner() const;
  void reset_counts() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses a sequence string; throws Error on unknown tokens. "none" yields "".
std::string parse_mg_sequence(const std::string& s);

}  // namespace tetmf

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tetmf/multigrid.hpp"

namespace tetmf {

/// Cube meshes generate_cube_mesh(base) refined 0..max_refinements times.
std::vector<TetMesh> cube_hierarchy(int base_subdivisions, int max_refinements,
                                    Deformation deformation = Deformation::None);

struct ConvergenceOptions {
  Space space = Space::CG;
  int degree = 1;
  Deformation deformation = Deformation::None;
  int base_subdivisions = 1;
  /// Refinement counts of the levels to solve on, ascending.
  std::vector<int> refinements{2, 3, 4};
  std::string mg_sequence = "cph";
  double rel_tol = 1e-9;
  OperatorConfig operator_config;
};

struct ConvergenceRow {
  int refinements = 0;
  std::size_t n_cells = 0;
  std::size_t n_dofs = 0;
  /// Edge length of the cube subdivision, 2 / (base 2^refinements).
  double h = 0;
  int iterations = 0;
  double relative_l2_error = 0;
  /// log2(e_coarse / e_fine) against the previous row; empty on the first.
  std::optional<double> observed_order;
  double seconds = 0;
};

/// Solves -lap u = f for u = sin(3 pi x) sin(3 pi y) sin(3 pi z) on
/// [-1,1]^3 with homogeneous Dirichlet data on every boundary id, using
/// multigrid-preconditioned CG, and reports the relative L2 error per level.
std::vector<ConvergenceRow> convergence_study(const ConvergenceOptions& options);

enum class PreconditionerKind { Multigrid, Jacobi, None };

struct SolveOptions {
  Space space = Space::DG;
  int degree = 1;
  Deformation deformation = Deformation::None;
  int base_subdivisions = 1;
  int refinements = 2;
  PreconditionerKind preconditioner = PreconditionerKind::Multigrid;
  MultigridOptions multigrid;
  SolverControl control{1e-10, 2000, false};
  /// Stationary V-cycle iterations measured after the solve.
  int contraction_cycles = 0;
};

struct SolveReport {
  std::size_t n_cells = 0;
  std::size_t n_dofs = 0;
  int iterations = 0;
  bool converged = false;
  /// Fractional iterations for ten digits; empty if never reached.
  std::optional<double> n10;
  std::vector<double> residuals;
  double relative_l2_error = 0;
  double setup_seconds = 0;
  double solve_seconds = 0;
  /// DoFs solved to ten digits per second and thread.
  std::optional<double> e10;
  std::vector<LevelInfo> levels;
  /// Operator applications per level in one V-cycle.
  std::vector<std::uint64_t> applications_per_cycle;
  std::vector<double> contraction_factors;
};

SolveReport run_solve(const SolveOptions& options);

/// Residual reduction factors ||r_k|| / ||r_k+1|| of the stationary iteration
/// x += V(b - A x) started from zero.
std::vector<double> vcycle_contraction(const MultigridPreconditioner& mg, std::span<const double> b, int cycles);

struct BenchOptions {
  Space space = Space::DG;
  int degree = 1;
  int n_components = 1;
  Deformation deformation = Deformation::None;
  OperatorConfig operator_config;
  std::vector<int> sizes{2, 4};
  int repetitions = 5;
  int warmup = 2;
  bool include_spmv = true;
  std::uint64_t seed = 42;
};

struct BenchRow {
  std::string kind;  // "matrix-free" or "spmv"
  int size = 0;
  std::size_t n_cells = 0;
  std::size_t n_dofs = 0;
  int repetitions = 0;
  double median_seconds = 0;
  double min_seconds = 0;
  double max_seconds = 0;
  double dofs_per_second = 0;
  double flops_per_apply = 0;
  double bytes_per_apply = 0;
  std::size_t memory_bytes = 0;
  /// max |A x| over the random input, a sanity check on the result.
  double result_max_abs = 0;
};

/// Times repeated applications on generate_cube_mesh(size) for each size.
/// Vector problems (3 components) use the Helmholtz form with unit
/// coefficients, scalar problems the Laplace form.
std::vector<BenchRow> run_bench(const BenchOptions& options);

}  // namespace tetmf

#include "tetmf/studies.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "tetmf/rhs.hpp"

namespace tetmf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double norm2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

int thread_count(const OperatorConfig& c) {
  if (c.execution == Execution::Serial) return 1;
  return c.n_threads > 0 ? c.n_threads : omp_get_max_threads();
}

double zero(const Vec3&) { return 0.0; }

}  // namespace

std::vector<TetMesh> cube_hierarchy(int base_subdivisions, int max_refinements, Deformation deformation) {
  if (max_refinements < 0) throw Error("refinement count must be non-negative");
  std::vector<TetMesh> meshes{generate_cube_mesh(base_subdivisions, deformation)};
  for (int r = 0; r < max_refinements; ++r) meshes.push_back(refine_uniform(meshes.back()));
  return meshes;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceOptions& options) {
  if (options.refinements.empty()) throw Error("convergence study needs at least one level");
  if (!std::is_sorted(options.refinements.begin(), options.refinements.end()))
    throw Error("refinement levels must be ascending");
  const auto meshes = cube_hierarchy(options.base_subdivisions, options.refinements.back(), options.deformation);
  const auto exact = manufactured_solution();
  const auto load = manufactured_load();
  const OperatorForm form = OperatorForm::laplace();
  MultigridOptions mgo;
  mgo.sequence = options.mg_sequence;
  mgo.operator_config = options.operator_config;
  std::vector<ConvergenceRow> rows;
  for (int r : options.refinements) {
    const auto t0 = Clock::now();
    std::vector<const TetMesh*> levels;
    for (int k = 0; k <= r; ++k) levels.push_back(&meshes[k]);
    const MultigridPreconditioner mg(levels, options.degree, options.space, 1, boundary_ids(meshes[r]), form, mgo);
    const Discretization& disc = mg.discretization(mg.n_levels() - 1);
    const auto b = assemble_rhs(disc, form, load, zero);
    const auto& op = mg.fine_operator();
    const SolveResult res = cg_solve(
        b.size(), [&](std::span<const double> s, std::span<double> d) { op.vmult(d, s); }, b,
        {options.rel_tol, 1000, true}, mg.as_preconditioner());
    ConvergenceRow row;
    row.refinements = r;
    row.n_cells = meshes[r].n_cells();
    row.n_dofs = disc.n_dofs();
    row.h = 2.0 / (options.base_subdivisions * std::pow(2.0, r));
    row.iterations = res.iterations;
    row.relative_l2_error = l2_error(disc, res.x, exact) / l2_norm(meshes[r], exact);
    if (!rows.empty()) row.observed_order = std::log2(rows.back().relative_l2_error / row.relative_l2_error);
    row.seconds = seconds_since(t0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> vcycle_contraction(const MultigridPreconditioner& mg, std::span<const double> b, int cycles) {
  const auto& op = mg.fine_operator();
  std::vector<double> x(b.size(), 0.0), ax(b.size()), r(b.begin(), b.end()), c(b.size());
  std::vector<double> factors;
  double prev = norm2(r);
  for (int k = 0; k < cycles; ++k) {
    std::fill(c.begin(), c.end(), 0.0);
    mg.vcycle(r, c, true);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c[i];
    op.vmult(ax, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - ax[i];
    const double now = norm2(r);
    if (now == 0) break;
    factors.push_back(prev / now);
    prev = now;
  }
  return factors;
}

SolveReport run_solve(const SolveOptions& options) {
  const auto meshes = cube_hierarchy(options.base_subdivisions, options.refinements, options.deformation);
  const TetMesh& fine = meshes.back();
  const OperatorForm form = OperatorForm::laplace();
  const auto ids = boundary_ids(fine);
  const auto exact = manufactured_solution();
  SolveReport rep;
  rep.n_cells = fine.n_cells();

  const auto t0 = Clock::now();
  std::unique_ptr<MultigridPreconditioner> mg;
  std::unique_ptr<Discretization> own_disc;
  std::unique_ptr<MatrixFreeOperator<double>> own_op;
  LinearMap<double> precond;
  const Discretization* disc = nullptr;
  const MatrixFreeOperator<double>* op = nullptr;
  if (options.preconditioner == PreconditionerKind::Multigrid) {
    std::vector<const TetMesh*> levels;
    for (const auto& m : meshes) levels.push_back(&m);
    mg = std::make_unique<MultigridPreconditioner>(levels, options.degree, options.space, 1, ids, form,
                                                   options.multigrid);
    disc = &mg->discretization(mg->n_levels() - 1);
    op = &mg->fine_operator();
    precond = mg->as_preconditioner();
  } else {
    own_disc = std::make_unique<Discretization>(make_discretization(fine, options.degree, options.space, 1, ids,
                                                                    options.multigrid.operator_config.quadrature));
    OperatorConfig cfg = options.multigrid.operator_config;
    cfg.precision = Precision::F64;
    own_op = std::make_unique<MatrixFreeOperator<double>>(*own_disc, form, cfg);
    disc = own_disc.get();
    op = own_op.get();
    if (options.preconditioner == PreconditionerKind::Jacobi)
      precond = jacobi_preconditioner(assemble_diagonal(*disc, form));
  }
  const auto b = assemble_rhs(*disc, form, manufactured_load(), zero);
  rep.setup_seconds = seconds_since(t0);
  rep.n_dofs = disc->n_dofs();

  if (mg) mg->reset_counts();
  const auto t1 = Clock::now();
  const SolveResult res = cg_solve(
      b.size(), [&](std::span<const double> s, std::span<double> d) { op->vmult(d, s); }, b, options.control,
      precond);
  rep.solve_seconds = seconds_since(t1);
  rep.iterations = res.iterations;
  rep.converged = res.converged;
  rep.residuals = res.residuals;
  const double r0 = res.residuals.empty() ? 0 : res.residuals.front();
  if (r0 > 0 && res.residuals.back() <= 1e-10 * r0) {
    rep.n10 = n10(res.residuals);
    if (res.iterations > 0)
      rep.e10 = rep.n_dofs / (rep.solve_seconds * *rep.n10 / res.iterations) /
                thread_count(options.multigrid.operator_config);
  }
  rep.relative_l2_error = l2_error(*disc, res.x, exact) / l2_norm(fine, exact);

  if (mg) {
    rep.levels = mg->levels();
    // one cycle from zero, counted on its own
    mg->reset_counts();
    std::vector<double> z(b.size());
    mg->precondition(b, z);
    for (const auto& l : mg->levels()) rep.applications_per_cycle.push_back(l.operator_applications);
    if (options.contraction_cycles > 0) rep.contraction_factors = vcycle_contraction(*mg, b, options.contraction_cycles);
  }
  return rep;
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.repetitions < 5) throw Error("at least 5 timed repetitions are required");
  if (options.warmup < 2) throw Error("at least 2 warmup runs are required");
  if (options.n_components != 1 && options.n_components != 3) throw Error("components must be 1 or 3");
  const OperatorForm form =
      options.n_components == 3 ? OperatorForm::helmholtz({1.0, 1.0}) : OperatorForm::laplace();
  const bool parallel = options.operator_config.execution == Execution::Parallel;
  std::vector<BenchRow> rows;
  for (int size : options.sizes) {
    const TetMesh mesh = generate_cube_mesh(size, options.deformation);
    const auto ids = boundary_ids(mesh);
    const Discretization disc = make_discretization(mesh, options.degree, options.space, options.n_components, ids,
                                                    options.operator_config.quadrature);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(disc.n_dofs());
    for (double& v : x) v = dist(rng);

    auto time_runs = [&](BenchRow& row, auto&& apply) {
      for (int w = 0; w < options.warmup; ++w) apply();
      std::vector<double> t;
      for (int k = 0; k < options.repetitions; ++k) {
        const auto t0 = Clock::now();
        apply();
        t.push_back(seconds_since(t0));
      }
      std::sort(t.begin(), t.end());
      row.size = size;
      row.n_cells = mesh.n_cells();
      row.n_dofs = disc.n_dofs();
      row.repetitions = options.repetitions;
      row.median_seconds = t.size() % 2 ? t[t.size() / 2] : 0.5 * (t[t.size() / 2 - 1] + t[t.size() / 2]);
      row.min_seconds = t.front();
      row.max_seconds = t.back();
      row.dofs_per_second = row.n_dofs / row.median_seconds;
    };

    BenchRow mf;
    mf.kind = "matrix-free";
    if (options.operator_config.precision == Precision::F32) {
      const MatrixFreeOperator<float> op(disc, form, options.operator_config);
      const std::vector<float> xf(x.begin(), x.end());
      std::vector<float> y(xf.size());
      time_runs(mf, [&] { op.vmult(y, xf); });
      const auto& c = op.counters();
      mf.flops_per_apply = static_cast<double>(c.total_flops()) / c.applies;
      mf.bytes_per_apply = static_cast<double>(c.total_bytes()) / c.applies;
      mf.memory_bytes = op.memory_bytes();
      for (float v : y) mf.result_max_abs = std::max(mf.result_max_abs, static_cast<double>(std::abs(v)));
    } else {
      const MatrixFreeOperator<double> op(disc, form, options.operator_config);
      std::vector<double> y(x.size());
      time_runs(mf, [&] { op.vmult(y, x); });
      const auto& c = op.counters();
      mf.flops_per_apply = static_cast<double>(c.total_flops()) / c.applies;
      mf.bytes_per_apply = static_cast<double>(c.total_bytes()) / c.applies;
      mf.memory_bytes = op.memory_bytes();
      for (double v : y) mf.result_max_abs = std::max(mf.result_max_abs, std::abs(v));
    }
    if (!std::isfinite(mf.result_max_abs)) throw NumericalError("matrix-free result is not finite");
    rows.push_back(mf);

    if (options.include_spmv) {
      const CsrMatrix a = assemble(disc, form);
      std::vector<double> y(x.size());
      BenchRow sp;
      sp.kind = "spmv";
      time_runs(sp, [&] { spmv(a, x, y, parallel); });
      sp.flops_per_apply = static_cast<double>(spmv_flops(a));
      sp.bytes_per_apply = static_cast<double>(a.memory_bytes() + 16 * x.size());
      sp.memory_bytes = a.memory_bytes();
      for (double v : y) sp.result_max_abs = std::max(sp.result_max_abs, std::abs(v));
      if (!std::isfinite(sp.result_max_abs)) throw NumericalError("spmv result is not finite");
      rows.push_back(sp);
    }
  }
  return rows;
}

}  // namespace tetmf

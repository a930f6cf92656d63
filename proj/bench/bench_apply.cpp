// Serial against OpenMP-parallel operator application, for each kernel stage,
// with the assembled matrix as a baseline.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>

#include "tetmf/studies.hpp"

using namespace tetmf;

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel apply benchmark"};
  std::string space = "dg";
  int p = 2, size = 8, threads = omp_get_max_threads(), reps = 5;
  app.add_option("--space", space)->check(CLI::IsMember({"cg", "dg"}));
  app.add_option("--p", p)->check(CLI::Range(1, 3));
  app.add_option("--size", size)->check(CLI::PositiveNumber);
  app.add_option("--threads", threads)->check(CLI::PositiveNumber);
  app.add_option("--reps", reps)->check(CLI::Range(5, 100000));
  CLI11_PARSE(app, argc, argv);

  omp_set_num_threads(threads);
  std::printf("%-6s %-9s %8s %11s %12s %10s\n", "stage", "execution", "threads", "median_s", "MDoF/s", "speedup");
  const KernelStage stages[] = {KernelStage::Reference, KernelStage::DataStructures, KernelStage::MatrixMatrix,
                                KernelStage::InstructionScheduled};
  const char* names[] = {"ref", "data", "mm", "sched"};
  for (int s = 0; s < 4; ++s) {
    double serial = 0;
    for (Execution e : {Execution::Serial, Execution::Parallel}) {
      BenchOptions b;
      b.space = space == "cg" ? Space::CG : Space::DG;
      b.degree = p;
      b.sizes = {size};
      b.repetitions = reps;
      b.include_spmv = s == 0;
      b.operator_config.stage = stages[s];
      b.operator_config.execution = e;
      b.operator_config.n_threads = threads;
      for (const BenchRow& r : run_bench(b)) {
        const bool par = e == Execution::Parallel;
        if (r.kind == "matrix-free" && !par) serial = r.median_seconds;
        const char* stage = r.kind == "spmv" ? "spmv" : names[s];
        const double speedup = r.kind == "spmv" || !par ? 1.0 : serial / r.median_seconds;
        std::printf("%-6s %-9s %8d %11.4e %12.2f %10.2f\n", stage, par ? "parallel" : "serial", par ? threads : 1,
                    r.median_seconds, r.dofs_per_second * 1e-6, speedup);
      }
    }
  }
}

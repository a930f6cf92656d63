#pragma once

#include <string>

#include "tetmf/dof.hpp"
#include "tetmf/mesh.hpp"
#include "tetmf/operator.hpp"

namespace tetmf {

struct MachineSpec {
  double peak_flops = 0;     ///< f64 flop/s
  double mem_bandwidth = 0;  ///< bytes/s
  double instr_per_cycle = 4;
  double clock = 0;  ///< Hz, summed over cores
  int lanes = 8;

  /// Throws Error unless all fields are positive.
  void validate() const;
  /// Two-socket server class: 2 x 24 cores, AVX-512, 2.5 GHz.
  static MachineSpec two_socket();
  /// One core of the same class.
  static MachineSpec single_core();
};

enum class Limit { Memory, Compute, Instruction };
const char* to_string(Limit l);

/// Per-cell model of one operator evaluation.
struct CostReport {
  Space space = Space::CG;
  int degree = 1;
  int lanes = 8;
  int n_q = 0;
  int n_qf = 0;
  bool curvilinear = false;
  int dofs_per_cell = 0;
  double unique_dofs_per_cell = 0;
  double bytes_per_cell = 0;
  double flops_per_cell = 0;
  double cell_flops_per_cell = 0;
  double face_flops_per_cell = 0;
  double arithmetic_intensity = 0;
  double roofline_bound_dofs_per_s = 0;

  double face_flop_share() const { return flops_per_cell > 0 ? face_flops_per_cell / flops_per_cell : 0; }
};

/// Unique DoFs per cell of the continuous space on a large tetrahedral mesh.
double unique_dofs_per_cell(int p);

/// 14/W + 4 n + 24 n_unique bytes (plus 72 n_q with per-point Jacobians)
/// and 12 n_q n + 33 n_q + n flops per cell.
CostReport predict_cg(int p, int lanes, int n_q, bool curvilinear, const MachineSpec& machine = MachineSpec::two_socket());

/// 18/W + 4 (4 + 18/W) + 24 n bytes; the CG cell work plus
/// 32 n_qf n + 43 n_qf flops for each of the two faces per cell.
CostReport predict_dg(int p, int lanes, int n_q, int n_qf, const MachineSpec& machine = MachineSpec::two_socket());

struct Roofline {
  double compute_bound_dofs_per_s = 0;
  double memory_bound_dofs_per_s = 0;
  /// Issue-rate bound from flops / W + gather and scatter slots; reported only.
  double instruction_bound_dofs_per_s = 0;
  double instructions_per_cell = 0;
  /// min(compute, memory)
  double bound_dofs_per_s = 0;
  /// Compute or Memory, whichever sets bound_dofs_per_s.
  Limit limit = Limit::Memory;
  /// Lowest of all three bounds.
  Limit tightest = Limit::Memory;
};

Roofline roofline_bound(const CostReport& report, const MachineSpec& machine);

struct CounterValidation {
  double predicted_flops_per_cell = 0;
  double measured_flops_per_cell = 0;
  /// |measured - predicted| / predicted
  double deviation = 0;
  double predicted_face_share = 0;
  double measured_face_share = 0;
  double measured_bytes_per_cell = 0;
  double boundary_face_fraction = 0;
  /// More than 20% of the faces lie on the boundary.
  bool boundary_dominated = false;
  bool within_tolerance = false;
};

/// Compares logical counters of one or more applies on mesh against the model.
CounterValidation validate_against_counters(const CostReport& report, const OperatorCounters& counters,
                                            const TetMesh& mesh, double tolerance = 0.1);

}  // namespace tetmf

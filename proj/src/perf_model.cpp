#include "tetmf/perf_model.hpp"

#include <algorithm>
#include <cmath>

#include "tetmf/basis.hpp"

namespace tetmf {

void MachineSpec::validate() const {
  if (!(peak_flops > 0 && mem_bandwidth > 0 && instr_per_cycle > 0 && clock > 0 && lanes > 0))
    throw Error("machine parameters must be positive");
}

MachineSpec MachineSpec::two_socket() {
  MachineSpec m;
  m.clock = 48 * 2.5e9;
  m.lanes = 8;
  m.peak_flops = m.clock * 2 * 2 * m.lanes;  // two FMA units
  m.mem_bandwidth = 280e9;
  return m;
}

MachineSpec MachineSpec::single_core() {
  MachineSpec m;
  m.clock = 2.5e9;
  m.lanes = 8;
  m.peak_flops = m.clock * 2 * 2 * m.lanes;
  m.mem_bandwidth = 12e9;
  return m;
}

const char* to_string(Limit l) {
  switch (l) {
    case Limit::Memory: return "memory-bound";
    case Limit::Compute: return "compute-bound";
    default: return "instruction-bound";
  }
}

double unique_dofs_per_cell(int p) {
  switch (p) {
    case 1: return 0.2;
    case 2: return 1.4;
    case 3: return 4.6;
    default: throw Error("degree must be 1, 2 or 3");
  }
}

namespace {

void finish(CostReport& r, const MachineSpec& machine) {
  r.arithmetic_intensity = r.flops_per_cell / r.bytes_per_cell;
  r.roofline_bound_dofs_per_s = roofline_bound(r, machine).bound_dofs_per_s;
}

void check_args(int p, int lanes, int n_q) {
  if (p < 1 || p > 3) throw Error("degree must be 1, 2 or 3");
  if (lanes < 1) throw Error("lane count must be positive");
  if (n_q < 1) throw Error("quadrature size must be positive");
}

}  // namespace

CostReport predict_cg(int p, int lanes, int n_q, bool curvilinear, const MachineSpec& machine) {
  check_args(p, lanes, n_q);
  CostReport r;
  r.space = Space::CG;
  r.degree = p;
  r.lanes = lanes;
  r.n_q = n_q;
  r.curvilinear = curvilinear;
  r.dofs_per_cell = dofs_per_cell(p);
  r.unique_dofs_per_cell = unique_dofs_per_cell(p);
  const double n = r.dofs_per_cell;
  r.bytes_per_cell = 14.0 / lanes + 4 * n + 24 * r.unique_dofs_per_cell;
  if (curvilinear) r.bytes_per_cell += 9.0 * n_q * 8;
  r.cell_flops_per_cell = 2.0 * (3 * n_q * n * 2) + 33.0 * n_q + n;
  r.flops_per_cell = r.cell_flops_per_cell;
  finish(r, machine);
  return r;
}

CostReport predict_dg(int p, int lanes, int n_q, int n_qf, const MachineSpec& machine) {
  check_args(p, lanes, n_q);
  if (n_qf < 1) throw Error("face quadrature size must be positive");
  CostReport r;
  r.space = Space::DG;
  r.degree = p;
  r.lanes = lanes;
  r.n_q = n_q;
  r.n_qf = n_qf;
  r.dofs_per_cell = dofs_per_cell(p);
  r.unique_dofs_per_cell = r.dofs_per_cell;
  const double n = r.dofs_per_cell;
  r.bytes_per_cell = 18.0 / lanes + 4 * (4 + 18.0 / lanes) + 24 * n;
  r.cell_flops_per_cell = 2.0 * (3 * n_q * n * 2) + 33.0 * n_q + n;
  r.face_flops_per_cell = 2 * (32.0 * n_qf * n + 43.0 * n_qf);
  r.flops_per_cell = r.cell_flops_per_cell + r.face_flops_per_cell;
  finish(r, machine);
  return r;
}

Roofline roofline_bound(const CostReport& report, const MachineSpec& machine) {
  machine.validate();
  Roofline out;
  const double dofs = report.unique_dofs_per_cell;
  out.compute_bound_dofs_per_s =
      report.flops_per_cell > 0 ? machine.peak_flops * dofs / report.flops_per_cell : INFINITY;
  out.memory_bound_dofs_per_s = report.bytes_per_cell > 0 ? machine.mem_bandwidth * dofs / report.bytes_per_cell
                                                           : INFINITY;
  // gather and scatter of the cell DoFs, both sides of each face for DG
  double slots = 2.0 * report.dofs_per_cell;
  if (report.space == Space::DG) slots += 2 * 4.0 * report.dofs_per_cell;
  out.instructions_per_cell = report.flops_per_cell / machine.lanes + slots;
  out.instruction_bound_dofs_per_s = machine.instr_per_cycle * machine.clock * dofs / out.instructions_per_cell;
  out.bound_dofs_per_s = std::min(out.compute_bound_dofs_per_s, out.memory_bound_dofs_per_s);
  out.limit = out.memory_bound_dofs_per_s <= out.compute_bound_dofs_per_s ? Limit::Memory : Limit::Compute;
  out.tightest = out.instruction_bound_dofs_per_s < out.bound_dofs_per_s ? Limit::Instruction : out.limit;
  return out;
}

CounterValidation validate_against_counters(const CostReport& report, const OperatorCounters& counters,
                                            const TetMesh& mesh, double tolerance) {
  if (counters.applies == 0) throw Error("counters hold no operator applications");
  CounterValidation v;
  const double cells = static_cast<double>(mesh.n_cells()) * counters.applies;
  v.predicted_flops_per_cell = report.flops_per_cell;
  v.measured_flops_per_cell = counters.total_flops() / cells;
  v.deviation = std::abs(v.measured_flops_per_cell - v.predicted_flops_per_cell) / v.predicted_flops_per_cell;
  v.predicted_face_share = report.face_flop_share();
  v.measured_face_share =
      counters.total_flops() > 0 ? static_cast<double>(counters.face_flops()) / counters.total_flops() : 0;
  v.measured_bytes_per_cell = counters.total_bytes() / cells;
  const double faces = mesh.interior_faces.size() + mesh.boundary_faces.size();
  v.boundary_face_fraction = faces > 0 ? mesh.boundary_faces.size() / faces : 0;
  v.boundary_dominated = v.boundary_face_fraction > 0.2;
  v.within_tolerance = v.deviation <= tolerance;
  return v;
}

}  // namespace tetmf

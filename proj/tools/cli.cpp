#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "tetmf/perf_model.hpp"
#include "tetmf/reorder.hpp"
#include "tetmf/studies.hpp"

namespace tetmf::cli {

using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string space = "dg";
  std::vector<int> degrees{1};
  std::vector<std::string> strategy;
  std::string quadrature = "standard";
  std::string geometry = "affine";
  std::string mg = "cph";
  std::vector<int> sizes;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string format;
  std::string out;

  std::vector<int> levels;
  int base = 1;
  std::string precond = "mg";
  bool validate = false;
  int repetitions = 5;
  int warmup = 2;
  std::string precision = "f64";
  int lanes = 0;
  int chunk = 256;
  int components = 1;
  bool no_spmv = false;
  double tol = 1e-10;
  int max_iterations = 2000;
  int cycles = 0;
  std::string machine = "two-socket";
  std::string mesh;
  std::string method = "hierarchical";
  bool no_shuffle = false;
  int group_size = 8;
  std::string perm_out;
  int refine = 0;
  bool reorder_bench = false;
  bool shuffle = false;
};

// ---------------------------------------------------------------- output

std::string format_value(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void write_csv(const std::vector<Json>& rows, std::ostream& os) {
  if (rows.empty()) return;
  bool first = true;
  for (const auto& [k, v] : rows.front().items()) {
    os << (first ? "" : ",") << k;
    first = false;
  }
  os << '\n';
  for (const auto& r : rows) {
    first = true;
    for (const auto& [k, v] : r.items()) {
      os << (first ? "" : ",") << format_value(v);
      first = false;
    }
    os << '\n';
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw Error("cannot open " + path + " for writing");
  }
  std::ostream& stream(std::ostream& fallback) { return file_.is_open() ? file_ : fallback; }

 private:
  std::ofstream file_;
};

void emit_rows(const std::vector<Json>& rows, const std::string& format, const Options& o, std::ostream& out) {
  Sink sink(o.out);
  std::ostream& os = sink.stream(out);
  if (format == "json")
    os << Json(rows).dump(2) << '\n';
  else
    write_csv(rows, os);
}

void emit_object(const Json& obj, const Options& o, std::ostream& out) {
  Sink sink(o.out);
  sink.stream(out) << obj.dump(2) << '\n';
}

// ---------------------------------------------------------------- parsing

Space parse_space(const std::string& s) { return s == "cg" ? Space::CG : Space::DG; }

Deformation parse_geometry(const std::string& s) {
  return s == "curvilinear" ? Deformation::Smooth : Deformation::None;
}

OperatorConfig operator_config(const Options& o, int* n_components) {
  OperatorConfig c;
  c.quadrature = o.quadrature == "modified" ? QuadratureVariant::Modified : QuadratureVariant::Standard;
  c.precision = o.precision == "f32" ? Precision::F32 : Precision::F64;
  c.lane_width = o.lanes;
  c.chunk_cells = o.chunk;
  if (o.threads > 1) {
    c.execution = Execution::Parallel;
    c.n_threads = o.threads;
  }
  int nc = o.components;
  int stages = 0;
  for (const auto& t : o.strategy) {
    if (t == "ref") c.stage = KernelStage::Reference;
    else if (t == "data") c.stage = KernelStage::DataStructures;
    else if (t == "mm") c.stage = KernelStage::MatrixMatrix;
    else if (t == "sched") c.stage = KernelStage::InstructionScheduled;
    else if (t == "cells") c.batching = Batching::CellsBatched;
    else if (t == "components") c.batching = Batching::ComponentsBatched, nc = 3;
    else throw UsageError("unknown strategy '" + t + "'");
    if (t != "cells" && t != "components") ++stages;
  }
  if (stages > 1) throw UsageError("--strategy takes one kernel stage; run the command once per stage");
  if (n_components) *n_components = nc;
  return c;
}

const char* stage_name(KernelStage s) {
  switch (s) {
    case KernelStage::Reference: return "ref";
    case KernelStage::DataStructures: return "data";
    case KernelStage::MatrixMatrix: return "mm";
    case KernelStage::InstructionScheduled: return "sched";
  }
  return "?";
}

const char* transfer_name(TransferKind k) {
  switch (k) {
    case TransferKind::None: return "none";
    case TransferKind::Continuous: return "c";
    case TransferKind::Degree: return "p";
    case TransferKind::Mesh: return "h";
  }
  return "?";
}

std::string hash_of(const Json& config) {
  std::string s;
  for (const auto& [k, v] : config.items()) s += k + "=" + format_value(v) + ";";
  return fnv1a_hex(s);
}

// Puts config_hash first, then the configuration, then the results.
Json with_hash(const Json& config, const Json& results) {
  Json row;
  row["config_hash"] = hash_of(config);
  for (const auto& [k, v] : config.items()) row[k] = v;
  for (const auto& [k, v] : results.items()) row[k] = v;
  return row;
}

// ---------------------------------------------------------------- commands

int cmd_bench(const Options& o, std::ostream& out) {
  const std::vector<int> sizes = o.sizes.empty() ? std::vector<int>{2, 4} : o.sizes;
  std::vector<Json> rows;
  for (int p : o.degrees) {
    BenchOptions b;
    b.space = parse_space(o.space);
    b.degree = p;
    b.operator_config = operator_config(o, &b.n_components);
    b.deformation = parse_geometry(o.geometry);
    b.sizes = sizes;
    b.repetitions = o.repetitions;
    b.warmup = o.warmup;
    b.include_spmv = !o.no_spmv;
    b.seed = o.seed;
    for (const BenchRow& r : run_bench(b)) {
      Json config;
      config["kind"] = r.kind;
      config["space"] = o.space;
      config["p"] = p;
      config["components"] = b.n_components;
      config["stage"] = stage_name(b.operator_config.stage);
      config["batching"] = b.operator_config.batching == Batching::CellsBatched ? "cells" : "components";
      config["quadrature"] = o.quadrature;
      config["geometry"] = o.geometry;
      config["precision"] = r.kind == "spmv" ? "f64" : o.precision;
      config["lanes"] = b.operator_config.resolved_lane_width();
      config["threads"] = o.threads;
      config["seed"] = o.seed;
      config["size"] = r.size;
      Json res;
      res["cells"] = r.n_cells;
      res["dofs"] = r.n_dofs;
      res["repetitions"] = r.repetitions;
      res["warmup"] = b.warmup;
      res["flops_per_apply"] = r.flops_per_apply;
      res["bytes_per_apply"] = r.bytes_per_apply;
      res["memory_bytes"] = r.memory_bytes;
      res["median_s"] = r.median_seconds;
      res["min_s"] = r.min_seconds;
      res["max_s"] = r.max_seconds;
      res["dofs_per_s"] = r.dofs_per_second;
      res["gflops_per_s"] = r.flops_per_apply / r.median_seconds * 1e-9;
      rows.push_back(with_hash(config, res));
    }
  }
  emit_rows(rows, o.format.empty() ? "csv" : o.format, o, out);
  return Ok;
}

int cmd_convergence(const Options& o, std::ostream& out) {
  std::vector<Json> rows;
  for (int p : o.degrees) {
    ConvergenceOptions c;
    c.space = parse_space(o.space);
    c.degree = p;
    c.deformation = parse_geometry(o.geometry);
    c.base_subdivisions = o.base;
    if (!o.levels.empty()) c.refinements = o.levels;
    c.mg_sequence = o.mg;
    c.rel_tol = o.tol;
    c.operator_config = operator_config(o, nullptr);
    c.operator_config.precision = Precision::F64;
    for (const ConvergenceRow& r : convergence_study(c)) {
      Json config;
      config["space"] = o.space;
      config["p"] = p;
      config["quadrature"] = o.quadrature;
      config["geometry"] = o.geometry;
      config["mg"] = o.mg;
      config["base"] = o.base;
      config["refinements"] = r.refinements;
      Json res;
      res["h"] = r.h;
      res["cells"] = r.n_cells;
      res["dofs"] = r.n_dofs;
      res["iterations"] = r.iterations;
      res["rel_l2_error"] = r.relative_l2_error;
      res["observed_order"] = optional_number(r.observed_order);
      res["seconds"] = r.seconds;
      rows.push_back(with_hash(config, res));
    }
  }
  emit_rows(rows, o.format.empty() ? "csv" : o.format, o, out);
  return Ok;
}

int cmd_solve(const Options& o, std::ostream& out) {
  if (o.degrees.size() != 1) throw UsageError("solve takes a single --p");
  if (o.levels.size() > 1) throw UsageError("solve takes a single --levels value (refinement count)");
  SolveOptions s;
  s.space = parse_space(o.space);
  s.degree = o.degrees.front();
  s.deformation = parse_geometry(o.geometry);
  s.base_subdivisions = o.base;
  s.refinements = o.levels.empty() ? 2 : o.levels.front();
  const std::string seq = parse_mg_sequence(o.mg);
  s.preconditioner = o.precond == "jacobi" ? PreconditionerKind::Jacobi
                     : o.precond == "none" ? PreconditionerKind::None
                                           : PreconditionerKind::Multigrid;
  if (o.mg == "none" && o.precond == "mg") s.preconditioner = PreconditionerKind::Jacobi;
  s.multigrid.sequence = seq;
  s.multigrid.operator_config = operator_config(o, nullptr);
  s.multigrid.single_precision = o.precision == "f32";
  s.multigrid.operator_config.precision = Precision::F64;
  s.control = {o.tol, o.max_iterations, false};
  s.contraction_cycles = o.cycles;
  const SolveReport r = run_solve(s);

  Json config;
  config["space"] = o.space;
  config["p"] = s.degree;
  config["quadrature"] = o.quadrature;
  config["geometry"] = o.geometry;
  config["precond"] = s.preconditioner == PreconditionerKind::Multigrid ? "mg"
                      : s.preconditioner == PreconditionerKind::Jacobi  ? "jacobi"
                                                                        : "none";
  config["mg"] = s.preconditioner == PreconditionerKind::Multigrid ? o.mg : "none";
  config["precision"] = o.precision;
  config["base"] = o.base;
  config["refinements"] = s.refinements;
  config["tol"] = o.tol;
  config["threads"] = o.threads;
  Json res;
  res["cells"] = r.n_cells;
  res["dofs"] = r.n_dofs;
  res["iterations"] = r.iterations;
  res["converged"] = r.converged;
  res["n10"] = optional_number(r.n10);
  res["e10_dofs_per_s_per_thread"] = optional_number(r.e10);
  res["setup_s"] = r.setup_seconds;
  res["solve_s"] = r.solve_seconds;
  res["rel_l2_error"] = r.relative_l2_error;
  Json levels = Json::array();
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const LevelInfo& li = r.levels[l];
    levels.push_back({{"space", li.space == Space::CG ? "cg" : "dg"},
                      {"p", li.degree},
                      {"mesh", li.mesh_index},
                      {"dofs", li.n_dofs},
                      {"from_finer", transfer_name(li.transfer)},
                      {"applications_per_cycle", r.applications_per_cycle[l]}});
  }
  res["levels"] = levels;
  if (!r.contraction_factors.empty()) res["contraction"] = r.contraction_factors;
  res["residuals"] = r.residuals;
  emit_object(with_hash(config, res), o, out);
  if (!r.converged) throw NumericalError("solver did not reach the tolerance in " + std::to_string(r.iterations) +
                                         " iterations");
  return Ok;
}

int cmd_model(const Options& o, std::ostream& out) {
  const MachineSpec machine = o.machine == "single-core" ? MachineSpec::single_core() : MachineSpec::two_socket();
  const Space space = parse_space(o.space);
  const OperatorConfig cfg = operator_config(o, nullptr);
  const bool curved = o.geometry == "curvilinear";
  if (space == Space::DG && curved) throw UsageError("the DG model covers affine geometry only");
  const int lanes = o.lanes > 0 ? o.lanes : machine.lanes;
  std::vector<Json> rows;
  Json roofs = Json::array();
  for (int p : o.degrees) {
    const int n_q = static_cast<int>(make_cell_quadrature(p, cfg.quadrature).size());
    const int n_qf = static_cast<int>(make_face_quadrature(p).size());
    const CostReport c =
        space == Space::CG ? predict_cg(p, lanes, n_q, curved, machine) : predict_dg(p, lanes, n_q, n_qf, machine);
    const Roofline roof = roofline_bound(c, machine);
    Json config;
    config["space"] = o.space;
    config["p"] = p;
    config["quadrature"] = o.quadrature;
    config["geometry"] = o.geometry;
    config["lanes"] = lanes;
    config["machine"] = o.machine;
    Json res;
    res["n_q"] = c.n_q;
    res["n_qf"] = space == Space::DG ? c.n_qf : 0;
    res["dofs_per_cell"] = c.dofs_per_cell;
    res["unique_dofs_per_cell"] = c.unique_dofs_per_cell;
    res["bytes_per_cell"] = c.bytes_per_cell;
    res["flops_per_cell"] = c.flops_per_cell;
    res["face_flop_share"] = c.face_flop_share();
    res["arithmetic_intensity"] = c.arithmetic_intensity;
    res["roofline_dofs_per_s"] = roof.bound_dofs_per_s;
    res["classification"] = to_string(roof.limit);
    res["instruction_bound_dofs_per_s"] = roof.instruction_bound_dofs_per_s;
    res["tightest"] = to_string(roof.tightest);
    if (o.validate) {
      const int size = o.sizes.empty() ? 8 : o.sizes.back();
      const TetMesh mesh = generate_cube_mesh(size, parse_geometry(o.geometry));
      const Discretization disc = make_discretization(mesh, p, space, 1, boundary_ids(mesh), cfg.quadrature);
      OperatorConfig vc = cfg;
      vc.precision = Precision::F64;
      const MatrixFreeOperator<double> op(disc, OperatorForm::laplace(), vc);
      std::vector<double> x(disc.n_dofs(), 1.0), y(x.size());
      op.vmult(y, x);
      const CounterValidation v = validate_against_counters(c, op.counters(), mesh);
      res["validate_size"] = size;
      res["measured_flops_per_cell"] = v.measured_flops_per_cell;
      res["flop_deviation"] = v.deviation;
      res["measured_face_share"] = v.measured_face_share;
      res["measured_bytes_per_cell"] = v.measured_bytes_per_cell;
      res["boundary_face_fraction"] = v.boundary_face_fraction;
      res["boundary_dominated"] = v.boundary_dominated;
      res["within_tolerance"] = v.within_tolerance;
    }
    rows.push_back(with_hash(config, res));
    roofs.push_back({{"p", p},
                     {"compute_bound_dofs_per_s", roof.compute_bound_dofs_per_s},
                     {"memory_bound_dofs_per_s", roof.memory_bound_dofs_per_s},
                     {"instruction_bound_dofs_per_s", roof.instruction_bound_dofs_per_s},
                     {"instructions_per_cell", roof.instructions_per_cell},
                     {"bound_dofs_per_s", roof.bound_dofs_per_s},
                     {"limit", to_string(roof.limit)},
                     {"tightest", to_string(roof.tightest)}});
  }
  if (o.format == "json") {
    Json obj;
    obj["machine"] = {{"name", o.machine},
                      {"peak_flops", machine.peak_flops},
                      {"mem_bandwidth", machine.mem_bandwidth},
                      {"instr_per_cycle", machine.instr_per_cycle},
                      {"clock", machine.clock},
                      {"lanes", machine.lanes}};
    obj["rows"] = rows;
    obj["roofline"] = roofs;
    emit_object(obj, o, out);
  } else {
    emit_rows(rows, "csv", o, out);
  }
  return Ok;
}

MeshFormat format_of(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".msh" ? MeshFormat::GmshMsh2 : MeshFormat::InternalBinary;
}

Json locality_json(const LocalityReport& r) {
  return {{"mean_neighbor_index_distance", r.mean_neighbor_index_distance},
          {"max_bandwidth", r.max_bandwidth},
          {"dof_span_per_batch", r.dof_span_per_batch}};
}

double median_apply_seconds(const TetMesh& mesh, const Options& o) {
  const Discretization disc = make_discretization(mesh, o.degrees.front(), parse_space(o.space), 1, boundary_ids(mesh));
  OperatorConfig c = operator_config(o, nullptr);
  c.precision = Precision::F64;
  const MatrixFreeOperator<double> op(disc, OperatorForm::laplace(), c);
  std::vector<double> x(disc.n_dofs(), 1.0), y(x.size());
  for (int w = 0; w < o.warmup; ++w) op.vmult(y, x);
  std::vector<double> t;
  for (int k = 0; k < o.repetitions; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    op.vmult(y, x);
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

int cmd_reorder(const Options& o, std::ostream& out) {
  TetMesh input;
  Json config;
  if (!o.mesh.empty()) {
    input = import_mesh(o.mesh, format_of(o.mesh));
    config["mesh"] = o.mesh;
  } else {
    const int size = o.sizes.empty() ? 8 : o.sizes.front();
    const TetMesh cube = generate_cube_mesh(size, parse_geometry(o.geometry));
    config["mesh"] = "cube";
    config["size"] = size;
    input = o.no_shuffle ? cube : permute_cells(cube, CellPermutation::random(cube.n_cells(), o.seed).new_of_old);
  }
  config["shuffled"] = o.mesh.empty() && !o.no_shuffle;
  config["seed"] = o.seed;
  config["method"] = o.method;
  config["group_size"] = o.group_size;
  if (o.method != "hierarchical" && o.method != "identity") throw UsageError("unknown method '" + o.method + "'");
  const CellPermutation perm =
      o.method == "identity" ? CellPermutation::identity(input.n_cells()) : hierarchical_reorder(input, o.group_size);
  const LocalityReport before = locality_metrics(input, CellPermutation::identity(input.n_cells()));
  const LocalityReport after = locality_metrics(input, perm);
  Json res;
  res["cells"] = input.n_cells();
  res["bijection"] = perm.is_bijection();
  res["before"] = locality_json(before);
  res["after"] = locality_json(after);
  res["mean_distance_reduction"] =
      after.mean_neighbor_index_distance > 0 ? before.mean_neighbor_index_distance / after.mean_neighbor_index_distance
                                             : 1.0;
  res["max_bandwidth_reduction"] =
      after.max_bandwidth > 0 ? static_cast<double>(before.max_bandwidth) / after.max_bandwidth : 1.0;
  if (o.reorder_bench) {
    const TetMesh reordered = permute_cells(input, perm.new_of_old);
    res["bench"] = {{"p", o.degrees.front()},
                    {"space", o.space},
                    {"median_s_before", median_apply_seconds(input, o)},
                    {"median_s_after", median_apply_seconds(reordered, o)}};
  }
  if (!o.perm_out.empty()) {
    std::ofstream f(o.perm_out);
    if (!f) throw Error("cannot open " + o.perm_out + " for writing");
    f << "old_index,new_index\n";
    for (std::size_t c = 0; c < perm.size(); ++c) f << c << ',' << perm.new_of_old[c] << '\n';
  }
  emit_object(with_hash(config, res), o, out);
  return Ok;
}

int cmd_export_mesh(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("export-mesh requires --out <path>");
  const int size = o.sizes.empty() ? 2 : o.sizes.front();
  TetMesh mesh = generate_cube_mesh(size, parse_geometry(o.geometry));
  for (int r = 0; r < o.refine; ++r) mesh = refine_uniform(mesh);
  if (o.shuffle) mesh = permute_cells(mesh, CellPermutation::random(mesh.n_cells(), o.seed).new_of_old);
  export_mesh(mesh, o.out, format_of(o.out));
  out << Json({{"path", o.out},
               {"format", format_of(o.out) == MeshFormat::GmshMsh2 ? "msh2" : "binary"},
               {"cells", mesh.n_cells()},
               {"vertices", mesh.vertices.size()}})
             .dump(2)
      << '\n';
  return Ok;
}

}  // namespace

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix-free finite element operators on tetrahedral meshes", "tetmf"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--space", o.space, "cg or dg")->check(CLI::IsMember({"cg", "dg"}));
    s->add_option("--p", o.degrees, "Polynomial degree(s), comma separated")
        ->delimiter(',')
        ->check(CLI::Range(1, 3));
    s->add_option("--strategy", o.strategy, "Kernel stage {ref,data,mm,sched} and batching {cells,components}")
        ->delimiter(',');
    s->add_option("--quadrature", o.quadrature)->check(CLI::IsMember({"standard", "modified"}));
    s->add_option("--geometry", o.geometry)->check(CLI::IsMember({"affine", "curvilinear"}));
    s->add_option("--mg", o.mg, "Multigrid sequence of c, p, h tokens, or none");
    s->add_option("--sizes", o.sizes, "Cube subdivisions, comma separated")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed);
    s->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
    s->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--out", o.out, "Output path");
    s->add_option("--precision", o.precision)->check(CLI::IsMember({"f64", "f32"}));
    s->add_option("--lanes", o.lanes, "SIMD lanes, 0 for the default")->check(CLI::IsMember({0, 1, 2, 4, 8, 16}));
    s->add_option("--chunk", o.chunk, "Cells per scheduling chunk")->check(CLI::PositiveNumber);
    s->add_option("--components", o.components)->check(CLI::IsMember({1, 3}));
  };

  CLI::App* bench = app.add_subcommand("bench", "Matrix-free and SpMV throughput");
  common(bench);
  bench->add_option("--reps", o.repetitions)->check(CLI::Range(5, 1000000));
  bench->add_option("--warmup", o.warmup)->check(CLI::Range(2, 1000000));
  bench->add_flag("--no-spmv", o.no_spmv);

  CLI::App* conv = app.add_subcommand("convergence", "L2 error under refinement");
  common(conv);
  conv->add_option("--levels", o.levels, "Refinement counts, comma separated")->delimiter(',');
  conv->add_option("--base", o.base)->check(CLI::PositiveNumber);
  conv->add_option("--tol", o.tol);

  CLI::App* solve = app.add_subcommand("solve", "Preconditioned CG solve");
  common(solve);
  solve->add_option("--levels", o.levels, "Refinement count of the finest mesh");
  solve->add_option("--base", o.base)->check(CLI::PositiveNumber);
  solve->add_option("--precond", o.precond)->check(CLI::IsMember({"mg", "jacobi", "none"}));
  solve->add_option("--tol", o.tol);
  solve->add_option("--max-iterations", o.max_iterations)->check(CLI::PositiveNumber);
  solve->add_option("--cycles", o.cycles, "Stationary V-cycles to measure contraction");

  CLI::App* model = app.add_subcommand("model", "Cost model and roofline");
  common(model);
  model->add_flag("--validate", o.validate, "Compare against logical counters");
  model->add_option("--machine", o.machine)->check(CLI::IsMember({"two-socket", "single-core"}));

  CLI::App* reorder = app.add_subcommand("reorder", "Cell reordering and locality metrics");
  common(reorder);
  reorder->add_option("--mesh", o.mesh, "Mesh file (.msh for Gmsh 2, otherwise binary)");
  reorder->add_option("--method", o.method)->check(CLI::IsMember({"hierarchical", "identity"}));
  reorder->add_flag("--no-shuffle", o.no_shuffle);
  reorder->add_option("--group-size", o.group_size)->check(CLI::Range(2, 1 << 20));
  reorder->add_option("--perm-out", o.perm_out, "Permutation CSV path");
  reorder->add_flag("--bench", o.reorder_bench, "Time one apply before and after");
  reorder->add_option("--reps", o.repetitions)->check(CLI::Range(5, 1000000));
  reorder->add_option("--warmup", o.warmup)->check(CLI::Range(2, 1000000));

  CLI::App* exp = app.add_subcommand("export-mesh", "Write a cube mesh");
  common(exp);
  exp->add_option("--refine", o.refine)->check(CLI::NonNegativeNumber);
  exp->add_flag("--shuffle", o.shuffle, "Shuffle the cells with --seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return Usage;
  }

  const bool model_all = model->parsed() && model->count("--p") == 0;
  if (model_all) o.degrees = {1, 2, 3};
  if (o.threads > 1) omp_set_num_threads(o.threads);
  try {
    try {
      parse_mg_sequence(o.mg);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (bench->parsed()) return cmd_bench(o, out);
    if (conv->parsed()) return cmd_convergence(o, out);
    if (solve->parsed()) return cmd_solve(o, out);
    if (model->parsed()) return cmd_model(o, out);
    if (reorder->parsed()) return cmd_reorder(o, out);
    return cmd_export_mesh(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return NumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return RuntimeFailure;
  }
}

}  // namespace tetmf::cli

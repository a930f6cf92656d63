#include "tetmf/multigrid.hpp"

#include <algorithm>

namespace tetmf {

std::string parse_mg_sequence(const std::string& s) {
  if (s == "none") return "";
  for (char c : s)
    if (c != 'c' && c != 'p' && c != 'h') throw Error(std::string("unknown multigrid sequence token '") + c + "'");
  if (s.empty()) throw Error("empty multigrid sequence");
  return s;
}

CsrMatrix build_prolongation(const Discretization& coarse, const Discretization& fine, TransferKind kind) {
  const TetMesh& fm = *fine.mesh;
  const TetMesh& cm = *coarse.mesh;
  if (kind == TransferKind::Mesh) {
    if (!fm.has_genealogy() || fm.n_cells() != 8 * cm.n_cells())
      throw Error("h-transfer requires a fine mesh refined from the coarse mesh");
  } else if (&fm != &cm) {
    throw Error("c- and p-transfers require the same mesh");
  }
  const int nc = fine.n_components();
  if (coarse.n_components() != nc) throw Error("transfer between different component counts");
  const LagrangeBasis fb(fine.degree()), cb(coarse.degree());
  const int nf = fb.size(), ncb = cb.size();
  std::vector<char> done(fine.n_dofs(), 0);
  std::vector<Triplet> t;
  std::vector<double> phi(ncb);
  for (std::size_t c = 0; c < fm.n_cells(); ++c) {
    const std::size_t cc = kind == TransferKind::Mesh ? fm.parent[c] : c;
    const auto fd = fine.dofs.dofs(c);
    const auto cd = coarse.dofs.dofs(cc);
    for (int j = 0; j < nf; ++j) {
      if (done[fd[j]]) continue;
      Vec3 xi = fb.nodes()[j];
      if (kind == TransferKind::Mesh) {
        const auto& pv = fm.parent_ref_vertices[c];
        const double l[4] = {1 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]};
        xi = {0, 0, 0};
        for (int k = 0; k < 4; ++k) xi = xi + l[k] * pv[k];
      }
      cb.values(xi, phi.data());
      for (int comp = 0; comp < nc; ++comp) {
        const index_t row = fd[comp * nf + j];
        done[row] = 1;
        if (fine.dofs.dirichlet_mask[row]) continue;
        for (int i = 0; i < ncb; ++i) {
          const index_t col = cd[comp * ncb + i];
          if (coarse.dofs.dirichlet_mask[col] || std::abs(phi[i]) < 1e-14) continue;
          t.push_back({row, col, phi[i]});
        }
      }
    }
  }
  return CsrMatrix::from_triplets(fine.n_dofs(), coarse.n_dofs(), std::move(t));
}

namespace {

template <class Number>
void csr_apply(const CsrMatrix& a, const Number* x, Number* y) {
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    double s = 0;
    for (std::uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    y[i] = static_cast<Number>(s);
  }
}

template <class Number>
struct LevelOps {
  std::unique_ptr<MatrixFreeOperator<Number>> op;
  ChebyshevSmoother<Number> smoother;
};

struct Level {
  std::unique_ptr<Discretization> disc;
  std::size_t mesh_index = 0;
  TransferKind transfer = TransferKind::None;
  CsrMatrix prolongation;  // to the next finer level
  CsrMatrix restriction;
  LevelOps<double> f64;
  LevelOps<float> f32;
  mutable std::uint64_t applications = 0;
};

}  // namespace

struct MultigridPreconditioner::Impl {
  std::vector<std::unique_ptr<Level>> levels;  // coarsest first
  MultigridOptions options;
  OperatorForm form;
  std::unique_ptr<DenseCholesky> direct;
  CsrMatrix coarse_matrix;
  std::vector<double> coarse_diag;

  void coarse_solve(std::span<const double> b, std::span<double> x) const {
    if (direct) {
      direct->solve(b, x);
      return;
    }
    SolverControl ctl;
    ctl.rel_tol = 1e-10;
    ctl.max_iterations = 5000;
    const auto res = cg_solve(
        b.size(), [this](std::span<const double> s, std::span<double> d) { spmv(coarse_matrix, s, d); }, b, ctl,
        jacobi_preconditioner(coarse_diag));
    std::copy(res.x.begin(), res.x.end(), x.begin());
  }

  template <class Number>
  LevelOps<Number>& ops(const Level& l) const {
    if constexpr (std::is_same_v<Number, double>)
      return const_cast<LevelOps<double>&>(l.f64);
    else
      return const_cast<LevelOps<float>&>(l.f32);
  }

  template <class Number>
  void cycle(std::size_t li, std::span<const Number> b, std::span<Number> x, bool x_is_zero) const {
    const Level& l = *levels[li];
    const std::size_t n = b.size();
    if (li == 0) {
      std::vector<double> bd(b.begin(), b.end()), xd(n);
      if (!x_is_zero) {
        std::vector<Number> ax(n);
        ops<Number>(l).op->vmult(ax, x);
        ++l.applications;
        for (std::size_t i = 0; i < n; ++i) bd[i] -= ax[i];
      }
      coarse_solve(bd, xd);
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<Number>((x_is_zero ? 0 : x[i]) + xd[i]);
      return;
    }
    auto& o = ops<Number>(l);
    o.smoother.smooth(b, x, x_is_zero);
    l.applications += o.smoother.applications(x_is_zero);
    std::vector<Number> r(n);
    o.op->vmult(r, x);
    ++l.applications;
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const Level& c = *levels[li - 1];
    std::vector<Number> rc(c.disc->n_dofs()), ec(c.disc->n_dofs());
    csr_apply(c.restriction, r.data(), rc.data());
    cycle<Number>(li - 1, rc, ec, true);
    csr_apply(c.prolongation, ec.data(), r.data());
    for (std::size_t i = 0; i < n; ++i) x[i] += r[i];
    o.smoother.smooth(b, x, false);
    l.applications += o.smoother.applications(false);
  }
};

MultigridPreconditioner::MultigridPreconditioner(std::vector<const TetMesh*> meshes, int degree, Space space,
                                                 int n_components, std::vector<int> dirichlet_ids,
                                                 const OperatorForm& form, const MultigridOptions& options)
    : impl_(std::make_unique<Impl>()) {
  if (meshes.empty()) throw Error("multigrid needs at least one mesh");
  impl_->options = options;
  impl_->form = form;
  const std::string seq = parse_mg_sequence(options.sequence);
  const QuadratureVariant variant = options.operator_config.quadrature;

  struct Spec {
    Space space;
    int degree;
    std::size_t mesh;
    TransferKind transfer;
  };
  std::vector<Spec> specs{{space, degree, meshes.size() - 1, TransferKind::None}};
  for (char tok : seq) {
    for (;;) {
      Spec s = specs.back();
      if (tok == 'c' && s.space == Space::DG) {
        s.space = Space::CG;
        s.transfer = TransferKind::Continuous;
      } else if (tok == 'p' && s.degree > 1) {
        --s.degree;
        s.transfer = TransferKind::Degree;
      } else if (tok == 'h' && s.mesh > 0) {
        if (!meshes[s.mesh]->has_genealogy()) throw Error("h-transfer requested on a mesh without genealogy");
        --s.mesh;
        s.transfer = TransferKind::Mesh;
      } else {
        break;
      }
      specs.push_back(s);
      if (tok == 'c') break;
    }
  }
  // specs is fine to coarse; levels are stored coarse to fine
  std::reverse(specs.begin(), specs.end());
  auto& levels = impl_->levels;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto l = std::make_unique<Level>();
    const Spec& s = specs[i];
    l->mesh_index = s.mesh;
    l->transfer = s.transfer;
    l->disc = std::make_unique<Discretization>(
        make_discretization(*meshes[s.mesh], s.degree, s.space, n_components, dirichlet_ids, variant));
    levels.push_back(std::move(l));
  }
  // transfer stored on the coarse side: levels[i].transfer = how levels[i] came from levels[i+1]
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    levels[i]->prolongation = build_prolongation(*levels[i]->disc, *levels[i + 1]->disc, levels[i]->transfer);
    levels[i]->restriction = transpose(levels[i]->prolongation);
  }

  OperatorConfig c64 = options.operator_config;
  c64.precision = Precision::F64;
  c64.lane_width = options.operator_config.precision == Precision::F64 ? options.operator_config.lane_width : 0;
  OperatorConfig c32 = c64;
  c32.precision = Precision::F32;
  c32.lane_width = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    Level& l = *levels[i];
    l.f64.op = std::make_unique<MatrixFreeOperator<double>>(*l.disc, form, c64);
    if (i == 0) continue;
    const auto diag = assemble_diagonal(*l.disc, form);
    MatrixFreeOperator<double>* op = l.f64.op.get();
    l.f64.smoother = ChebyshevSmoother<double>(
        [op](std::span<const double> s, std::span<double> d) { op->vmult(d, s); }, diag, options.smoother);
    if (options.single_precision) {
      l.f32.op = std::make_unique<MatrixFreeOperator<float>>(*l.disc, form, c32);
      MatrixFreeOperator<float>* opf = l.f32.op.get();
      l.f32.smoother = ChebyshevSmoother<float>(
          [opf](std::span<const float> s, std::span<float> d) { opf->vmult(d, s); },
          std::vector<float>(diag.begin(), diag.end()), options.smoother);
    }
  }
  if (options.single_precision) {
    OperatorConfig c = c32;
    levels[0]->f32.op = std::make_unique<MatrixFreeOperator<float>>(*levels[0]->disc, form, c);
  }
  impl_->coarse_matrix = assemble(*levels[0]->disc, form);
  if (levels[0]->disc->n_dofs() <= options.direct_limit)
    impl_->direct = std::make_unique<DenseCholesky>(impl_->coarse_matrix);
  else
    impl_->coarse_diag = extract_diagonal(impl_->coarse_matrix);
}

MultigridPreconditioner::~MultigridPreconditioner() = default;
MultigridPreconditioner::MultigridPreconditioner(MultigridPreconditioner&&) noexcept = default;

std::size_t MultigridPreconditioner::n_levels() const { return impl_->levels.size(); }

std::vector<LevelInfo> MultigridPreconditioner::levels() const {
  std::vector<LevelInfo> out;
  for (const auto& l : impl_->levels)
    out.push_back({l->disc->space(), l->disc->degree(), l->mesh_index, l->disc->n_dofs(), l->transfer,
                   l->applications});
  return out;
}

const Discretization& MultigridPreconditioner::discretization(std::size_t level) const {
  return *impl_->levels.at(level)->disc;
}

const CsrMatrix& MultigridPreconditioner::prolongation(std::size_t level) const {
  return impl_->levels.at(level)->prolongation;
}

const MatrixFreeOperator<double>& MultigridPreconditioner::fine_operator() const {
  return *impl_->levels.back()->f64.op;
}

void MultigridPreconditioner::vcycle(std::span<const double> b, std::span<double> x, bool x_is_zero) const {
  const std::size_t fine = impl_->levels.size() - 1;
  if (b.size() != x.size() || b.size() != impl_->levels.back()->disc->n_dofs())
    throw DimensionMismatch("vcycle: vector length mismatch");
  if (!impl_->options.single_precision) {
    impl_->cycle<double>(fine, b, x, x_is_zero);
    return;
  }
  std::vector<float> bf(b.begin(), b.end()), xf(x.begin(), x.end());
  impl_->cycle<float>(fine, bf, xf, x_is_zero);
  std::copy(xf.begin(), xf.end(), x.begin());
}

void MultigridPreconditioner::precondition(std::span<const double> r, std::span<double> z) const {
  vcycle(r, z, true);
}

LinearMap<double> MultigridPreconditioner::as_preconditioner() const {
  return [this](std::span<const double> r, std::span<double> z) { precondition(r, z); };
}

void MultigridPreconditioner::reset_counts() const {
  for (const auto& l : impl_->levels) l->applications = 0;
}

}  // namespace tetmf

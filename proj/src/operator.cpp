#include "tetmf/operator.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <string>

namespace tetmf {

int OperatorConfig::resolved_lane_width() const {
  if (lane_width == 0) return precision == Precision::F64 ? 4 : 8;
  return lane_width;
}

int OperatorConfig::cells_per_lane() const {
  const bool mm = stage == KernelStage::MatrixMatrix || stage == KernelStage::InstructionScheduled;
  return batching == Batching::CellsBatched && mm ? 4 : 1;
}

OperatorCounters& OperatorCounters::operator+=(const OperatorCounters& o) {
  applies += o.applies;
  cells += o.cells;
  interior_faces += o.interior_faces;
  boundary_faces += o.boundary_faces;
  cell_flops += o.cell_flops;
  interior_face_flops += o.interior_face_flops;
  boundary_face_flops += o.boundary_face_flops;
  index_bytes += o.index_bytes;
  vector_bytes += o.vector_bytes;
  geometry_bytes += o.geometry_bytes;
  return *this;
}

namespace {

template <class Number>
struct KernelBase {
  virtual ~KernelBase() = default;
  virtual void apply(Number* dst, const Number* src, OperatorCounters& counters) const = 0;
  virtual std::size_t bytes() const = 0;
  virtual std::size_t n_colors() const = 0;
};

struct FaceBatch {
  bool boundary = false;
  int face_minus = 0;
  int face_plus = 0;
  int orientation = 0;
  int fcols = 1;  // face columns in the block
  std::vector<index_t> faces;
  std::vector<std::uint8_t> active;
  std::size_t geo_offset = 0;
};

struct Chunk {
  std::size_t batch_begin, batch_end;
  std::size_t face_begin, face_end;
};

// Flop counts of the quadrature-point operations.
constexpr int kCellPointFlops = 33;      // J^-T g, times JxW, J^-1 back transform
constexpr int kAffineScaleFlops = 9;     // det-scaled back transform per slot
constexpr int kInteriorPointFlops = 25;  // normal derivatives, jump, average, test coefficients
constexpr int kBoundaryPointFlops = 12;

template <class Number, int W>
class Kernel final : public KernelBase<Number> {
 public:
  Kernel(const Discretization& disc, const OperatorForm& form, const OperatorConfig& cfg)
      : disc_(disc), dofs_(disc.dofs), stage_(cfg.stage) {
    const TetMesh& mesh = *disc.mesh;
    const GeometryData& g = disc.geometry;
    n_ = dofs_.n_dofs_per_cell;
    nc_ = dofs_.n_components;
    n_q_ = disc.basis.n_q;
    n_qf_ = disc.basis.n_qf;
    dg_ = dofs_.space == Space::DG;
    curved_ = g.mode == GeometryMode::PerQuadraturePoint;
    components_ = cfg.batching == Batching::ComponentsBatched;
    cpl_ = cfg.cells_per_lane();
    const double ms = form.mass_factor();
    const double nu = form.stiffness_factor();
    has_mass_ = ms > 0;
    has_stiff_ = nu > 0;

    // stacked cell matrix: values (mass) then reference gradients (stiffness)
    std::vector<double> e;
    if (has_mass_) e.insert(e.end(), disc.basis.value_matrix.begin(), disc.basis.value_matrix.end());
    grad_offset_ = has_mass_ ? n_q_ : 0;
    if (has_stiff_) e.insert(e.end(), disc.basis.grad_matrix.begin(), disc.basis.grad_matrix.end());
    cell_rows_ = (has_mass_ ? n_q_ : 0) + (has_stiff_ ? 3 * n_q_ : 0);
    cell_matrix_ = kernels::StagedMatrix<Number>(e, cell_rows_, n_, stage_, W);
    weights_.assign(g.weights.begin(), g.weights.end());

    batches_ = make_cell_batches(mesh.n_cells(), W, cpl_);
    build_cell_geometry(g, ms, nu);

    if (dg_ && has_stiff_) {
      for (int f = 0; f < 4; ++f)
        for (int o = 0; o < FaceOrientation::n_codes; ++o) {
          std::vector<double> st(disc.basis.face_values(f, o));
          const auto& gr = disc.basis.face_grads(f, o);
          st.insert(st.end(), gr.begin(), gr.end());
          face_tables_.emplace_back(st, 4 * n_qf_, n_, stage_, W);
        }
      penalty_ = compute_penalty(disc, form.sipg);
      is_dirichlet_face_ = dirichlet_boundary_faces(disc);
    }

    build_chunks(mesh, cfg, nu);
    if (stage_ == KernelStage::InstructionScheduled) build_gather_plans();
    color_chunks(mesh);
  }

  std::size_t n_colors() const override { return colors_.size(); }

  std::size_t bytes() const override {
    std::size_t b = cell_geo_.size() * sizeof(Number) + face_geo_.size() * sizeof(Number);
    b += cell_matrix_.bytes();
    for (const auto& t : face_tables_) b += t.bytes();
    if (stage_ == KernelStage::InstructionScheduled) {
      b += plan_slot_.size() * sizeof(std::uint16_t) + plan_index_.size() * sizeof(index_t);
      b += plan_begin_.size() * sizeof(std::size_t);
    } else {
      b += dofs_.cell_dofs.size() * sizeof(index_t);
    }
    for (const auto& fb : face_batches_) b += fb.faces.size() * (sizeof(index_t) + 1);
    return b;
  }

  void apply(Number* dst, const Number* src, OperatorCounters& counters) const override {
    const std::size_t n_global = dofs_.n_global_dofs;
    std::fill(dst, dst + n_global, Number(0));
    const int n_threads = parallel_ ? (n_threads_ > 0 ? n_threads_ : omp_get_max_threads()) : 1;
    std::vector<Scratch> scratch(n_threads, Scratch(*this));
    std::vector<OperatorCounters> local(n_threads);
    for (const auto& color : colors_) {
      const long nchunks = static_cast<long>(color.size());
#pragma omp parallel for schedule(static) num_threads(n_threads) if (n_threads > 1)
      for (long i = 0; i < nchunks; ++i) {
        const int t = omp_get_thread_num();
        process_chunk(chunks_[color[i]], dst, src, scratch[t], local[t]);
      }
    }
    for (const auto& l : local) counters += l;
    ++counters.applies;
    for (std::size_t i = 0; i < n_global; ++i)
      if (dofs_.dirichlet_mask[i]) dst[i] = src[i];
  }

  void set_execution(bool parallel, int n_threads) {
    parallel_ = parallel;
    n_threads_ = n_threads;
  }

 private:
  struct Scratch {
    std::vector<Number> u, v, y, up, vp, yp, scale;
    explicit Scratch(const Kernel& k) {
      const int cols = std::max({k.cpl_, k.nc_, 4});
      const int rows = std::max(k.cell_rows_, 4 * k.n_qf_);
      u.resize(k.n_ * cols * W);
      y.resize(k.n_ * cols * W);
      up.resize(k.n_ * cols * W);
      yp.resize(k.n_ * cols * W);
      v.resize(rows * cols * W);
      vp.resize(rows * cols * W);
      scale.resize(10 * W);
    }
  };

  int passes() const { return components_ ? 1 : nc_; }
  int cell_cols() const { return components_ ? nc_ : cpl_; }

  // geometry per cell column: affine J^-T (9), nu det, ms det; curved the
  // same triple per quadrature point
  int geo_stride() const { return curved_ ? 11 * n_q_ : 11; }

  void build_cell_geometry(const GeometryData& g, double ms, double nu) {
    const int stride = geo_stride();
    cell_geo_.assign(batches_.size() * cpl_ * stride * W, Number(0));
    for (std::size_t b = 0; b < batches_.size(); ++b)
      for (int s = 0; s < W * cpl_; ++s) {
        const int col = s / W, lane = s % W;
        const index_t cell = batches_[b].cells[s];
        Number* base = cell_geo_.data() + ((b * cpl_ + col) * stride) * W + lane;
        if (!curved_) {
          for (int k = 0; k < 9; ++k) base[k * W] = static_cast<Number>(g.jac_inv_t[cell][k]);
          base[9 * W] = static_cast<Number>(nu * g.det_j[cell]);
          base[10 * W] = static_cast<Number>(ms * g.det_j[cell]);
        } else {
          for (int q = 0; q < n_q_; ++q) {
            const Mat3& jit = g.jac_inv_t[cell * n_q_ + q];
            Number* p = base + 11 * q * W;
            for (int k = 0; k < 9; ++k) p[k * W] = static_cast<Number>(jit[k]);
            p[9 * W] = static_cast<Number>(nu * g.jxw_points[cell * n_q_ + q]);
            p[10 * W] = static_cast<Number>(ms * g.jxw_points[cell * n_q_ + q]);
          }
        }
      }
  }

  void build_chunks(const TetMesh& mesh, const OperatorConfig& cfg, double nu) {
    const std::size_t per_chunk = std::max<std::size_t>(1, cfg.chunk_cells / (W * cpl_));
    const std::size_t cells_per_batch = static_cast<std::size_t>(W) * cpl_;
    const bool faces = dg_ && has_stiff_;
    // faces owned by the chunk of their minus cell
    std::vector<std::vector<std::size_t>> interior_of_chunk, boundary_of_chunk;
    const std::size_t n_chunks = (batches_.size() + per_chunk - 1) / per_chunk;
    if (faces) {
      interior_of_chunk.resize(n_chunks);
      boundary_of_chunk.resize(n_chunks);
      for (std::size_t i = 0; i < mesh.interior_faces.size(); ++i)
        interior_of_chunk[mesh.interior_faces[i].cell_minus / cells_per_batch / per_chunk].push_back(i);
      for (std::size_t i = 0; i < mesh.boundary_faces.size(); ++i)
        if (is_dirichlet_face_[i]) boundary_of_chunk[mesh.boundary_faces[i].cell / cells_per_batch / per_chunk].push_back(i);
    }
    const int face_group = (!components_ && cpl_ == 4) ? 4 : 1;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      Chunk ch;
      ch.batch_begin = c * per_chunk;
      ch.batch_end = std::min(batches_.size(), ch.batch_begin + per_chunk);
      ch.face_begin = face_batches_.size();
      if (faces) {
        std::map<int, std::vector<index_t>> by_key;
        for (std::size_t i : interior_of_chunk[c]) {
          const auto& f = mesh.interior_faces[i];
          by_key[(f.face_minus * 4 + f.face_plus) * 6 + f.orientation.code()].push_back(static_cast<index_t>(i));
        }
        for (const auto& [key, list] : by_key)
          add_face_batches(list, false, key / 24, (key / 6) % 4, key % 6, face_group);
        std::map<int, std::vector<index_t>> by_face;
        for (std::size_t i : boundary_of_chunk[c]) by_face[mesh.boundary_faces[i].face].push_back(static_cast<index_t>(i));
        for (const auto& [f, list] : by_face) add_face_batches(list, true, f, 0, 0, face_group);
      }
      ch.face_end = face_batches_.size();
      chunks_.push_back(ch);
    }
    if (faces) build_face_geometry(mesh, nu);
  }

  void add_face_batches(const std::vector<index_t>& list, bool boundary, int fm, int fp, int o, int group) {
    std::size_t pos = 0;
    while (pos < list.size()) {
      const std::size_t left = list.size() - pos;
      const int fcols = (group == 4 && left >= static_cast<std::size_t>(4 * W)) ? 4 : 1;
      FaceBatch fb;
      fb.boundary = boundary;
      fb.face_minus = fm;
      fb.face_plus = fp;
      fb.orientation = o;
      fb.fcols = fcols;
      const std::size_t slots = static_cast<std::size_t>(fcols) * W;
      for (std::size_t s = 0; s < slots; ++s) {
        const bool act = pos + s < list.size();
        fb.faces.push_back(act ? list[pos + s] : list.back());
        fb.active.push_back(act);
      }
      pos += std::min(slots, left);
      face_batches_.push_back(std::move(fb));
    }
  }

  // interior: per face column and point a_minus (3), a_plus (3), JxW; then
  // the penalty per face column. boundary: a (3), JxW; then the penalty.
  static int face_point_stride(bool boundary) { return boundary ? 4 : 7; }

  void build_face_geometry(const TetMesh& mesh, double nu) {
    const GeometryData& g = disc_.geometry;
    std::size_t total = 0;
    for (auto& fb : face_batches_) {
      fb.geo_offset = total;
      total += static_cast<std::size_t>(fb.fcols) * (n_qf_ * face_point_stride(fb.boundary) + 1) * W;
    }
    face_geo_.assign(total, Number(0));
    for (auto& fb : face_batches_) {
      const int ps = face_point_stride(fb.boundary);
      for (int s = 0; s < fb.fcols * W; ++s) {
        const int col = s / W, lane = s % W;
        const index_t f = fb.faces[s];
        Number* base = face_geo_.data() + fb.geo_offset + static_cast<std::size_t>(col) * (n_qf_ * ps + 1) * W + lane;
        const FaceGeometry& fg = fb.boundary ? g.boundary : g.interior;
        index_t cm, cp = 0;
        if (fb.boundary) {
          cm = mesh.boundary_faces[f].cell;
        } else {
          cm = mesh.interior_faces[f].cell_minus;
          cp = mesh.interior_faces[f].cell_plus;
        }
        for (int q = 0; q < n_qf_; ++q) {
          const std::size_t idx = static_cast<std::size_t>(f) * n_qf_ + q;
          const Vec3& nrm = fg.normals[idx];
          const Mat3& jm = curved_ ? fg.jac_inv_t_minus[idx] : g.jac_inv_t[cm];
          const Vec3 am = matvec_transpose(jm, nrm);
          Number* p = base + static_cast<std::size_t>(q) * ps * W;
          for (int k = 0; k < 3; ++k) p[k * W] = static_cast<Number>(am[k]);
          if (!fb.boundary) {
            const Mat3& jp = curved_ ? fg.jac_inv_t_plus[idx] : g.jac_inv_t[cp];
            const Vec3 ap = matvec_transpose(jp, nrm);
            for (int k = 0; k < 3; ++k) p[(3 + k) * W] = static_cast<Number>(ap[k]);
          }
          p[(ps - 1) * W] = static_cast<Number>(nu * fg.jxw[idx]);
        }
        base[static_cast<std::size_t>(n_qf_) * ps * W] =
            static_cast<Number>(fb.boundary ? penalty_.boundary[f] : penalty_.interior[f]);
      }
    }
  }

  void build_gather_plans() {
    // CG only; DG uses the contiguous base index of each cell
    if (dg_) return;
    const int cols = cell_cols();
    for (const auto& b : batches_)
      for (int pass = 0; pass < passes(); ++pass) {
        plan_begin_.push_back(plan_slot_.size());
        for (int s = 0; s < W * cpl_; ++s) {
          if (!b.active[s]) continue;
          const int lane = s % W;
          auto cd = dofs_.dofs(b.cells[s]);
          for (int c = 0; c < (components_ ? nc_ : 1); ++c) {
            const int comp = components_ ? c : pass;
            const int col = components_ ? c : s / W;
            for (int j = 0; j < n_; ++j) {
              const index_t gidx = cd[comp * n_ + j];
              if (dofs_.dirichlet_mask[gidx]) continue;
              plan_slot_.push_back(static_cast<std::uint16_t>((j * cols + col) * W + lane));
              plan_index_.push_back(gidx);
            }
          }
        }
      }
    plan_begin_.push_back(plan_slot_.size());
  }

  void color_chunks(const TetMesh& mesh) {
    std::vector<std::vector<index_t>> res(chunks_.size());
    for (std::size_t c = 0; c < chunks_.size(); ++c) {
      auto& r = res[c];
      for (std::size_t b = chunks_[c].batch_begin; b < chunks_[c].batch_end; ++b)
        for (int s = 0; s < W * cpl_; ++s) {
          if (!batches_[b].active[s]) continue;
          const index_t cell = batches_[b].cells[s];
          if (dg_) {
            r.push_back(cell);
          } else {
            for (index_t gidx : dofs_.dofs(cell)) r.push_back(gidx);
          }
        }
      for (std::size_t fb = chunks_[c].face_begin; fb < chunks_[c].face_end; ++fb) {
        const auto& batch = face_batches_[fb];
        if (batch.boundary) continue;
        for (std::size_t s = 0; s < batch.faces.size(); ++s)
          if (batch.active[s]) r.push_back(mesh.interior_faces[batch.faces[s]].cell_plus);
      }
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    const auto color = greedy_coloring(res, dg_ ? mesh.n_cells() : dofs_.n_global_dofs);
    const int n_colors = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
    colors_.assign(n_colors, {});
    for (std::size_t c = 0; c < chunks_.size(); ++c) colors_[color[c]].push_back(c);
  }

  void process_chunk(const Chunk& ch, Number* dst, const Number* src, Scratch& s, OperatorCounters& cnt) const {
    for (std::size_t b = ch.batch_begin; b < ch.batch_end; ++b)
      for (int pass = 0; pass < passes(); ++pass) process_cells(b, pass, dst, src, s, cnt);
    for (std::size_t fb = ch.face_begin; fb < ch.face_end; ++fb)
      for (int pass = 0; pass < passes(); ++pass) {
        if (face_batches_[fb].boundary)
          process_boundary(face_batches_[fb], pass, dst, src, s, cnt);
        else
          process_interior(face_batches_[fb], pass, dst, src, s, cnt);
      }
  }

  void process_cells(std::size_t b, int pass, Number* dst, const Number* src, Scratch& s,
                     OperatorCounters& cnt) const {
    const CellBatch& batch = batches_[b];
    const int cols = cell_cols();
    const std::size_t block = static_cast<std::size_t>(n_) * cols * W;
    Number* u = s.u.data();
    Number* v = s.v.data();
    Number* y = s.y.data();
    std::fill(u, u + block, Number(0));

    std::uint64_t scattered = 0;
    const bool sched = stage_ == KernelStage::InstructionScheduled;
    if (sched && !dg_) {
      const std::size_t pb = plan_begin_[b * passes() + pass], pe = plan_begin_[b * passes() + pass + 1];
      for (std::size_t i = pb; i < pe; ++i) u[plan_slot_[i]] = src[plan_index_[i]];
      cnt.index_bytes += (pe - pb) * (sizeof(index_t) + sizeof(std::uint16_t));
    } else {
      for (int sl = 0; sl < W * cpl_; ++sl) {
        if (!batch.active[sl]) continue;
        const int lane = sl % W;
        const index_t cell = batch.cells[sl];
        for (int c = 0; c < (components_ ? nc_ : 1); ++c) {
          const int comp = components_ ? c : pass;
          const int col = components_ ? c : sl / W;
          if (sched) {
            const std::size_t base = (static_cast<std::size_t>(cell) * nc_ + comp) * n_;
            for (int j = 0; j < n_; ++j) u[(j * cols + col) * W + lane] = src[base + j];
          } else {
            auto cd = dofs_.dofs(cell);
            for (int j = 0; j < n_; ++j) {
              const index_t gidx = cd[comp * n_ + j];
              if (!dofs_.dirichlet_mask[gidx]) u[(j * cols + col) * W + lane] = src[gidx];
            }
          }
        }
        cnt.index_bytes += sched ? sizeof(index_t) : sizeof(index_t) * n_ * (components_ ? nc_ : 1);
      }
    }

    kernels::interpolate<Number, W>(stage_, cell_matrix_, cols, u, v);
    quadrature_cells(b, cols, v, s);
    kernels::integrate<Number, W>(stage_, cell_matrix_, cols, v, y);

    if (sched && !dg_) {
      const std::size_t pb = plan_begin_[b * passes() + pass], pe = plan_begin_[b * passes() + pass + 1];
      for (std::size_t i = pb; i < pe; ++i) dst[plan_index_[i]] += y[plan_slot_[i]];
      scattered = pe - pb;
    } else {
      for (int sl = 0; sl < W * cpl_; ++sl) {
        if (!batch.active[sl]) continue;
        const int lane = sl % W;
        const index_t cell = batch.cells[sl];
        for (int c = 0; c < (components_ ? nc_ : 1); ++c) {
          const int comp = components_ ? c : pass;
          const int col = components_ ? c : sl / W;
          if (sched) {
            const std::size_t base = (static_cast<std::size_t>(cell) * nc_ + comp) * n_;
            for (int j = 0; j < n_; ++j) dst[base + j] += y[(j * cols + col) * W + lane];
            scattered += n_;
          } else {
            auto cd = dofs_.dofs(cell);
            for (int j = 0; j < n_; ++j) {
              const index_t gidx = cd[comp * n_ + j];
              if (dofs_.dirichlet_mask[gidx]) continue;
              dst[gidx] += y[(j * cols + col) * W + lane];
              ++scattered;
            }
          }
        }
      }
    }

    const std::uint64_t active = static_cast<std::uint64_t>(batch.n_active()) * (components_ ? nc_ : 1);
    cnt.cells += active;
    std::uint64_t point_flops = 0;
    if (has_stiff_) point_flops += kCellPointFlops * n_q_ + (curved_ ? 0 : kAffineScaleFlops);
    if (has_mass_) point_flops += (curved_ ? 1 : 2) * n_q_;
    cnt.cell_flops += active * (4ull * cell_rows_ * n_ + point_flops) + scattered;
    cnt.vector_bytes += active * sizeof(Number) * n_ + scattered * 2 * sizeof(Number);
    const std::uint64_t geo_per_cell = (curved_ ? 11ull * n_q_ : 11ull) * sizeof(Number);
    cnt.geometry_bytes += static_cast<std::uint64_t>(batch.n_active()) * geo_per_cell;
  }

  // In-place quadrature-point action on the cell block.
  void quadrature_cells(std::size_t b, int cols, Number* v, Scratch& s) const {
    const int stride = geo_stride();
    for (int col = 0; col < cols; ++col) {
      const int gcol = components_ ? 0 : col;
      const Number* geo = cell_geo_.data() + ((b * cpl_ + gcol) * stride) * W;
      if (!curved_) {
        // bt[3k + r] = nu det J^-T[r][k]
        Number* bt = s.scale.data();
        for (int k = 0; k < 3; ++k)
          for (int r = 0; r < 3; ++r)
            for (int l = 0; l < W; ++l) bt[(3 * k + r) * W + l] = geo[9 * W + l] * geo[(3 * r + k) * W + l];
        for (int q = 0; q < n_q_; ++q) {
          const Number w = weights_[q];
          if (has_mass_) {
            Number* vv = v + (q * cols + col) * W;
            for (int l = 0; l < W; ++l) vv[l] *= geo[10 * W + l] * w;
          }
          if (!has_stiff_) continue;
          Number* g0 = v + ((grad_offset_ + 3 * q) * cols + col) * W;
          Number* g1 = g0 + cols * W;
          Number* g2 = g1 + cols * W;
          for (int l = 0; l < W; ++l) {
            const Number x0 = g0[l], x1 = g1[l], x2 = g2[l];
            const Number p0 = (geo[0 * W + l] * x0 + geo[1 * W + l] * x1 + geo[2 * W + l] * x2) * w;
            const Number p1 = (geo[3 * W + l] * x0 + geo[4 * W + l] * x1 + geo[5 * W + l] * x2) * w;
            const Number p2 = (geo[6 * W + l] * x0 + geo[7 * W + l] * x1 + geo[8 * W + l] * x2) * w;
            g0[l] = bt[0 * W + l] * p0 + bt[1 * W + l] * p1 + bt[2 * W + l] * p2;
            g1[l] = bt[3 * W + l] * p0 + bt[4 * W + l] * p1 + bt[5 * W + l] * p2;
            g2[l] = bt[6 * W + l] * p0 + bt[7 * W + l] * p1 + bt[8 * W + l] * p2;
          }
        }
      } else {
        for (int q = 0; q < n_q_; ++q) {
          const Number* gq = geo + 11 * q * W;
          if (has_mass_) {
            Number* vv = v + (q * cols + col) * W;
            for (int l = 0; l < W; ++l) vv[l] *= gq[10 * W + l];
          }
          if (!has_stiff_) continue;
          Number* g0 = v + ((grad_offset_ + 3 * q) * cols + col) * W;
          Number* g1 = g0 + cols * W;
          Number* g2 = g1 + cols * W;
          for (int l = 0; l < W; ++l) {
            const Number x0 = g0[l], x1 = g1[l], x2 = g2[l];
            const Number jw = gq[9 * W + l];
            const Number p0 = (gq[0 * W + l] * x0 + gq[1 * W + l] * x1 + gq[2 * W + l] * x2) * jw;
            const Number p1 = (gq[3 * W + l] * x0 + gq[4 * W + l] * x1 + gq[5 * W + l] * x2) * jw;
            const Number p2 = (gq[6 * W + l] * x0 + gq[7 * W + l] * x1 + gq[8 * W + l] * x2) * jw;
            g0[l] = gq[0 * W + l] * p0 + gq[3 * W + l] * p1 + gq[6 * W + l] * p2;
            g1[l] = gq[1 * W + l] * p0 + gq[4 * W + l] * p1 + gq[7 * W + l] * p2;
            g2[l] = gq[2 * W + l] * p0 + gq[5 * W + l] * p1 + gq[8 * W + l] * p2;
          }
        }
      }
    }
  }

  void gather_face_side(const FaceBatch& fb, int pass, int cols, bool plus, const Number* src, Number* u,
                        OperatorCounters& cnt) const {
    const TetMesh& mesh = *disc_.mesh;
    const bool sched = stage_ == KernelStage::InstructionScheduled;
    std::fill(u, u + static_cast<std::size_t>(n_) * cols * W, Number(0));
    for (int sl = 0; sl < fb.fcols * W; ++sl) {
      if (!fb.active[sl]) continue;
      const int lane = sl % W;
      const index_t f = fb.faces[sl];
      const index_t cell = fb.boundary ? mesh.boundary_faces[f].cell
                                       : (plus ? mesh.interior_faces[f].cell_plus : mesh.interior_faces[f].cell_minus);
      for (int c = 0; c < (components_ ? nc_ : 1); ++c) {
        const int comp = components_ ? c : pass;
        const int col = components_ ? c : sl / W;
        if (sched) {
          const std::size_t base = (static_cast<std::size_t>(cell) * nc_ + comp) * n_;
          for (int j = 0; j < n_; ++j) u[(j * cols + col) * W + lane] = src[base + j];
        } else {
          auto cd = dofs_.dofs(cell);
          for (int j = 0; j < n_; ++j) u[(j * cols + col) * W + lane] = src[cd[comp * n_ + j]];
        }
      }
      cnt.index_bytes += sched ? sizeof(index_t) : sizeof(index_t) * n_ * (components_ ? nc_ : 1);
    }
  }

  void scatter_face_side(const FaceBatch& fb, int pass, int cols, bool plus, const Number* y, Number* dst) const {
    const TetMesh& mesh = *disc_.mesh;
    for (int sl = 0; sl < fb.fcols * W; ++sl) {
      if (!fb.active[sl]) continue;
      const int lane = sl % W;
      const index_t f = fb.faces[sl];
      const index_t cell = fb.boundary ? mesh.boundary_faces[f].cell
                                       : (plus ? mesh.interior_faces[f].cell_plus : mesh.interior_faces[f].cell_minus);
      for (int c = 0; c < (components_ ? nc_ : 1); ++c) {
        const int comp = components_ ? c : pass;
        const int col = components_ ? c : sl / W;
        const std::size_t base = (static_cast<std::size_t>(cell) * nc_ + comp) * n_;
        for (int j = 0; j < n_; ++j) dst[base + j] += y[(j * cols + col) * W + lane];
      }
    }
  }

  int active_faces(const FaceBatch& fb) const {
    return static_cast<int>(std::count(fb.active.begin(), fb.active.end(), 1));
  }

  void process_interior(const FaceBatch& fb, int pass, Number* dst, const Number* src, Scratch& s,
                        OperatorCounters& cnt) const {
    const int cols = components_ ? nc_ : fb.fcols;
    const auto& em = face_tables_[BasisTable::face_index(fb.face_minus, 0)];
    const auto& ep = face_tables_[BasisTable::face_index(fb.face_plus, fb.orientation)];
    gather_face_side(fb, pass, cols, false, src, s.u.data(), cnt);
    gather_face_side(fb, pass, cols, true, src, s.up.data(), cnt);
    kernels::interpolate<Number, W>(stage_, em, cols, s.u.data(), s.v.data());
    kernels::interpolate<Number, W>(stage_, ep, cols, s.up.data(), s.vp.data());

    const int ps = face_point_stride(false);
    Number* vm = s.v.data();
    Number* vp = s.vp.data();
    const int rs = cols * W;  // row stride
    for (int col = 0; col < cols; ++col) {
      const int gcol = components_ ? 0 : col;
      const Number* geo = face_geo_.data() + fb.geo_offset + static_cast<std::size_t>(gcol) * (n_qf_ * ps + 1) * W;
      const Number* tau = geo + static_cast<std::size_t>(n_qf_) * ps * W;
      for (int q = 0; q < n_qf_; ++q) {
        const Number* gq = geo + q * ps * W;
        Number* um = vm + q * rs + col * W;
        Number* up = vp + q * rs + col * W;
        Number* gm = vm + (n_qf_ + 3 * q) * rs + col * W;
        Number* gp = vp + (n_qf_ + 3 * q) * rs + col * W;
        for (int l = 0; l < W; ++l) {
          const Number am0 = gq[0 * W + l], am1 = gq[1 * W + l], am2 = gq[2 * W + l];
          const Number ap0 = gq[3 * W + l], ap1 = gq[4 * W + l], ap2 = gq[5 * W + l];
          const Number jxw = gq[6 * W + l];
          const Number dnm = am0 * gm[l] + am1 * gm[rs + l] + am2 * gm[2 * rs + l];
          const Number dnp = ap0 * gp[l] + ap1 * gp[rs + l] + ap2 * gp[2 * rs + l];
          const Number jump = um[l] - up[l];
          const Number avg = Number(0.5) * (dnm + dnp);
          const Number sv = (tau[l] * jump - avg) * jxw;
          const Number t = Number(-0.5) * jxw * jump;
          um[l] = sv;
          up[l] = -sv;
          gm[l] = am0 * t;
          gm[rs + l] = am1 * t;
          gm[2 * rs + l] = am2 * t;
          gp[l] = ap0 * t;
          gp[rs + l] = ap1 * t;
          gp[2 * rs + l] = ap2 * t;
        }
      }
    }

    kernels::integrate<Number, W>(stage_, em, cols, s.v.data(), s.y.data());
    kernels::integrate<Number, W>(stage_, ep, cols, s.vp.data(), s.yp.data());
    scatter_face_side(fb, pass, cols, false, s.y.data(), dst);
    scatter_face_side(fb, pass, cols, true, s.yp.data(), dst);

    const std::uint64_t active = static_cast<std::uint64_t>(active_faces(fb)) * (components_ ? nc_ : 1);
    cnt.interior_faces += active;
    cnt.interior_face_flops += active * (2ull * 2 * 2 * 4 * n_qf_ * n_ + kInteriorPointFlops * n_qf_);
    cnt.vector_bytes += active * 2 * 3 * n_ * sizeof(Number);
    cnt.geometry_bytes += static_cast<std::uint64_t>(active_faces(fb)) * (n_qf_ * ps + 1) * sizeof(Number);
  }

  void process_boundary(const FaceBatch& fb, int pass, Number* dst, const Number* src, Scratch& s,
                        OperatorCounters& cnt) const {
    const int cols = components_ ? nc_ : fb.fcols;
    const auto& em = face_tables_[BasisTable::face_index(fb.face_minus, 0)];
    gather_face_side(fb, pass, cols, false, src, s.u.data(), cnt);
    kernels::interpolate<Number, W>(stage_, em, cols, s.u.data(), s.v.data());
    const int ps = face_point_stride(true);
    Number* vm = s.v.data();
    const int rs = cols * W;
    for (int col = 0; col < cols; ++col) {
      const int gcol = components_ ? 0 : col;
      const Number* geo = face_geo_.data() + fb.geo_offset + static_cast<std::size_t>(gcol) * (n_qf_ * ps + 1) * W;
      const Number* tau = geo + static_cast<std::size_t>(n_qf_) * ps * W;
      for (int q = 0; q < n_qf_; ++q) {
        const Number* gq = geo + q * ps * W;
        Number* um = vm + q * rs + col * W;
        Number* gm = vm + (n_qf_ + 3 * q) * rs + col * W;
        for (int l = 0; l < W; ++l) {
          const Number a0 = gq[0 * W + l], a1 = gq[1 * W + l], a2 = gq[2 * W + l];
          const Number jxw = gq[3 * W + l];
          const Number dn = a0 * gm[l] + a1 * gm[rs + l] + a2 * gm[2 * rs + l];
          const Number u = um[l];
          const Number t = -u * jxw;
          um[l] = (tau[l] * u - dn) * jxw;
          gm[l] = a0 * t;
          gm[rs + l] = a1 * t;
          gm[2 * rs + l] = a2 * t;
        }
      }
    }
    kernels::integrate<Number, W>(stage_, em, cols, s.v.data(), s.y.data());
    scatter_face_side(fb, pass, cols, false, s.y.data(), dst);

    const std::uint64_t active = static_cast<std::uint64_t>(active_faces(fb)) * (components_ ? nc_ : 1);
    cnt.boundary_faces += active;
    cnt.boundary_face_flops += active * (2ull * 2 * 4 * n_qf_ * n_ + kBoundaryPointFlops * n_qf_);
    cnt.vector_bytes += active * 3 * n_ * sizeof(Number);
    cnt.geometry_bytes += static_cast<std::uint64_t>(active_faces(fb)) * (n_qf_ * ps + 1) * sizeof(Number);
  }

  const Discretization& disc_;
  const DoFMap& dofs_;
  KernelStage stage_;
  int n_ = 0, nc_ = 1, n_q_ = 0, n_qf_ = 0;
  bool dg_ = false, curved_ = false, components_ = false;
  int cpl_ = 1;
  bool has_mass_ = false, has_stiff_ = true;
  int grad_offset_ = 0;
  int cell_rows_ = 0;
  kernels::StagedMatrix<Number> cell_matrix_;
  std::vector<Number> weights_;
  std::vector<CellBatch> batches_;
  std::vector<Number> cell_geo_;
  std::vector<kernels::StagedMatrix<Number>> face_tables_;
  PenaltyData penalty_;
  std::vector<char> is_dirichlet_face_;
  std::vector<FaceBatch> face_batches_;
  std::vector<Number> face_geo_;
  std::vector<Chunk> chunks_;
  std::vector<std::vector<std::size_t>> colors_;
  std::vector<std::size_t> plan_begin_;
  std::vector<std::uint16_t> plan_slot_;
  std::vector<index_t> plan_index_;
  bool parallel_ = false;
  int n_threads_ = 0;
};

template <class Number, int W>
std::unique_ptr<KernelBase<Number>> make_kernel_w(const Discretization& d, const OperatorForm& f,
                                                  const OperatorConfig& c) {
  auto k = std::make_unique<Kernel<Number, W>>(d, f, c);
  k->set_execution(c.execution == Execution::Parallel, c.n_threads);
  return k;
}

template <class Number>
std::unique_ptr<KernelBase<Number>> make_kernel(const Discretization& d, const OperatorForm& f,
                                                const OperatorConfig& c) {
  switch (c.resolved_lane_width()) {
    case 1: return make_kernel_w<Number, 1>(d, f, c);
    case 2: return make_kernel_w<Number, 2>(d, f, c);
    case 4: return make_kernel_w<Number, 4>(d, f, c);
    case 8: return make_kernel_w<Number, 8>(d, f, c);
    case 16: return make_kernel_w<Number, 16>(d, f, c);
    default: throw Error("lane width must be 1, 2, 4, 8 or 16");
  }
}

}  // namespace

template <class Number>
struct MatrixFreeOperator<Number>::Impl {
  const Discretization* disc;
  OperatorForm form;
  OperatorConfig config;
  std::unique_ptr<KernelBase<Number>> kernel;
  mutable OperatorCounters counters;
};

template <class Number>
MatrixFreeOperator<Number>::MatrixFreeOperator(const Discretization& disc, const OperatorForm& form,
                                               const OperatorConfig& config)
    : impl_(std::make_unique<Impl>()) {
  if (!disc.mesh) throw Error("discretization without mesh");
  if (config.quadrature != disc.variant)
    throw Error("operator quadrature variant differs from the discretization's cell rule");
  const Precision expected = sizeof(Number) == 8 ? Precision::F64 : Precision::F32;
  if (config.precision != expected) throw Error("operator precision does not match the number type");
  if (config.batching == Batching::ComponentsBatched && disc.n_components() != 3)
    throw Error("components batching requires a 3-component space");
  if (form.kind == FormKind::Helmholtz) form.coeffs.validate();
  if (config.chunk_cells < 1) throw Error("chunk_cells must be positive");
  if (disc.space() == Space::DG && !disc.geometry.has_faces()) throw Error("DG operator requires face geometry");
  impl_->disc = &disc;
  impl_->form = form;
  impl_->config = config;
  impl_->kernel = make_kernel<Number>(disc, form, config);
}

template <class Number>
MatrixFreeOperator<Number>::~MatrixFreeOperator() = default;
template <class Number>
MatrixFreeOperator<Number>::MatrixFreeOperator(MatrixFreeOperator&&) noexcept = default;
template <class Number>
MatrixFreeOperator<Number>& MatrixFreeOperator<Number>::operator=(MatrixFreeOperator&&) noexcept = default;

template <class Number>
std::size_t MatrixFreeOperator<Number>::size() const {
  return impl_->disc->n_dofs();
}

template <class Number>
void MatrixFreeOperator<Number>::vmult(std::span<Number> dst, std::span<const Number> src) const {
  if (dst.size() != size() || src.size() != size())
    throw DimensionMismatch("operator size " + std::to_string(size()) + ", got vectors of length " +
                            std::to_string(src.size()) + " and " + std::to_string(dst.size()));
  impl_->kernel->apply(dst.data(), src.data(), impl_->counters);
}

template <class Number>
std::vector<Number> MatrixFreeOperator<Number>::apply(std::span<const Number> src) const {
  std::vector<Number> dst(size());
  vmult(dst, src);
  return dst;
}

template <class Number>
const OperatorCounters& MatrixFreeOperator<Number>::counters() const {
  return impl_->counters;
}

template <class Number>
void MatrixFreeOperator<Number>::reset_counters() const {
  impl_->counters = {};
}

template <class Number>
std::size_t MatrixFreeOperator<Number>::memory_bytes() const {
  return impl_->kernel->bytes();
}

template <class Number>
std::size_t MatrixFreeOperator<Number>::n_colors() const {
  return impl_->kernel->n_colors();
}

template <class Number>
const Discretization& MatrixFreeOperator<Number>::discretization() const {
  return *impl_->disc;
}

template <class Number>
const OperatorForm& MatrixFreeOperator<Number>::form() const {
  return impl_->form;
}

template <class Number>
const OperatorConfig& MatrixFreeOperator<Number>::config() const {
  return impl_->config;
}

template class MatrixFreeOperator<double>;
template class MatrixFreeOperator<float>;

std::vector<double> apply_cg_poisson(const OperatorConfig& config, const Discretization& disc,
                                     std::span<const double> u) {
  if (disc.space() != Space::CG) throw Error("apply_cg_poisson requires a CG space");
  return MatrixFreeOperator<double>(disc, OperatorForm::laplace(), config).apply(u);
}

std::vector<double> apply_dg_sipg(const OperatorConfig& config, const Discretization& disc, const SipgConfig& sipg,
                                  std::span<const double> u) {
  if (disc.space() != Space::DG) throw Error("apply_dg_sipg requires a DG space");
  return MatrixFreeOperator<double>(disc, OperatorForm::laplace(sipg), config).apply(u);
}

std::vector<double> apply_helmholtz(const OperatorConfig& config, const Discretization& disc, const SipgConfig& sipg,
                                    const HelmholtzCoefficients& coeffs, std::span<const double> u) {
  if (disc.n_components() != 3) throw Error("apply_helmholtz requires a 3-component space");
  return MatrixFreeOperator<double>(disc, OperatorForm::helmholtz(coeffs, sipg), config).apply(u);
}

}  // namespace tetmf

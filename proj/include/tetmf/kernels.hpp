#pragma once

#include <algorithm>
#include <vector>

namespace tetmf {

enum class KernelStage { Reference, DataStructures, MatrixMatrix, InstructionScheduled };

/// Dense building blocks of the cell and face kernels.
///
/// Blocks are lane-major: entry (row, column, lane) of a block with nc
/// columns sits at (row * nc + column) * W + lane. E is row-major rows x n;
/// E_rep is the lane-replicated copy used by the Reference stage, entry
/// (r, j, lane) at (r * n + j) * W + lane.
namespace kernels {

template <class Number>
std::vector<Number> replicate_lanes(const std::vector<Number>& e, int W) {
  std::vector<Number> r(e.size() * W);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int l = 0; l < W; ++l) r[i * W + l] = e[i];
  return r;
}

// V = E U, one column at a time, lane-replicated matrix.
template <class Number, int W>
void interpolate_reference(const Number* e_rep, int rows, int n, int nc, const Number* u, Number* v) {
  for (int c = 0; c < nc; ++c)
    for (int r = 0; r < rows; ++r) {
      Number acc[W] = {};
      for (int j = 0; j < n; ++j) {
        const Number* e = e_rep + (r * n + j) * W;
        const Number* x = u + (j * nc + c) * W;
        for (int l = 0; l < W; ++l) acc[l] += e[l] * x[l];
      }
      for (int l = 0; l < W; ++l) v[(r * nc + c) * W + l] = acc[l];
    }
}

// V = E U, one column at a time, scalar matrix entries broadcast to lanes.
template <class Number, int W>
void interpolate_broadcast(const Number* e, int rows, int n, int nc, const Number* u, Number* v) {
  for (int c = 0; c < nc; ++c)
    for (int r = 0; r < rows; ++r) {
      Number acc[W] = {};
      for (int j = 0; j < n; ++j) {
        const Number s = e[r * n + j];
        const Number* x = u + (j * nc + c) * W;
        for (int l = 0; l < W; ++l) acc[l] += s * x[l];
      }
      for (int l = 0; l < W; ++l) v[(r * nc + c) * W + l] = acc[l];
    }
}

template <class Number, int W, int NC>
void interpolate_mm_fixed(const Number* e, int rows, int n, const Number* u, Number* v) {
  int r = 0;
  for (; r + 4 <= rows; r += 4) {
    Number acc[4][NC][W] = {};
    for (int j = 0; j < n; ++j) {
      const Number e0 = e[r * n + j], e1 = e[(r + 1) * n + j], e2 = e[(r + 2) * n + j], e3 = e[(r + 3) * n + j];
      const Number* x = u + j * NC * W;
      for (int c = 0; c < NC; ++c)
        for (int l = 0; l < W; ++l) {
          const Number xv = x[c * W + l];
          acc[0][c][l] += e0 * xv;
          acc[1][c][l] += e1 * xv;
          acc[2][c][l] += e2 * xv;
          acc[3][c][l] += e3 * xv;
        }
    }
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < NC; ++c)
        for (int l = 0; l < W; ++l) v[((r + i) * NC + c) * W + l] = acc[i][c][l];
  }
  for (; r < rows; ++r) {
    Number acc[NC][W] = {};
    for (int j = 0; j < n; ++j) {
      const Number s = e[r * n + j];
      const Number* x = u + j * NC * W;
      for (int c = 0; c < NC; ++c)
        for (int l = 0; l < W; ++l) acc[c][l] += s * x[c * W + l];
    }
    for (int c = 0; c < NC; ++c)
      for (int l = 0; l < W; ++l) v[(r * NC + c) * W + l] = acc[c][l];
  }
}

// V = E U for all columns at once, rows blocked by four.
template <class Number, int W>
void interpolate_mm(const Number* e, int rows, int n, int nc, const Number* u, Number* v) {
  switch (nc) {
    case 1: return interpolate_mm_fixed<Number, W, 1>(e, rows, n, u, v);
    case 2: return interpolate_mm_fixed<Number, W, 2>(e, rows, n, u, v);
    case 3: return interpolate_mm_fixed<Number, W, 3>(e, rows, n, u, v);
    case 4: return interpolate_mm_fixed<Number, W, 4>(e, rows, n, u, v);
    default: return interpolate_broadcast<Number, W>(e, rows, n, nc, u, v);
  }
}

// Y = E^T V, one column at a time, lane-replicated matrix.
template <class Number, int W>
void integrate_reference(const Number* e_rep, int rows, int n, int nc, const Number* v, Number* y) {
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j < n; ++j) {
      Number acc[W] = {};
      for (int r = 0; r < rows; ++r) {
        const Number* e = e_rep + (r * n + j) * W;
        const Number* x = v + (r * nc + c) * W;
        for (int l = 0; l < W; ++l) acc[l] += e[l] * x[l];
      }
      for (int l = 0; l < W; ++l) y[(j * nc + c) * W + l] = acc[l];
    }
}

template <class Number, int W>
void integrate_broadcast(const Number* e, int rows, int n, int nc, const Number* v, Number* y) {
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j < n; ++j) {
      Number acc[W] = {};
      for (int r = 0; r < rows; ++r) {
        const Number s = e[r * n + j];
        const Number* x = v + (r * nc + c) * W;
        for (int l = 0; l < W; ++l) acc[l] += s * x[l];
      }
      for (int l = 0; l < W; ++l) y[(j * nc + c) * W + l] = acc[l];
    }
}

template <class Number, int W, int NC>
void integrate_mm_fixed(const Number* e, int rows, int n, const Number* v, Number* y) {
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    Number acc[4][NC][W] = {};
    for (int r = 0; r < rows; ++r) {
      const Number* er = e + r * n + j;
      const Number e0 = er[0], e1 = er[1], e2 = er[2], e3 = er[3];
      const Number* x = v + r * NC * W;
      for (int c = 0; c < NC; ++c)
        for (int l = 0; l < W; ++l) {
          const Number xv = x[c * W + l];
          acc[0][c][l] += e0 * xv;
          acc[1][c][l] += e1 * xv;
          acc[2][c][l] += e2 * xv;
          acc[3][c][l] += e3 * xv;
        }
    }
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < NC; ++c)
        for (int l = 0; l < W; ++l) y[((j + i) * NC + c) * W + l] = acc[i][c][l];
  }
  for (; j < n; ++j) {
    Number acc[NC][W] = {};
    for (int r = 0; r < rows; ++r) {
      const Number s = e[r * n + j];
      const Number* x = v + r * NC * W;
      for (int c = 0; c < NC; ++c)
        for (int l = 0; l < W; ++l) acc[c][l] += s * x[c * W + l];
    }
    for (int c = 0; c < NC; ++c)
      for (int l = 0; l < W; ++l) y[(j * NC + c) * W + l] = acc[c][l];
  }
}

template <class Number, int W>
void integrate_mm(const Number* e, int rows, int n, int nc, const Number* v, Number* y) {
  switch (nc) {
    case 1: return integrate_mm_fixed<Number, W, 1>(e, rows, n, v, y);
    case 2: return integrate_mm_fixed<Number, W, 2>(e, rows, n, v, y);
    case 3: return integrate_mm_fixed<Number, W, 3>(e, rows, n, v, y);
    case 4: return integrate_mm_fixed<Number, W, 4>(e, rows, n, v, y);
    default: return integrate_broadcast<Number, W>(e, rows, n, nc, v, y);
  }
}

/// Interpolation matrix in the form each stage consumes.
template <class Number>
struct StagedMatrix {
  int rows = 0;
  int n = 0;
  std::vector<Number> e;
  std::vector<Number> e_rep;

  StagedMatrix() = default;
  StagedMatrix(const std::vector<double>& m, int rows_, int n_, KernelStage stage, int W) : rows(rows_), n(n_) {
    e.assign(m.begin(), m.end());
    if (stage == KernelStage::Reference) e_rep = replicate_lanes(e, W);
  }
  std::size_t bytes() const { return (e.size() + e_rep.size()) * sizeof(Number); }
};

template <class Number, int W>
void interpolate(KernelStage stage, const StagedMatrix<Number>& m, int nc, const Number* u, Number* v) {
  switch (stage) {
    case KernelStage::Reference: return interpolate_reference<Number, W>(m.e_rep.data(), m.rows, m.n, nc, u, v);
    case KernelStage::DataStructures: return interpolate_broadcast<Number, W>(m.e.data(), m.rows, m.n, nc, u, v);
    default: return interpolate_mm<Number, W>(m.e.data(), m.rows, m.n, nc, u, v);
  }
}

template <class Number, int W>
void integrate(KernelStage stage, const StagedMatrix<Number>& m, int nc, const Number* v, Number* y) {
  switch (stage) {
    case KernelStage::Reference: return integrate_reference<Number, W>(m.e_rep.data(), m.rows, m.n, nc, v, y);
    case KernelStage::DataStructures: return integrate_broadcast<Number, W>(m.e.data(), m.rows, m.n, nc, v, y);
    default: return integrate_mm<Number, W>(m.e.data(), m.rows, m.n, nc, v, y);
  }
}

/// y = E^T d(E u) on one block. d(v) acts in place on the rows x nc x W
/// quadrature block; v must hold rows * nc * W entries.
template <class Number, int W, class PointAction>
void cell_kernel(KernelStage stage, const StagedMatrix<Number>& m, int nc, const Number* u, Number* v, Number* y,
                 PointAction&& d) {
  interpolate<Number, W>(stage, m, nc, u, v);
  d(v);
  integrate<Number, W>(stage, m, nc, v, y);
}

}  // namespace kernels
}  // namespace tetmf

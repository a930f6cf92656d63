#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tetmf/discretization.hpp"
#include "tetmf/forms.hpp"
#include "tetmf/kernels.hpp"

namespace tetmf {

enum class Batching { CellsBatched, ComponentsBatched };
enum class Precision { F64, F32 };
enum class Execution { Serial, Parallel };

struct OperatorConfig {
  KernelStage stage = KernelStage::InstructionScheduled;
  Batching batching = Batching::CellsBatched;
  /// 1, 2, 4, 8 or 16; 0 selects 4 for f64 and 8 for f32.
  int lane_width = 0;
  QuadratureVariant quadrature = QuadratureVariant::Standard;
  Precision precision = Precision::F64;
  Execution execution = Execution::Serial;
  /// Parallel execution only; 0 uses the OpenMP default.
  int n_threads = 0;
  /// Cells per scheduling chunk. Chunks are the unit of coloring.
  int chunk_cells = 256;

  int resolved_lane_width() const;
  /// MatrixMatrix and InstructionScheduled stages put four cells (or
  /// faces) into the columns of one block in CellsBatched mode.
  int cells_per_lane() const;
};

/// Logical work counters. Only active slots are counted.
struct OperatorCounters {
  std::uint64_t applies = 0;
  std::uint64_t cells = 0;           ///< cell evaluations (per component pass)
  std::uint64_t interior_faces = 0;  ///< interior face evaluations
  std::uint64_t boundary_faces = 0;  ///< boundary face evaluations
  std::uint64_t cell_flops = 0;
  std::uint64_t interior_face_flops = 0;
  std::uint64_t boundary_face_flops = 0;
  std::uint64_t index_bytes = 0;
  std::uint64_t vector_bytes = 0;
  std::uint64_t geometry_bytes = 0;

  std::uint64_t face_flops() const { return interior_face_flops + boundary_face_flops; }
  std::uint64_t total_flops() const { return cell_flops + face_flops(); }
  std::uint64_t total_bytes() const { return index_bytes + vector_bytes + geometry_bytes; }
  OperatorCounters& operator+=(const OperatorCounters& o);
};

/// Matrix-free evaluation of y = A u for the Laplace (CG stiffness or DG
/// SIPG) and vector Helmholtz forms. Rows of Dirichlet-constrained DoFs act
/// as identity rows.
///
/// Cells are processed in chunks of consecutive batches; chunks are colored
/// so that chunks of one color write disjoint entries. Colors run in order,
/// chunks of a color run in parallel in Parallel mode, so both execution
/// modes produce bitwise identical results.
template <class Number>
class MatrixFreeOperator {
 public:
  MatrixFreeOperator(const Discretization& disc, const OperatorForm& form, const OperatorConfig& config);
  ~MatrixFreeOperator();
  MatrixFreeOperator(MatrixFreeOperator&&) noexcept;
  MatrixFreeOperator& operator=(MatrixFreeOperator&&) noexcept;

  std::size_t size() const;
  /// dst = A src. Throws DimensionMismatch on wrong lengths.
  void vmult(std::span<Number> dst, std::span<const Number> src) const;
  std::vector<Number> apply(std::span<const Number> src) const;

  const OperatorCounters& counters() const;
  void reset_counters() const;
  /// Bytes of operator data: geometry, index data and tables.
  std::size_t memory_bytes() const;
  std::size_t n_colors() const;

  const Discretization& discretization() const;
  const OperatorForm& form() const;
  const OperatorConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

extern template class MatrixFreeOperator<double>;
extern template class MatrixFreeOperator<float>;

/// One-shot convenience wrappers; each builds an operator and applies it once.
std::vector<double> apply_cg_poisson(const OperatorConfig& config, const Discretization& disc,
                                     std::span<const double> u);
std::vector<double> apply_dg_sipg(const OperatorConfig& config, const Discretization& disc, const SipgConfig& sipg,
                                  std::span<const double> u);
std::vector<double> apply_helmholtz(const OperatorConfig& config, const Discretization& disc, const SipgConfig& sipg,
                                    const HelmholtzCoefficients& coeffs, std::span<const double> u);

}  // namespace tetmf

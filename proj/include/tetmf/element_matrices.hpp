#pragma once

#include <vector>

#include "tetmf/discretization.hpp"
#include "tetmf/forms.hpp"

namespace tetmf {

/// Dense local matrices of one scalar component, row-major, computed in
/// double from the same tables and geometry the matrix-free path uses.
/// Vector-valued spaces repeat the scalar block on each component.
class ElementMatrices {
 public:
  ElementMatrices(const Discretization& disc, const OperatorForm& form);

  int n() const { return n_; }

  /// n x n: mass_factor M_e + stiffness_factor K_e.
  std::vector<double> cell(std::size_t cell) const;
  /// 2n x 2n over [minus dofs, plus dofs] of interior face i.
  std::vector<double> interior_face(std::size_t face) const;
  /// n x n Nitsche block of boundary face i.
  std::vector<double> boundary_face(std::size_t face) const;

  /// Diagonals of the blocks above, without forming the full matrices.
  std::vector<double> cell_diagonal(std::size_t cell) const;
  std::vector<double> interior_face_diagonal(std::size_t face) const;
  std::vector<double> boundary_face_diagonal(std::size_t face) const;

  /// Whether face terms are present (DG with a stiffness part).
  bool has_faces() const { return faces_; }
  const std::vector<char>& dirichlet_faces() const { return dirichlet_faces_; }

 private:
  template <bool DiagonalOnly>
  std::vector<double> cell_impl(std::size_t cell) const;
  template <bool DiagonalOnly>
  std::vector<double> interior_face_impl(std::size_t face) const;
  template <bool DiagonalOnly>
  std::vector<double> boundary_face_impl(std::size_t face) const;

  const Discretization& disc_;
  OperatorForm form_;
  int n_;
  bool faces_;
  PenaltyData penalty_;
  std::vector<char> dirichlet_faces_;
};

}  // namespace tetmf

#pragma once

#include <array>
#include <vector>

#include "tetmf/quadrature.hpp"
#include "tetmf/reference_cell.hpp"
#include "tetmf/types.hpp"

namespace tetmf {

/// Where a Lagrange node lives on the reference cell.
struct NodeInfo {
  enum class Kind { Vertex, Edge, Face, Interior } kind;
  int entity;    ///< local vertex, edge or face number
  int position;  ///< index along the entity, counted from the lower local vertex
};

/// Equispaced Lagrange basis of degree 1..3 on the reference tetrahedron.
/// Nodes are ordered vertices, edges, faces, interior.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<NodeInfo>& node_info() const { return info_; }

  /// values[j] = phi_j(x)
  void values(const Vec3& x, double* values) const;
  /// grads[3 j + k] = d phi_j / d x_k
  void gradients(const Vec3& x, double* grads) const;

 private:
  int degree_;
  std::vector<Vec3> nodes_;
  std::vector<NodeInfo> info_;
  std::vector<std::array<int, 3>> exponents_;
  // coefficients_[m * n + j]: coefficient of monomial m in phi_j
  std::vector<double> coefficients_;
};

inline int dofs_per_cell(int p) { return (p + 1) * (p + 2) * (p + 3) / 6; }

/// Basis values and reference gradients tabulated at the cell and face
/// quadrature points. Matrices are row-major.
struct BasisTable {
  int degree = 0;
  int n_dofs = 0;
  int n_q = 0;
  int n_qf = 0;
  /// n_q x n_dofs
  std::vector<double> value_matrix;
  /// (3 n_q) x n_dofs, row 3 i + k holds d phi_j / d xhat_k at point i
  std::vector<double> grad_matrix;
  /// Indexed by face_index(face, orientation); minus sides use orientation 0.
  /// Row layout as for the cell matrices with n_qf points.
  std::vector<std::vector<double>> face_value_matrices;
  std::vector<std::vector<double>> face_grad_matrices;
  /// Cell reference coordinates of the face quadrature points per (face, orientation).
  std::vector<std::vector<Vec3>> face_points;

  static int face_index(int face, int orientation) { return face * FaceOrientation::n_codes + orientation; }

  const std::vector<double>& face_values(int face, int orientation) const {
    return face_value_matrices[face_index(face, orientation)];
  }
  const std::vector<double>& face_grads(int face, int orientation) const {
    return face_grad_matrices[face_index(face, orientation)];
  }
};

/// Tabulate the degree-p basis. face_rule may be empty when no face terms are needed.
BasisTable tabulate_basis(int p, const QuadratureRule& cell_rule, const QuadratureRule& face_rule);

}  // namespace tetmf

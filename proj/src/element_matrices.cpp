#include "tetmf/element_matrices.hpp"

namespace tetmf {

namespace {

// Physical normal derivatives a . ghat_j at face point q, a = J^-T^T n.
void normal_derivatives(const std::vector<double>& grads, int q, int n, const Vec3& a, double* dn) {
  for (int j = 0; j < n; ++j)
    dn[j] = a[0] * grads[(3 * q) * n + j] + a[1] * grads[(3 * q + 1) * n + j] + a[2] * grads[(3 * q + 2) * n + j];
}

}  // namespace

ElementMatrices::ElementMatrices(const Discretization& disc, const OperatorForm& form)
    : disc_(disc), form_(form), n_(disc.dofs.n_dofs_per_cell) {
  faces_ = disc.space() == Space::DG && form.stiffness_factor() > 0;
  if (faces_) {
    penalty_ = compute_penalty(disc, form.sipg);
    dirichlet_faces_ = dirichlet_boundary_faces(disc);
  }
}

template <bool DiagonalOnly>
std::vector<double> ElementMatrices::cell_impl(std::size_t c) const {
  const BasisTable& b = disc_.basis;
  const GeometryData& g = disc_.geometry;
  const double ms = form_.mass_factor(), nu = form_.stiffness_factor();
  std::vector<double> k(DiagonalOnly ? n_ : n_ * n_, 0.0);
  std::vector<Vec3> grad(n_);
  for (int q = 0; q < b.n_q; ++q) {
    const double jxw = g.jxw(c, q);
    const Mat3& jit = g.jac_inv_t_at(c, q);
    for (int j = 0; j < n_; ++j)
      grad[j] = matvec(jit, {b.grad_matrix[(3 * q) * n_ + j], b.grad_matrix[(3 * q + 1) * n_ + j],
                             b.grad_matrix[(3 * q + 2) * n_ + j]});
    for (int i = 0; i < n_; ++i)
      for (int j = DiagonalOnly ? i : 0; j < (DiagonalOnly ? i + 1 : n_); ++j) {
        double v = 0;
        if (nu > 0) v += nu * dot(grad[i], grad[j]);
        if (ms > 0) v += ms * b.value_matrix[q * n_ + i] * b.value_matrix[q * n_ + j];
        k[DiagonalOnly ? i : i * n_ + j] += v * jxw;
      }
  }
  return k;
}

template <bool DiagonalOnly>
std::vector<double> ElementMatrices::interior_face_impl(std::size_t i) const {
  const TetMesh& mesh = *disc_.mesh;
  const BasisTable& b = disc_.basis;
  const GeometryData& g = disc_.geometry;
  const auto& f = mesh.interior_faces[i];
  const double nu = form_.stiffness_factor();
  const double tau = penalty_.interior[i];
  const int n2 = 2 * n_;
  std::vector<double> k(DiagonalOnly ? n2 : n2 * n2, 0.0);
  const auto& vm = b.face_values(f.face_minus, 0);
  const auto& gm = b.face_grads(f.face_minus, 0);
  const auto& vp = b.face_values(f.face_plus, f.orientation.code());
  const auto& gp = b.face_grads(f.face_plus, f.orientation.code());
  std::vector<double> phi(n2), dn(n2);
  for (int q = 0; q < b.n_qf; ++q) {
    const std::size_t idx = i * b.n_qf + q;
    const Vec3& nrm = g.interior.normals[idx];
    const bool curved = g.mode == GeometryMode::PerQuadraturePoint;
    const Vec3 am = matvec_transpose(curved ? g.interior.jac_inv_t_minus[idx] : g.jac_inv_t[f.cell_minus], nrm);
    const Vec3 ap = matvec_transpose(curved ? g.interior.jac_inv_t_plus[idx] : g.jac_inv_t[f.cell_plus], nrm);
    normal_derivatives(gm, q, n_, am, dn.data());
    normal_derivatives(gp, q, n_, ap, dn.data() + n_);
    // signed values: jump of basis function j is phi[j]
    for (int j = 0; j < n_; ++j) {
      phi[j] = vm[q * n_ + j];
      phi[n_ + j] = -vp[q * n_ + j];
    }
    const double jxw = nu * g.interior.jxw[idx];
    for (int r = 0; r < n2; ++r)
      for (int c = DiagonalOnly ? r : 0; c < (DiagonalOnly ? r + 1 : n2); ++c)
        k[DiagonalOnly ? r : r * n2 + c] += (tau * phi[r] * phi[c] - 0.5 * phi[r] * dn[c] - 0.5 * dn[r] * phi[c]) * jxw;
  }
  return k;
}

template <bool DiagonalOnly>
std::vector<double> ElementMatrices::boundary_face_impl(std::size_t i) const {
  const TetMesh& mesh = *disc_.mesh;
  const BasisTable& b = disc_.basis;
  const GeometryData& g = disc_.geometry;
  const auto& f = mesh.boundary_faces[i];
  const double nu = form_.stiffness_factor();
  const double tau = penalty_.boundary[i];
  std::vector<double> k(DiagonalOnly ? n_ : n_ * n_, 0.0);
  const auto& v = b.face_values(f.face, 0);
  const auto& gr = b.face_grads(f.face, 0);
  std::vector<double> dn(n_);
  for (int q = 0; q < b.n_qf; ++q) {
    const std::size_t idx = i * b.n_qf + q;
    const bool curved = g.mode == GeometryMode::PerQuadraturePoint;
    const Vec3 a = matvec_transpose(curved ? g.boundary.jac_inv_t_minus[idx] : g.jac_inv_t[f.cell],
                                    g.boundary.normals[idx]);
    normal_derivatives(gr, q, n_, a, dn.data());
    const double jxw = nu * g.boundary.jxw[idx];
    for (int r = 0; r < n_; ++r)
      for (int c = DiagonalOnly ? r : 0; c < (DiagonalOnly ? r + 1 : n_); ++c) {
        const double pr = v[q * n_ + r], pc = v[q * n_ + c];
        k[DiagonalOnly ? r : r * n_ + c] += (tau * pr * pc - pr * dn[c] - dn[r] * pc) * jxw;
      }
  }
  return k;
}

std::vector<double> ElementMatrices::cell(std::size_t c) const { return cell_impl<false>(c); }
std::vector<double> ElementMatrices::interior_face(std::size_t f) const { return interior_face_impl<false>(f); }
std::vector<double> ElementMatrices::boundary_face(std::size_t f) const { return boundary_face_impl<false>(f); }
std::vector<double> ElementMatrices::cell_diagonal(std::size_t c) const { return cell_impl<true>(c); }
std::vector<double> ElementMatrices::interior_face_diagonal(std::size_t f) const {
  return interior_face_impl<true>(f);
}
std::vector<double> ElementMatrices::boundary_face_diagonal(std::size_t f) const {
  return boundary_face_impl<true>(f);
}

}  // namespace tetmf

#include "tetmf/rhs.hpp"

#include <cmath>
#include <numbers>

#include "tetmf/element_matrices.hpp"

namespace tetmf {

namespace {

void require_scalar(const Discretization& disc) {
  if (disc.n_components() != 1) throw Error("scalar space required");
}

// values[q * n + i] = phi_i(x_q)
std::vector<double> tabulate(const LagrangeBasis& basis, const QuadratureRule& rule) {
  const int n = basis.size();
  std::vector<double> values(rule.size() * n);
  for (std::size_t q = 0; q < rule.size(); ++q) basis.values(rule.points[q], values.data() + q * n);
  return values;
}

}  // namespace

std::vector<double> assemble_rhs(const Discretization& disc, const OperatorForm& form, const ScalarFunction& f,
                                 const ScalarFunction& g) {
  require_scalar(disc);
  const TetMesh& mesh = *disc.mesh;
  const DoFMap& d = disc.dofs;
  const LagrangeBasis basis(disc.degree());
  const int n = basis.size();
  const QuadratureRule rule = tet_rule(7);
  const auto table = tabulate(basis, rule);
  std::vector<double> b(d.n_global_dofs, 0.0);
  std::vector<double> phi(n);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto cd = d.dofs(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& xi = rule.points[q];
      const double jxw = rule.weights[q] * det(mesh.jacobian(c, xi));
      const double fv = f(mesh.map(c, xi)) * jxw;
      for (int i = 0; i < n; ++i) b[cd[i]] += fv * table[q * n + i];
    }
  }

  if (d.space == Space::CG) {
    if (d.n_constrained() == 0) return b;
    const auto pts = dof_support_points(mesh, d);
    std::vector<double> gv(d.n_global_dofs, 0.0);
    for (std::size_t i = 0; i < d.n_global_dofs; ++i)
      if (d.dirichlet_mask[i]) gv[i] = g(pts[i]);
    const ElementMatrices em(disc, form);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      const auto cd = d.dofs(c);
      bool any = false;
      for (index_t j : cd) any = any || d.dirichlet_mask[j];
      if (!any) continue;
      const auto k = em.cell(c);
      for (int i = 0; i < n; ++i) {
        if (d.dirichlet_mask[cd[i]]) continue;
        for (int j = 0; j < n; ++j)
          if (d.dirichlet_mask[cd[j]]) b[cd[i]] -= k[i * n + j] * gv[cd[j]];
      }
    }
    for (std::size_t i = 0; i < d.n_global_dofs; ++i)
      if (d.dirichlet_mask[i]) b[i] = gv[i];
    return b;
  }

  const double nu = form.stiffness_factor();
  if (nu == 0) return b;
  const PenaltyData pen = compute_penalty(disc, form.sipg);
  const auto dirichlet = dirichlet_boundary_faces(disc);
  const QuadratureRule frule = triangle_rule(6);
  std::vector<double> grads(3 * n);
  for (std::size_t i = 0; i < mesh.boundary_faces.size(); ++i) {
    if (!dirichlet[i]) continue;
    const auto& bf = mesh.boundary_faces[i];
    const auto cd = d.dofs(bf.cell);
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const Vec3 xi = ref::face_to_cell(bf.face, frule.points[q][0], frule.points[q][1]);
      const Mat3 jac = mesh.jacobian(bf.cell, xi);
      const Mat3 jit = inverse_transpose(jac);
      const Vec3 nn = matvec(jit, ref::face_normals()[bf.face]);
      const double len = norm(nn);
      const Vec3 normal = (1.0 / len) * nn;
      const double jxw = frule.weights[q] * ref::face_area_scale(bf.face) * det(jac) * len;
      const double gv = g(mesh.map(bf.cell, xi)) * jxw * nu;
      basis.values(xi, phi.data());
      basis.gradients(xi, grads.data());
      const Vec3 a = matvec_transpose(jit, normal);
      for (int j = 0; j < n; ++j) {
        const double dn = a[0] * grads[3 * j] + a[1] * grads[3 * j + 1] + a[2] * grads[3 * j + 2];
        b[cd[j]] += gv * (pen.boundary[i] * phi[j] - dn);
      }
    }
  }
  return b;
}

std::vector<double> interpolate(const Discretization& disc, const ScalarFunction& u) {
  require_scalar(disc);
  const auto pts = dof_support_points(*disc.mesh, disc.dofs);
  std::vector<double> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = u(pts[i]);
  return v;
}

double l2_error(const Discretization& disc, std::span<const double> uh, const ScalarFunction& u) {
  require_scalar(disc);
  if (uh.size() != disc.n_dofs()) throw DimensionMismatch("l2_error: vector length mismatch");
  const TetMesh& mesh = *disc.mesh;
  const LagrangeBasis basis(disc.degree());
  const int n = basis.size();
  const QuadratureRule rule = tet_rule(7);
  const auto table = tabulate(basis, rule);
  double err = 0;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto cd = disc.dofs.dofs(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& xi = rule.points[q];
      double v = 0;
      for (int j = 0; j < n; ++j) v += table[q * n + j] * uh[cd[j]];
      const double e = v - u(mesh.map(c, xi));
      err += e * e * rule.weights[q] * det(mesh.jacobian(c, xi));
    }
  }
  return std::sqrt(err);
}

double l2_norm(const TetMesh& mesh, const ScalarFunction& u) {
  const QuadratureRule rule = tet_rule(7);
  double s = 0;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& xi = rule.points[q];
      const double v = u(mesh.map(c, xi));
      s += v * v * rule.weights[q] * det(mesh.jacobian(c, xi));
    }
  return std::sqrt(s);
}

ScalarFunction manufactured_solution(double k) {
  return [k](const Vec3& x) {
    const double w = k * std::numbers::pi;
    return std::sin(w * x[0]) * std::sin(w * x[1]) * std::sin(w * x[2]);
  };
}

ScalarFunction manufactured_load(double k) {
  return [k](const Vec3& x) {
    const double w = k * std::numbers::pi;
    return 3 * w * w * std::sin(w * x[0]) * std::sin(w * x[1]) * std::sin(w * x[2]);
  };
}

}  // namespace tetmf

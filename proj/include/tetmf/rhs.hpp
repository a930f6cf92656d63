#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tetmf/discretization.hpp"
#include "tetmf/forms.hpp"

namespace tetmf {

using ScalarFunction = std::function<double(const Vec3&)>;

/// Right-hand side of A x = b for -div(nu grad u) + ms u = f with u = g on
/// the Dirichlet boundary, scalar spaces only.
///
/// CG: b holds g at constrained DoFs and the load minus the lifting of g
/// elsewhere, matching the identity rows of the operator. DG: the Nitsche
/// boundary terms of g are added. Integrals use a degree-7 cell rule and a
/// degree-6 face rule on the exact mesh map.
std::vector<double> assemble_rhs(const Discretization& disc, const OperatorForm& form, const ScalarFunction& f,
                                 const ScalarFunction& g);

/// Nodal interpolant (scalar spaces).
std::vector<double> interpolate(const Discretization& disc, const ScalarFunction& u);

/// || u_h - u ||_L2 with a degree-7 rule.
double l2_error(const Discretization& disc, std::span<const double> uh, const ScalarFunction& u);
double l2_norm(const TetMesh& mesh, const ScalarFunction& u);

/// sin(k pi x) sin(k pi y) sin(k pi z) and its load -lap u = 3 k^2 pi^2 u.
ScalarFunction manufactured_solution(double k = 3.0);
ScalarFunction manufactured_load(double k = 3.0);

}  // namespace tetmf

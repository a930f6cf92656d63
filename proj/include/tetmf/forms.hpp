#pragma once

#include <vector>

#include "tetmf/discretization.hpp"

namespace tetmf {

/// Symmetric interior penalty parameters.
struct SipgConfig {
  double penalty_constant = 1.0;
};

/// y = mass_scale M u + nu A u
struct HelmholtzCoefficients {
  double mass_scale = 0.0;
  double nu = 1.0;

  /// Throws Error for negative values or both zero.
  void validate() const;
};

enum class FormKind { Laplace, Helmholtz };

/// The bilinear form an operator evaluates. Laplace means the CG stiffness
/// form on CG spaces and the SIPG form on DG spaces.
struct OperatorForm {
  FormKind kind = FormKind::Laplace;
  SipgConfig sipg;
  HelmholtzCoefficients coeffs;

  static OperatorForm laplace(SipgConfig s = {}) { return {FormKind::Laplace, s, {}}; }
  static OperatorForm helmholtz(HelmholtzCoefficients c, SipgConfig s = {}) { return {FormKind::Helmholtz, s, c}; }

  double mass_factor() const { return kind == FormKind::Helmholtz ? coeffs.mass_scale : 0.0; }
  double stiffness_factor() const { return kind == FormKind::Helmholtz ? coeffs.nu : 1.0; }
};

/// Penalty per face: C (p+1)(p+3)/3 max(area/volume) over the adjacent
/// cells, doubled on boundary faces. Entries follow mesh.interior_faces and
/// mesh.boundary_faces.
struct PenaltyData {
  std::vector<double> interior;
  std::vector<double> boundary;
};

PenaltyData compute_penalty(const Discretization& disc, const SipgConfig& sipg);

/// Whether boundary face i of the mesh carries Dirichlet data.
std::vector<char> dirichlet_boundary_faces(const Discretization& disc);

}  // namespace tetmf

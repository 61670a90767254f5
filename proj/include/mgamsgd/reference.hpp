#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <utility>

#include "mgamsgd/elasticity.hpp"
#include "mgamsgd/network.hpp"

namespace mgamsgd {

using DisplacementField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

/// Closed-form solution of the uniaxial test: uniform stress diag(p, 0, 0)
/// with u_x(0) = 0 and zero mean lateral displacement about the cube centre.
struct AnalyticUniaxial {
  Material mat;
  double p;

  Eigen::Vector3d operator()(const Eigen::Vector3d& x) const {
    const double axial = p / mat.E;
    return {axial * x.x(), -mat.nu * axial * (x.y() - 0.5),
            -mat.nu * axial * (x.z() - 0.5)};
  }
};

inline AnalyticUniaxial analytic_uniaxial(const Material& mat, double p) {
  return AnalyticUniaxial{mat, p};
}

/// Mean squared pointwise displacement distance; validation only, never a
/// training signal.
double mse_u(const DisplacementField& field, const DisplacementField& reference,
             std::span<const Eigen::Vector3d> points);

/// A one-hidden-layer, four-neuron network whose pre-activations stay in the
/// linear ELU regime on the unit cube and that reproduces the analytic
/// uniaxial field exactly.
std::pair<Architecture, NetworkParams> interpolating_params(const Material& mat, double p);

/// Wraps trained flat parameters as a displacement field.
DisplacementField network_field(const Architecture& arch, const Eigen::VectorXd& theta);

}  // namespace mgamsgd

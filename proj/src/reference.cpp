#include "mgamsgd/reference.hpp"

#include <stdexcept>

namespace mgamsgd {

double mse_u(const DisplacementField& field, const DisplacementField& reference,
             std::span<const Eigen::Vector3d> points) {
  if (points.empty()) throw std::invalid_argument("mse_u: empty point set");
  double sum = 0.0;
  for (const auto& p : points) sum += (field(p) - reference(p)).squaredNorm();
  return sum / static_cast<double>(points.size());
}

DisplacementField network_field(const Architecture& arch, const Eigen::VectorXd& theta) {
  return [arch, params = unflatten(theta, arch)](const Eigen::Vector3d& x) {
    return forward(params, arch, x);
  };
}

std::pair<Architecture, NetworkParams> interpolating_params(const Material& mat, double p) {
  Architecture arch;
  arch.n_hidden = 1;
  arch.n_neurons = 4;
  NetworkParams params = NetworkParams::zeros(arch);

  // Neurons 0..2 pass x, y, z through; neuron 3 is the constant ELU(1) = 1.
  params.hidden_weights[0].setZero();
  params.hidden_weights[0](0, 0) = 1.0;
  params.hidden_weights[0](1, 1) = 1.0;
  params.hidden_weights[0](2, 2) = 1.0;
  params.hidden_biases[0].setZero();
  params.hidden_biases[0][3] = 1.0;

  const double axial = p / mat.E;
  const double lateral = -mat.nu * axial;
  params.output_weights.setZero();
  params.output_weights(0, 0) = axial;
  params.output_weights(1, 1) = lateral;
  params.output_weights(1, 3) = -0.5 * lateral;
  params.output_weights(2, 2) = lateral;
  params.output_weights(2, 3) = -0.5 * lateral;
  return {arch, params};
}

}  // namespace mgamsgd

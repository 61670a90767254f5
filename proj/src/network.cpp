#include "mgamsgd/network.hpp"

#include <stdexcept>
#include <string>

namespace mgamsgd {

void Architecture::validate() const {
  if (n_hidden < 1) throw std::invalid_argument("architecture: n_hidden must be >= 1");
  if (n_neurons < 1) throw std::invalid_argument("architecture: n_neurons must be >= 1");
  if (alpha != 1.0) throw std::invalid_argument("architecture: alpha is fixed to 1");
}

void NetworkParams::validate(const Architecture& arch) const {
  arch.validate();
  const auto nh = static_cast<std::size_t>(arch.n_hidden);
  if (hidden_weights.size() != nh || hidden_biases.size() != nh)
    throw std::invalid_argument("params: hidden layer count mismatch");
  for (int i = 0; i < arch.n_hidden; ++i) {
    const int in = i == 0 ? Architecture::n_inputs : arch.n_neurons;
    if (hidden_weights[i].rows() != arch.n_neurons || hidden_weights[i].cols() != in)
      throw std::invalid_argument("params: hidden weight shape mismatch at layer " +
                                  std::to_string(i));
    if (hidden_biases[i].size() != arch.n_neurons)
      throw std::invalid_argument("params: hidden bias shape mismatch at layer " +
                                  std::to_string(i));
  }
  if (output_weights.rows() != Architecture::n_outputs ||
      output_weights.cols() != arch.n_neurons)
    throw std::invalid_argument("params: output weight shape mismatch");
}

NetworkParams NetworkParams::zeros(const Architecture& arch) {
  arch.validate();
  NetworkParams p;
  for (int i = 0; i < arch.n_hidden; ++i) {
    const int in = i == 0 ? Architecture::n_inputs : arch.n_neurons;
    p.hidden_weights.emplace_back(Eigen::MatrixXd::Zero(arch.n_neurons, in));
    p.hidden_biases.emplace_back(Eigen::VectorXd::Zero(arch.n_neurons));
  }
  p.output_weights = Eigen::MatrixXd::Zero(Architecture::n_outputs, arch.n_neurons);
  return p;
}

int param_count(const Architecture& arch) {
  arch.validate();
  int count = arch.n_neurons * Architecture::n_inputs + arch.n_neurons;
  for (int i = 1; i < arch.n_hidden; ++i)
    count += arch.n_neurons * arch.n_neurons + arch.n_neurons;
  count += Architecture::n_outputs * arch.n_neurons;
  return count;
}

NetworkParams init_params(const Architecture& arch, Rng& rng) {
  NetworkParams p = NetworkParams::zeros(arch);
  for (auto layer = 0u; layer < p.hidden_weights.size(); ++layer) {
    Eigen::MatrixXd& w = p.hidden_weights[layer];
    for (int k = 0; k < w.rows(); ++k)
      for (int j = 0; j < w.cols(); ++j) w(k, j) = uniform_symmetric(rng);
    Eigen::VectorXd& b = p.hidden_biases[layer];
    for (int k = 0; k < b.size(); ++k) b[k] = uniform_symmetric(rng);
  }
  for (int k = 0; k < p.output_weights.rows(); ++k)
    for (int j = 0; j < p.output_weights.cols(); ++j)
      p.output_weights(k, j) = uniform_symmetric(rng);
  return p;
}

NetworkParams init_params(const Architecture& arch, std::uint64_t seed) {
  Rng rng(seed);
  return init_params(arch, rng);
}

Eigen::VectorXd flatten(const NetworkParams& params) {
  std::vector<double> flat;
  for (auto layer = 0u; layer < params.hidden_weights.size(); ++layer) {
    const Eigen::MatrixXd& w = params.hidden_weights[layer];
    for (int k = 0; k < w.rows(); ++k)
      for (int j = 0; j < w.cols(); ++j) flat.push_back(w(k, j));
    const Eigen::VectorXd& b = params.hidden_biases[layer];
    for (int k = 0; k < b.size(); ++k) flat.push_back(b[k]);
  }
  for (int k = 0; k < params.output_weights.rows(); ++k)
    for (int j = 0; j < params.output_weights.cols(); ++j)
      flat.push_back(params.output_weights(k, j));
  return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

NetworkParams unflatten(const Eigen::VectorXd& theta, const Architecture& arch) {
  if (theta.size() != param_count(arch))
    throw std::invalid_argument("unflatten: expected " + std::to_string(param_count(arch)) +
                                " values, got " + std::to_string(theta.size()));
  NetworkParams p = NetworkParams::zeros(arch);
  Eigen::Index pos = 0;
  for (auto layer = 0u; layer < p.hidden_weights.size(); ++layer) {
    Eigen::MatrixXd& w = p.hidden_weights[layer];
    for (int k = 0; k < w.rows(); ++k)
      for (int j = 0; j < w.cols(); ++j) w(k, j) = theta[pos++];
    Eigen::VectorXd& b = p.hidden_biases[layer];
    for (int k = 0; k < b.size(); ++k) b[k] = theta[pos++];
  }
  for (int k = 0; k < p.output_weights.rows(); ++k)
    for (int j = 0; j < p.output_weights.cols(); ++j)
      p.output_weights(k, j) = theta[pos++];
  return p;
}

Eigen::Vector3d forward(const NetworkParams& params, const Architecture& arch,
                        const Eigen::Vector3d& point) {
  params.validate(arch);
  const auto out = eval<double>(params, arch, {point.x(), point.y(), point.z()});
  return {out[0], out[1], out[2]};
}

}  // namespace mgamsgd

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mgamsgd/jet.hpp"
#include "mgamsgd/rng.hpp"

namespace mgamsgd {

/// Fully connected displacement ansatz: 3 inputs (coordinates), n_hidden ELU
/// layers of n_neurons each, 3 linear outputs without bias.
struct Architecture {
  int n_hidden = 2;
  int n_neurons = 10;
  double alpha = 1.0;  // ELU coefficient, fixed to 1 here

  static constexpr int n_inputs = 3;
  static constexpr int n_outputs = 3;

  void validate() const;
};

/// Layer weights and biases. The output layer carries no bias term.
struct NetworkParams {
  std::vector<Eigen::MatrixXd> hidden_weights;  // [0]: n_neurons x 3, rest square
  std::vector<Eigen::VectorXd> hidden_biases;
  Eigen::MatrixXd output_weights;  // 3 x n_neurons

  void validate(const Architecture& arch) const;
  static NetworkParams zeros(const Architecture& arch);
};

int param_count(const Architecture& arch);

/// Draws every weight and bias independently from U[-1, 1]; consumes the
/// generator in canonical flatten order.
NetworkParams init_params(const Architecture& arch, Rng& rng);
NetworkParams init_params(const Architecture& arch, std::uint64_t seed);

/// Canonical flat layout: per hidden layer weights row-major then biases,
/// finally output weights row-major. Chromosome indices refer to this order.
Eigen::VectorXd flatten(const NetworkParams& params);
NetworkParams unflatten(const Eigen::VectorXd& theta, const Architecture& arch);

inline double elu(double x) { return x > 0 ? x : std::expm1(x); }
inline double elu_d1(double x) { return x > 0 ? 1.0 : std::exp(x); }
// At exactly zero the right limit is used, keeping the positive regime linear.
inline double elu_d2(double x) { return x >= 0 ? 0.0 : std::exp(x); }
inline double elu_d3(double x) { return x >= 0 ? 0.0 : std::exp(x); }

inline SecondOrderJet elu(const SecondOrderJet& x) {
  return chain(x, elu(x.value), elu_d1(x.value), elu_d2(x.value));
}

/// Forward pass templated on the scalar type; Jet2<double> inputs propagate
/// exact first and second spatial derivatives through the same code path as
/// plain doubles.
template <typename S>
std::array<S, 3> eval(const NetworkParams& params, const Architecture& arch,
                      const std::array<S, 3>& input) {
  std::vector<S> act(input.begin(), input.end());
  std::vector<S> next;
  for (int layer = 0; layer < arch.n_hidden; ++layer) {
    const Eigen::MatrixXd& w = params.hidden_weights[layer];
    const Eigen::VectorXd& b = params.hidden_biases[layer];
    next.assign(static_cast<std::size_t>(w.rows()), S{});
    for (int k = 0; k < w.rows(); ++k) {
      S psi(b[k]);
      for (int j = 0; j < w.cols(); ++j) psi += w(k, j) * act[j];
      next[k] = elu(psi);
    }
    act.swap(next);
  }
  std::array<S, 3> out{S{}, S{}, S{}};
  for (int k = 0; k < 3; ++k) {
    S u{};
    for (int j = 0; j < params.output_weights.cols(); ++j)
      u += params.output_weights(k, j) * act[j];
    out[k] = u;
  }
  return out;
}

/// Displacement values only.
Eigen::Vector3d forward(const NetworkParams& params, const Architecture& arch,
                        const Eigen::Vector3d& point);

}  // namespace mgamsgd

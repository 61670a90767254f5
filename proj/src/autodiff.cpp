#include "mgamsgd/autodiff.hpp"

#include <cmath>

namespace mgamsgd {

DisplacementJet jet_evaluate(const NetworkParams& params, const Architecture& arch,
                             const Eigen::Vector3d& point) {
  params.validate(arch);
  if (!point.allFinite()) throw std::invalid_argument("jet_evaluate: non-finite point");
  const std::array<SecondOrderJet, 3> input = {SecondOrderJet::variable(point.x(), 0),
                                               SecondOrderJet::variable(point.y(), 1),
                                               SecondOrderJet::variable(point.z(), 2)};
  const auto out = eval<SecondOrderJet>(params, arch, input);
  return DisplacementJet{{out[0], out[1], out[2]}};
}

void forward_tape(const NetworkParams& params, const Architecture& arch,
                  const Eigen::Vector3d& point, PointTape& tape) {
  const auto nh = static_cast<std::size_t>(arch.n_hidden);
  tape.pre.resize(nh);
  tape.act.resize(nh);
  tape.input = {SecondOrderJet::variable(point.x(), 0),
                SecondOrderJet::variable(point.y(), 1),
                SecondOrderJet::variable(point.z(), 2)};

  const SecondOrderJet* prev = tape.input.data();
  Eigen::Index prev_n = 3;
  for (std::size_t layer = 0; layer < nh; ++layer) {
    const Eigen::MatrixXd& w = params.hidden_weights[layer];
    const Eigen::VectorXd& b = params.hidden_biases[layer];
    tape.pre[layer].assign(static_cast<std::size_t>(w.rows()), SecondOrderJet{});
    tape.act[layer].assign(static_cast<std::size_t>(w.rows()), SecondOrderJet{});
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
      SecondOrderJet psi(b[k]);
      for (Eigen::Index j = 0; j < prev_n; ++j) psi += w(k, j) * prev[j];
      tape.pre[layer][static_cast<std::size_t>(k)] = psi;
      tape.act[layer][static_cast<std::size_t>(k)] = elu(psi);
    }
    prev = tape.act[layer].data();
    prev_n = w.rows();
  }
  for (int k = 0; k < 3; ++k) {
    SecondOrderJet u;
    for (Eigen::Index j = 0; j < prev_n; ++j) u += params.output_weights(k, j) * prev[j];
    tape.out[k] = u;
  }
}

namespace {

// d(jet entries of ELU(psi)) / d(jet entries of psi), transposed and applied
// to the activation adjoint. Needs the third derivative of the activation:
// the Hessian entries of ELU(psi) depend on psi's value through elu_d2.
SecondOrderJet elu_pullback(const SecondOrderJet& psi, const SecondOrderJet& abar) {
  const double f1 = elu_d1(psi.value);
  const double f2 = elu_d2(psi.value);
  const double f3 = elu_d3(psi.value);
  SecondOrderJet pbar;
  pbar.value = abar.value * f1;
  for (int i = 0; i < 3; ++i) pbar.value += abar.grad[i] * f2 * psi.grad[i];
  pbar.grad = f1 * abar.grad;
  for (int s = 0; s < 6; ++s) {
    const auto [p, q] = kHessSlots[s];
    pbar.value += abar.hess[s] * (f3 * psi.grad[p] * psi.grad[q] + f2 * psi.hess[s]);
    pbar.grad[p] += abar.hess[s] * f2 * psi.grad[q];
    pbar.grad[q] += abar.hess[s] * f2 * psi.grad[p];
    pbar.hess[s] = abar.hess[s] * f1;
  }
  return pbar;
}

inline double jet_dot(const SecondOrderJet& a, const SecondOrderJet& b) {
  return a.value * b.value + a.grad.dot(b.grad) + a.hess.dot(b.hess);
}

}  // namespace

void backward_point(const NetworkParams& params, const Architecture& arch,
                    const PointTape& tape, const DisplacementJet& out_adjoint,
                    NetworkParams& grad_accum) {
  const int nh = arch.n_hidden;
  const int nn = arch.n_neurons;

  // Output layer: u_k = sum_j wout(k,j) * a_j.
  std::vector<SecondOrderJet> abar(static_cast<std::size_t>(nn));
  const auto& last = tape.act[static_cast<std::size_t>(nh - 1)];
  for (int j = 0; j < nn; ++j) {
    SecondOrderJet s;
    for (int k = 0; k < 3; ++k) {
      const double w = params.output_weights(k, j);
      s += w * out_adjoint[k];
      grad_accum.output_weights(k, j) += jet_dot(out_adjoint[k], last[static_cast<std::size_t>(j)]);
    }
    abar[static_cast<std::size_t>(j)] = s;
  }

  std::vector<SecondOrderJet> prev_bar;
  for (int layer = nh - 1; layer >= 0; --layer) {
    const Eigen::MatrixXd& w = params.hidden_weights[static_cast<std::size_t>(layer)];
    const auto& pre = tape.pre[static_cast<std::size_t>(layer)];
    const std::size_t in_n = static_cast<std::size_t>(w.cols());
    const SecondOrderJet* below =
        layer == 0 ? tape.input.data() : tape.act[static_cast<std::size_t>(layer - 1)].data();

    prev_bar.assign(in_n, SecondOrderJet{});
    for (int k = 0; k < nn; ++k) {
      const SecondOrderJet pbar = elu_pullback(pre[static_cast<std::size_t>(k)],
                                               abar[static_cast<std::size_t>(k)]);
      grad_accum.hidden_biases[static_cast<std::size_t>(layer)][k] += pbar.value;
      for (std::size_t j = 0; j < in_n; ++j) {
        grad_accum.hidden_weights[static_cast<std::size_t>(layer)](k, static_cast<Eigen::Index>(j)) +=
            jet_dot(pbar, below[j]);
        prev_bar[j] += w(k, static_cast<Eigen::Index>(j)) * pbar;
      }
    }
    abar.swap(prev_bar);
  }
}

JetLossResult loss_gradient(const NetworkParams& params, const Architecture& arch,
                            std::span<const Eigen::Vector3d> points,
                            const JetFunctional& functional) {
  params.validate(arch);
  std::vector<PointTape> tapes(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    forward_tape(params, arch, points[i], tapes[i]);

  std::vector<DisplacementJet> adjoints(points.size());
  JetLossResult result;
  result.loss = functional.evaluate(tapes, adjoints);
  if (!std::isfinite(result.loss)) throw NonFiniteLossError("total");

  NetworkParams grad = NetworkParams::zeros(arch);
  for (std::size_t i = 0; i < points.size(); ++i)
    backward_point(params, arch, tapes[i], adjoints[i], grad);
  result.grad = flatten(grad);
  return result;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& loss,
                            const Eigen::VectorXd& theta, double step) {
  if (!(step > 0)) throw std::invalid_argument("fd_gradient: step must be positive");
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + step;
    const double up = loss(probe);
    probe[i] = theta[i] - step;
    const double down = loss(probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace mgamsgd

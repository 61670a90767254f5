#include "mgamsgd/optim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mgamsgd {

AdamState AdamState::init(Eigen::Index n, AdamParams coeffs) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  s.t = 0;
  s.coeffs = coeffs;
  return s;
}

Eigen::VectorXd sgd_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                         double lr) {
  if (theta.size() != grad.size())
    throw std::invalid_argument("sgd_step: size mismatch");
  if (!(lr > 0)) throw std::invalid_argument("sgd_step: lr must be positive");
  if (!grad.allFinite()) throw std::runtime_error("sgd_step: non-finite gradient");
  return theta - lr * grad;
}

std::pair<Eigen::VectorXd, AdamState> adam_step(const Eigen::VectorXd& theta,
                                                const Eigen::VectorXd& grad,
                                                AdamState state, double lr) {
  if (theta.size() != grad.size() || theta.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  if (!grad.allFinite()) throw std::runtime_error("adam_step: non-finite gradient");
  const AdamParams& c = state.coeffs;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * grad;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  state.t += 1;
  const double m_corr = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double v_corr = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  const Eigen::VectorXd m_bar = state.m / m_corr;
  const Eigen::VectorXd v_bar = state.v / v_corr;
  const Eigen::VectorXd denom = (v_bar.array().sqrt() + c.eps_bar).matrix();
  Eigen::VectorXd next = theta - lr * m_bar.cwiseQuotient(denom);
  return {std::move(next), std::move(state)};
}

namespace {

// Shared guarded loop; `step` advances the iterate from the current gradient.
template <typename StepFn>
DescentResult guarded_loop(Eigen::VectorXd theta, const LossGradFn& fn,
                           const DescentOptions& opts, StepFn&& step) {
  if (opts.max_iters < 1)
    throw std::invalid_argument("run_descent: max_iters must be >= 1");
  const auto start_time = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
        .count();
  };

  DescentResult result;
  auto [loss, grad] = fn(theta);
  result.trace.push_back(loss);
  if (opts.on_iteration) opts.on_iteration(0, loss);
  result.best_params = theta;
  result.best_loss = loss;
  if (!std::isfinite(loss)) {
    result.params = theta;
    result.status = DescentStatus::Diverged;
    return result;
  }

  const double start_loss = loss;
  int consecutive_blowups = 0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    if (!grad.allFinite()) {
      result.params = result.best_params;
      result.status = DescentStatus::Diverged;
      return result;
    }
    theta = step(theta, grad);
    std::tie(loss, grad) = fn(theta);
    result.trace.push_back(loss);
    if (opts.on_iteration) opts.on_iteration(it, loss);
    if (std::isfinite(loss) && loss < result.best_loss) {
      result.best_loss = loss;
      result.best_params = theta;
    }
    if (!std::isfinite(loss)) {
      result.params = result.best_params;
      result.status = DescentStatus::Diverged;
      return result;
    }
    if (loss > opts.guard.blowup_factor * start_loss) {
      if (++consecutive_blowups >= opts.guard.patience) {
        result.params = result.best_params;
        result.status = DescentStatus::Diverged;
        return result;
      }
    } else {
      consecutive_blowups = 0;
    }
    if (elapsed() > opts.max_seconds && it < opts.max_iters) {
      result.params = theta;
      result.status = DescentStatus::BudgetExhausted;
      return result;
    }
  }
  result.params = theta;
  result.status = DescentStatus::Completed;
  return result;
}

}  // namespace

DescentResult run_descent(Eigen::VectorXd theta, const LossGradFn& fn,
                          const DescentOptions& opts) {
  return guarded_loop(std::move(theta), fn, opts,
                      [&opts](const Eigen::VectorXd& t, const Eigen::VectorXd& g) {
                        return Eigen::VectorXd(t - opts.lr * g);
                      });
}

DescentResult run_adam(Eigen::VectorXd theta, const LossGradFn& fn,
                       const DescentOptions& opts, AdamParams coeffs) {
  AdamState state = AdamState::init(theta.size(), coeffs);
  return guarded_loop(std::move(theta), fn, opts,
                      [&opts, &state](const Eigen::VectorXd& t, const Eigen::VectorXd& g) {
                        auto [next, s] = adam_step(t, g, std::move(state), opts.lr);
                        state = std::move(s);
                        return next;
                      });
}

}  // namespace mgamsgd

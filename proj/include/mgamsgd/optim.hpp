#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace mgamsgd {

/// Evaluates loss and gradient at a flat parameter vector. Non-finite values
/// signal divergence to the callers.
using LossGradFn =
    std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>;

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_bar = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;  // first-moment estimate
  Eigen::VectorXd v;  // second-moment estimate
  long t = 0;
  AdamParams coeffs;

  static AdamState init(Eigen::Index n, AdamParams coeffs = {});
};

/// theta := theta - lr * grad. Throws on non-finite gradients.
Eigen::VectorXd sgd_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                         double lr);

/// One bias-corrected Adam update; returns the new parameters and state.
std::pair<Eigen::VectorXd, AdamState> adam_step(const Eigen::VectorXd& theta,
                                                const Eigen::VectorXd& grad,
                                                AdamState state, double lr);

/// Breaks a descent run once the loss exceeds blowup_factor times the
/// phase-start loss for `patience` consecutive iterations; a non-finite loss
/// triggers immediately.
struct DivergenceGuard {
  double blowup_factor = 10.0;
  int patience = 3;
};

enum class DescentStatus { Completed, Diverged, BudgetExhausted };

struct DescentOptions {
  double lr = 0.1;
  int max_iters = 1;
  DivergenceGuard guard;
  double max_seconds = std::numeric_limits<double>::infinity();
  // Observer hook, called once per recorded loss value.
  std::function<void(int iteration, double loss)> on_iteration;
};

struct DescentResult {
  Eigen::VectorXd params;      // final iterate, or best-so-far when diverged
  Eigen::VectorXd best_params; // lowest-loss iterate seen
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> trace;   // loss per iteration, starting at the input params
  DescentStatus status = DescentStatus::Completed;
};

/// Full-batch gradient descent with divergence guarding; used for both the
/// coarse and fine phases.
DescentResult run_descent(Eigen::VectorXd theta, const LossGradFn& fn,
                          const DescentOptions& opts);

/// Adam-driven counterpart of run_descent with the same guard semantics.
DescentResult run_adam(Eigen::VectorXd theta, const LossGradFn& fn,
                       const DescentOptions& opts, AdamParams coeffs = {});

}  // namespace mgamsgd

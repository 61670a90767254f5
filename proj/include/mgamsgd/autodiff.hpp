#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgamsgd/jet.hpp"
#include "mgamsgd/network.hpp"

namespace mgamsgd {

/// Thrown when a loss evaluation produced a non-finite value; carries the
/// name of the offending term.
struct NonFiniteLossError : std::runtime_error {
  explicit NonFiniteLossError(const std::string& term)
      : std::runtime_error("non-finite loss in term " + term), term_name(term) {}
  std::string term_name;
};

/// Exact displacement jet at a point, propagated through the network.
DisplacementJet jet_evaluate(const NetworkParams& params, const Architecture& arch,
                             const Eigen::Vector3d& point);

/// Recorded intermediates of one jet forward pass, reused across points.
struct PointTape {
  std::array<SecondOrderJet, 3> input;
  std::vector<std::vector<SecondOrderJet>> pre;  // psi per hidden layer
  std::vector<std::vector<SecondOrderJet>> act;  // ELU(psi) per hidden layer
  DisplacementJet out;
};

void forward_tape(const NetworkParams& params, const Architecture& arch,
                  const Eigen::Vector3d& point, PointTape& tape);

/// Reverse accumulation of d(loss)/d(params) through one taped point, given
/// the adjoint of every stored jet entry of the outputs (packed as a
/// DisplacementJet). Gradients are added into grad_accum.
void backward_point(const NetworkParams& params, const Architecture& arch,
                    const PointTape& tape, const DisplacementJet& out_adjoint,
                    NetworkParams& grad_accum);

/// A scalar functional of the jets at a batch of points. evaluate() returns
/// the loss and fills one adjoint jet per point (d loss / d jet entries).
class JetFunctional {
 public:
  virtual ~JetFunctional() = default;
  virtual double evaluate(std::span<const PointTape> tapes,
                          std::vector<DisplacementJet>& adjoints) const = 0;
};

struct JetLossResult {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Exact gradient of a jet functional: forward-tapes every point, then
/// reverse-accumulates sequentially in point order (fixed reduction order, so
/// results are bit-reproducible). Throws NonFiniteLossError if the functional
/// value is not finite.
JetLossResult loss_gradient(const NetworkParams& params, const Architecture& arch,
                            std::span<const Eigen::Vector3d> points,
                            const JetFunctional& functional);

/// Central finite differences; test oracle only, never a production path.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& loss,
                            const Eigen::VectorXd& theta, double step);

}  // namespace mgamsgd

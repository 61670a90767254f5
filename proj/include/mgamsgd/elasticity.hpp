#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <utility>

#include "mgamsgd/autodiff.hpp"
#include "mgamsgd/network.hpp"
#include "mgamsgd/sampling.hpp"

namespace mgamsgd {

/// Homogeneous isotropic linear elastic material.
struct Material {
  double E;
  double nu;
  double lambda;  // first Lame constant
  double G;       // shear modulus

  static Material isotropic(double E, double nu);
  double lame_divisor() const { return lambda + 2.0 * G; }
};

/// lambda = E nu / ((1+nu)(1-2nu)), G = E / (2(1+nu)).
std::pair<double, double> lame_constants(double E, double nu);

/// eps = (grad u + grad u^T) / 2, with row i of gradu holding du_i/dx.
Eigen::Matrix3d strain_from_grad(const Eigen::Matrix3d& gradu);

/// sigma = lambda tr(eps) I + 2 G eps.
Eigen::Matrix3d stress(const Eigen::Matrix3d& eps, const Material& mat);

/// t = sigma . n; n must be a unit vector.
Eigen::Vector3d traction(const Eigen::Matrix3d& sigma, const Eigen::Vector3d& n);

/// Navier form of div(sigma) - f for spatially constant moduli:
/// (lambda+G) grad(div u) + G lap(u) - f, assembled from the jet Hessians.
Eigen::Vector3d equilibrium_residual(const DisplacementJet& jet, const Material& mat,
                                     const Eigen::Vector3d& body_force);

/// sigma / (lambda + 2G).
Eigen::Matrix3d normalize_stress(const Eigen::Matrix3d& sigma, const Material& mat);

/// Prescribed displacement on the x=0 face: either selected components or the
/// full vector.
struct DirichletBC {
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  std::array<bool, 3> mask = {true, true, true};
  bool full_vector() const { return mask[0] && mask[1] && mask[2]; }
};

/// Boundary-value problem on the unit cube: Dirichlet data on x=0, per-face
/// tractions on the remaining five faces, optional mean-displacement
/// uniqueness penalties, Dirichlet weight gamma, and stress normalization.
struct ProblemSpec {
  DirichletBC dirichlet;
  std::array<Eigen::Vector3d, 6> face_tractions = {
      Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
      Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  Eigen::Vector3d body_force = Eigen::Vector3d::Zero();
  bool uniqueness_penalty = false;
  double gamma = 1.0;
  bool normalize = false;

  void validate() const;
};

/// Uniaxial tension test: u_x = 0 prescribed on x=0, t0 = (p,0,0) on x=1,
/// free lateral faces, mean-u_y and mean-u_z penalties active.
ProblemSpec case_a(double gamma, double p = -0.1, bool normalize = true);
/// Fully clamped variant: u0 = (0,0,0) on x=0, no uniqueness penalties.
ProblemSpec case_b(double gamma, double p = -0.1, bool normalize = true);

/// Copies the problem's boundary data onto the sample set.
void apply_bcs(const ProblemSpec& problem, SampleSet& samples);

/// Per-point residuals with their squared-norm contributions (the residual is
/// its own weight, so each contribution is ||r||^2).
struct ResidualBundle {
  Eigen::Vector3d r2 = Eigen::Vector3d::Zero();
  Eigen::Vector3d r5 = Eigen::Vector3d::Zero();
  Eigen::Vector3d r6 = Eigen::Vector3d::Zero();
  double c2 = 0.0;
  double c5 = 0.0;
  double c6 = 0.0;
};

Eigen::Vector3d dirichlet_residual(const Eigen::Vector3d& u, const DirichletSample& bc);
Eigen::Vector3d neumann_residual(const DisplacementJet& jet, const Material& mat,
                                 const NeumannSample& bc, bool normalized);

inline ResidualBundle bundle_residuals(const Eigen::Vector3d& r2, const Eigen::Vector3d& r5,
                                       const Eigen::Vector3d& r6) {
  return {r2, r5, r6, r2.squaredNorm(), r5.squaredNorm(), r6.squaredNorm()};
}

struct LossBreakdown {
  double mse_e = 0.0;
  double mse_d = 0.0;
  double mse_n = 0.0;
  double mse_uq = 0.0;
  double mse = 0.0;
};

LossBreakdown total_loss(const NetworkParams& params, const Architecture& arch,
                         const SampleSet& samples, const ProblemSpec& problem,
                         const Material& mat);

struct LossAndGrad {
  LossBreakdown breakdown;
  Eigen::VectorXd grad;
};

/// Loss plus its exact parameter gradient in one combined pass. Non-finite
/// values are returned as-is; callers treat them as divergence.
LossAndGrad loss_and_gradient(const NetworkParams& params, const Architecture& arch,
                              const SampleSet& samples, const ProblemSpec& problem,
                              const Material& mat);

/// Spec surface for the exact gradient; throws NonFiniteLossError when the
/// loss does not evaluate finitely.
Eigen::VectorXd loss_gradient(const NetworkParams& params, const Architecture& arch,
                              const SampleSet& samples, const ProblemSpec& problem,
                              const Material& mat);

/// Bundles a fixed (arch, samples, problem, material) into flat-vector loss
/// callbacks for the optimizers. Reuses tape workspace per instance; use one
/// evaluator per thread.
class LossEvaluator {
 public:
  LossEvaluator(Architecture arch, SampleSet samples, ProblemSpec problem, Material mat);

  double loss(const Eigen::VectorXd& theta) const;
  LossBreakdown breakdown(const Eigen::VectorXd& theta) const;
  LossAndGrad loss_and_grad(const Eigen::VectorXd& theta) const;
  int param_count() const { return n_params_; }
  const Architecture& arch() const { return arch_; }
  const SampleSet& samples() const { return samples_; }
  const ProblemSpec& problem() const { return problem_; }
  const Material& material() const { return mat_; }

 private:
  Architecture arch_;
  SampleSet samples_;
  ProblemSpec problem_;
  Material mat_;
  int n_params_;
  mutable std::vector<PointTape> tapes_;  // reused across evaluations
};

}  // namespace mgamsgd

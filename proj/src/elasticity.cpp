#include "mgamsgd/elasticity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgamsgd {

Material Material::isotropic(double E, double nu) {
  const auto [lambda, G] = lame_constants(E, nu);
  return Material{E, nu, lambda, G};
}

std::pair<double, double> lame_constants(double E, double nu) {
  if (!(E > 0)) throw std::domain_error("lame_constants: E must be positive");
  if (!(nu > 0 && nu < 0.5))
    throw std::domain_error("lame_constants: nu must lie in (0, 0.5)");
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double G = E / (2.0 * (1.0 + nu));
  return {lambda, G};
}

Eigen::Matrix3d strain_from_grad(const Eigen::Matrix3d& gradu) {
  return 0.5 * (gradu + gradu.transpose());
}

Eigen::Matrix3d stress(const Eigen::Matrix3d& eps, const Material& mat) {
  return mat.lambda * eps.trace() * Eigen::Matrix3d::Identity() + 2.0 * mat.G * eps;
}

Eigen::Vector3d traction(const Eigen::Matrix3d& sigma, const Eigen::Vector3d& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12)
    throw std::domain_error("traction: normal must be a unit vector");
  return sigma * n;
}

Eigen::Vector3d equilibrium_residual(const DisplacementJet& jet, const Material& mat,
                                     const Eigen::Vector3d& body_force) {
  Eigen::Vector3d r;
  for (int k = 0; k < 3; ++k) {
    double grad_div = 0.0;
    for (int m = 0; m < 3; ++m) grad_div += jet[m].hess_at(k, m);
    r[k] = (mat.lambda + mat.G) * grad_div + mat.G * jet[k].laplacian() - body_force[k];
  }
  return r;
}

Eigen::Matrix3d normalize_stress(const Eigen::Matrix3d& sigma, const Material& mat) {
  return sigma / mat.lame_divisor();
}

void ProblemSpec::validate() const {
  if (!(gamma >= 0)) throw std::invalid_argument("problem: gamma must be >= 0");
  if (dirichlet.full_vector() && uniqueness_penalty)
    throw std::invalid_argument(
        "problem: uniqueness penalties are incompatible with a full-vector Dirichlet BC");
}

ProblemSpec case_a(double gamma, double p, bool normalize) {
  ProblemSpec spec;
  spec.dirichlet = {Eigen::Vector3d::Zero(), {true, false, false}};
  spec.face_tractions[static_cast<int>(Face::XMax)] = {p, 0.0, 0.0};
  spec.uniqueness_penalty = true;
  spec.gamma = gamma;
  spec.normalize = normalize;
  spec.validate();
  return spec;
}

ProblemSpec case_b(double gamma, double p, bool normalize) {
  ProblemSpec spec;
  spec.dirichlet = {Eigen::Vector3d::Zero(), {true, true, true}};
  spec.face_tractions[static_cast<int>(Face::XMax)] = {p, 0.0, 0.0};
  spec.uniqueness_penalty = false;
  spec.gamma = gamma;
  spec.normalize = normalize;
  spec.validate();
  return spec;
}

void apply_bcs(const ProblemSpec& problem, SampleSet& samples) {
  problem.validate();
  for (auto& d : samples.dirichlet) {
    d.value = problem.dirichlet.value;
    d.mask = problem.dirichlet.mask;
  }
  for (auto& n : samples.neumann)
    n.t0 = problem.face_tractions[static_cast<int>(n.face)];
}

Eigen::Vector3d dirichlet_residual(const Eigen::Vector3d& u, const DirichletSample& bc) {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  for (int k = 0; k < 3; ++k)
    if (bc.mask[k]) r[k] = u[k] - bc.value[k];
  return r;
}

Eigen::Vector3d neumann_residual(const DisplacementJet& jet, const Material& mat,
                                 const NeumannSample& bc, bool normalized) {
  const Eigen::Matrix3d sigma = stress(strain_from_grad(jet.gradient()), mat);
  Eigen::Vector3d r = sigma * bc.normal - bc.t0;
  if (normalized) r /= mat.lame_divisor();
  return r;
}

namespace {

void check_samples(const SampleSet& samples) {
  if (samples.interior.empty())
    throw std::invalid_argument("loss: interior sample set is empty");
  if (samples.dirichlet.empty())
    throw std::invalid_argument("loss: Dirichlet sample set is empty");
  if (samples.neumann.empty())
    throw std::invalid_argument("loss: Neumann sample set is empty");
}

std::vector<Eigen::Vector3d> all_points(const SampleSet& samples) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(samples.interior.size() + samples.dirichlet.size() + samples.neumann.size());
  for (const auto& p : samples.interior) pts.push_back(p);
  for (const auto& d : samples.dirichlet) pts.push_back(d.point);
  for (const auto& n : samples.neumann) pts.push_back(n.point);
  return pts;
}

// Loss assembly over taped points in the fixed order interior, Dirichlet,
// Neumann. With a non-null adjoint list, also fills d(mse)/d(jet entries).
LossBreakdown assemble(std::span<const PointTape> tapes, const SampleSet& samples,
                       const ProblemSpec& problem, const Material& mat,
                       std::vector<DisplacementJet>* adjoints) {
  const std::size_t ni = samples.interior.size();
  const std::size_t nd = samples.dirichlet.size();
  const std::size_t nn = samples.neumann.size();
  const double scale = problem.normalize ? 1.0 / mat.lame_divisor() : 1.0;

  LossBreakdown out;
  double sum_uy = 0.0;
  double sum_uz = 0.0;
  std::vector<Eigen::Vector3d> r2s(adjoints ? ni : 0);
  std::vector<Eigen::Vector3d> r6s(adjoints ? nn : 0);

  for (std::size_t i = 0; i < ni; ++i) {
    const DisplacementJet& jet = tapes[i].out;
    const Eigen::Vector3d r2 =
        scale * equilibrium_residual(jet, mat, problem.body_force);
    out.mse_e += r2.squaredNorm();
    sum_uy += jet[1].value;
    sum_uz += jet[2].value;
    if (adjoints) r2s[i] = r2;
  }
  out.mse_e /= static_cast<double>(ni);

  for (std::size_t i = 0; i < nd; ++i) {
    const Eigen::Vector3d r5 =
        dirichlet_residual(tapes[ni + i].out.value(), samples.dirichlet[i]);
    out.mse_d += r5.squaredNorm();
  }
  out.mse_d *= problem.gamma / static_cast<double>(nd);

  for (std::size_t i = 0; i < nn; ++i) {
    const Eigen::Vector3d r6 =
        neumann_residual(tapes[ni + nd + i].out, mat, samples.neumann[i], problem.normalize);
    out.mse_n += r6.squaredNorm();
    if (adjoints) r6s[i] = r6;
  }
  out.mse_n /= static_cast<double>(nn);

  const double mean_uy = sum_uy / static_cast<double>(ni);
  const double mean_uz = sum_uz / static_cast<double>(ni);
  if (problem.uniqueness_penalty) out.mse_uq = mean_uy * mean_uy + mean_uz * mean_uz;
  out.mse = out.mse_d + out.mse_n + out.mse_e + out.mse_uq;
  if (!adjoints) return out;

  adjoints->assign(tapes.size(), DisplacementJet{});
  for (std::size_t i = 0; i < ni; ++i) {
    DisplacementJet& adj = (*adjoints)[i];
    for (int k = 0; k < 3; ++k) {
      const double coef = 2.0 / static_cast<double>(ni) * r2s[i][k] * scale;
      for (int m = 0; m < 3; ++m) {
        adj[m].hess[SecondOrderJet::slot(k, m)] += coef * (mat.lambda + mat.G);
        adj[k].hess[SecondOrderJet::slot(m, m)] += coef * mat.G;
      }
    }
    if (problem.uniqueness_penalty) {
      adj[1].value += 2.0 * mean_uy / static_cast<double>(ni);
      adj[2].value += 2.0 * mean_uz / static_cast<double>(ni);
    }
  }
  for (std::size_t i = 0; i < nd; ++i) {
    const DirichletSample& bc = samples.dirichlet[i];
    const Eigen::Vector3d r5 = dirichlet_residual(tapes[ni + i].out.value(), bc);
    DisplacementJet& adj = (*adjoints)[ni + i];
    for (int k = 0; k < 3; ++k)
      if (bc.mask[k])
        adj[k].value += 2.0 * problem.gamma / static_cast<double>(nd) * r5[k];
  }
  for (std::size_t i = 0; i < nn; ++i) {
    const Eigen::Vector3d& n = samples.neumann[i].normal;
    DisplacementJet& adj = (*adjoints)[ni + nd + i];
    for (int k = 0; k < 3; ++k) {
      const double coef = 2.0 / static_cast<double>(nn) * r6s[i][k] * scale;
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
          double dt = mat.G * ((c == k ? n[d] : 0.0) + (d == k ? n[c] : 0.0));
          if (c == d) dt += mat.lambda * n[k];
          adj[c].grad[d] += coef * dt;
        }
      }
    }
  }
  return out;
}

}  // namespace

LossBreakdown total_loss(const NetworkParams& params, const Architecture& arch,
                         const SampleSet& samples, const ProblemSpec& problem,
                         const Material& mat) {
  params.validate(arch);
  problem.validate();
  check_samples(samples);
  const auto pts = all_points(samples);
  std::vector<PointTape> tapes(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) forward_tape(params, arch, pts[i], tapes[i]);
  return assemble(tapes, samples, problem, mat, nullptr);
}

LossAndGrad loss_and_gradient(const NetworkParams& params, const Architecture& arch,
                              const SampleSet& samples, const ProblemSpec& problem,
                              const Material& mat) {
  params.validate(arch);
  problem.validate();
  check_samples(samples);
  const auto pts = all_points(samples);
  std::vector<PointTape> tapes(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) forward_tape(params, arch, pts[i], tapes[i]);

  std::vector<DisplacementJet> adjoints;
  LossAndGrad out;
  out.breakdown = assemble(tapes, samples, problem, mat, &adjoints);
  if (!std::isfinite(out.breakdown.mse)) {
    out.grad = Eigen::VectorXd::Constant(param_count(arch),
                                         std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  NetworkParams grad = NetworkParams::zeros(arch);
  for (std::size_t i = 0; i < tapes.size(); ++i)
    backward_point(params, arch, tapes[i], adjoints[i], grad);
  out.grad = flatten(grad);
  return out;
}

Eigen::VectorXd loss_gradient(const NetworkParams& params, const Architecture& arch,
                              const SampleSet& samples, const ProblemSpec& problem,
                              const Material& mat) {
  LossAndGrad out = loss_and_gradient(params, arch, samples, problem, mat);
  if (!std::isfinite(out.breakdown.mse)) {
    const LossBreakdown& b = out.breakdown;
    const char* term = !std::isfinite(b.mse_e)   ? "mse_e"
                       : !std::isfinite(b.mse_d) ? "mse_d"
                       : !std::isfinite(b.mse_n) ? "mse_n"
                                                 : "mse_uq";
    throw NonFiniteLossError(term);
  }
  return out.grad;
}

LossEvaluator::LossEvaluator(Architecture arch, SampleSet samples, ProblemSpec problem,
                             Material mat)
    : arch_(arch),
      samples_(std::move(samples)),
      problem_(problem),
      mat_(mat),
      n_params_(mgamsgd::param_count(arch)) {
  problem_.validate();
  check_samples(samples_);
}

double LossEvaluator::loss(const Eigen::VectorXd& theta) const {
  return breakdown(theta).mse;
}

LossBreakdown LossEvaluator::breakdown(const Eigen::VectorXd& theta) const {
  const NetworkParams params = unflatten(theta, arch_);
  const auto pts = all_points(samples_);
  tapes_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    forward_tape(params, arch_, pts[i], tapes_[i]);
  return assemble(tapes_, samples_, problem_, mat_, nullptr);
}

LossAndGrad LossEvaluator::loss_and_grad(const Eigen::VectorXd& theta) const {
  const NetworkParams params = unflatten(theta, arch_);
  const auto pts = all_points(samples_);
  tapes_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    forward_tape(params, arch_, pts[i], tapes_[i]);

  std::vector<DisplacementJet> adjoints;
  LossAndGrad out;
  out.breakdown = assemble(tapes_, samples_, problem_, mat_, &adjoints);
  if (!std::isfinite(out.breakdown.mse)) {
    out.grad = Eigen::VectorXd::Constant(n_params_, std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  NetworkParams grad = NetworkParams::zeros(arch_);
  for (std::size_t i = 0; i < tapes_.size(); ++i)
    backward_point(params, arch_, tapes_[i], adjoints[i], grad);
  out.grad = flatten(grad);
  return out;
}

}  // namespace mgamsgd

#include <doctest.h>

#include <cmath>

#include "mgamsgd/autodiff.hpp"
#include "mgamsgd/reference.hpp"
#include "mgamsgd/rng.hpp"
#include "mgamsgd/sampling.hpp"

using namespace mgamsgd;

TEST_CASE("analytic uniaxial field values") {
  const Material mat = Material::isotropic(1.0, 0.3);
  const AnalyticUniaxial u = analytic_uniaxial(mat, -0.1);
  CHECK(u(Eigen::Vector3d(1.0, 0.3, 0.8)).x() == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(u(Eigen::Vector3d(0.0, 0.3, 0.8)).x() == 0.0);
  CHECK(u(Eigen::Vector3d(0.5, 1.0, 0.2)).y() == doctest::Approx(0.015).epsilon(1e-15));
  CHECK(u(Eigen::Vector3d(0.5, 0.5, 0.5)).y() == doctest::Approx(0.0).epsilon(1e-15));

  const AnalyticUniaxial zero = analytic_uniaxial(mat, 0.0);
  CHECK(zero(Eigen::Vector3d(0.7, 0.1, 0.9)) == Eigen::Vector3d::Zero());
}

TEST_CASE("interpolating network reproduces the analytic field exactly") {
  const Material mat = Material::isotropic(1.0, 0.3);
  const auto [arch, params] = interpolating_params(mat, -0.1);
  const AnalyticUniaxial exact = analytic_uniaxial(mat, -0.1);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d x(uniform01(rng), uniform01(rng), uniform01(rng));
    const Eigen::Vector3d u = forward(params, arch, x);
    CHECK((u - exact(x)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("the analytic field is in exact equilibrium") {
  const Material mat = Material::isotropic(1.0, 0.3);
  const auto [arch, params] = interpolating_params(mat, -0.1);
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d x(uniform01(rng), uniform01(rng), uniform01(rng));
    const DisplacementJet jet = jet_evaluate(params, arch, x);
    CHECK(equilibrium_residual(jet, mat, Eigen::Vector3d::Zero()).cwiseAbs().maxCoeff() <=
          1e-14);
    // The stress is uniform diag(p, 0, 0).
    const Eigen::Matrix3d sigma = stress(strain_from_grad(jet.gradient()), mat);
    CHECK(std::abs(sigma(0, 0) - (-0.1)) <= 1e-14);
    CHECK(std::abs(sigma(1, 1)) <= 1e-14);
    CHECK(std::abs(sigma(1, 2)) <= 1e-14);
  }
}

TEST_CASE("mse_u hand checks") {
  const DisplacementField zero = [](const Eigen::Vector3d&) {
    return Eigen::Vector3d::Zero();
  };
  const DisplacementField offset = [](const Eigen::Vector3d&) {
    return Eigen::Vector3d(0.1, 0.0, 0.0);
  };
  const std::vector<Eigen::Vector3d> pts = cube_lattice(3);

  CHECK(mse_u(zero, zero, pts) == 0.0);
  CHECK(mse_u(offset, zero, pts) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(mse_u(zero, offset, pts) == mse_u(offset, zero, pts));
  CHECK_THROWS_AS(mse_u(zero, zero, std::vector<Eigen::Vector3d>{}), std::invalid_argument);
}

TEST_CASE("network_field wraps flat parameters") {
  const Material mat = Material::isotropic(1.0, 0.3);
  const auto [arch, params] = interpolating_params(mat, -0.1);
  const DisplacementField f = network_field(arch, flatten(params));
  const Eigen::Vector3d x(0.2, 0.9, 0.4);
  CHECK(f(x) == forward(params, arch, x));
}

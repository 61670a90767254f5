#include <doctest.h>

#include <cmath>

#include "mgamsgd/network.hpp"

using namespace mgamsgd;

TEST_CASE("elu values and derivatives") {
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(1.0) == 1.0);
  CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  CHECK(elu_d1(0.0) == 1.0);
  CHECK(elu_d2(0.0) == 0.0);
  CHECK(elu_d1(2.0) == 1.0);
  CHECK(elu_d2(2.0) == 0.0);
  CHECK(elu_d1(-2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(elu_d2(-2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(elu_d3(-2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(elu_d3(0.0) == 0.0);
}

TEST_CASE("elu is C1 at the kink") {
  const double eps = 1e-8;
  CHECK(std::abs(elu_d1(eps) - elu_d1(-eps)) <= 1e-7);
}

TEST_CASE("parameter count formula") {
  const Architecture deep{2, 10, 1.0};
  const Architecture tiny{1, 1, 1.0};
  const Architecture mid{3, 4, 1.0};
  const Architecture wide{1, 4, 1.0};
  CHECK(param_count(deep) == 180);
  CHECK(param_count(tiny) == 7);
  CHECK(param_count(mid) == 68);
  CHECK(param_count(wide) == 4 * 3 + 4 + 3 * 4);
}

TEST_CASE("architecture validation") {
  const Architecture no_hidden{0, 5, 1.0};
  const Architecture no_neurons{1, 0, 1.0};
  const Architecture bad_alpha{1, 5, 0.5};
  CHECK_THROWS_AS(no_hidden.validate(), std::invalid_argument);
  CHECK_THROWS_AS(no_neurons.validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad_alpha.validate(), std::invalid_argument);
}

TEST_CASE("init_params is seeded and bounded") {
  const Architecture arch{2, 10, 1.0};
  const NetworkParams a = init_params(arch, 42);
  const NetworkParams b = init_params(arch, 42);
  const NetworkParams c = init_params(arch, 43);
  CHECK(flatten(a) == flatten(b));
  CHECK(flatten(a) != flatten(c));
  const Eigen::VectorXd theta = flatten(a);
  CHECK(theta.size() == 180);
  CHECK(theta.minCoeff() >= -1.0);
  CHECK(theta.maxCoeff() <= 1.0);
}

TEST_CASE("flatten order and roundtrip") {
  const Architecture arch{1, 2, 1.0};
  NetworkParams p = NetworkParams::zeros(arch);
  double v = 1.0;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j) p.hidden_weights[0](k, j) = v++;
  p.hidden_biases[0] << v, v + 1;
  v += 2;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 2; ++j) p.output_weights(k, j) = v++;

  const Eigen::VectorXd theta = flatten(p);
  REQUIRE(theta.size() == param_count(arch));
  CHECK(theta[0] == p.hidden_weights[0](0, 0));  // layer-1 weights first, row-major
  CHECK(theta[1] == p.hidden_weights[0](0, 1));
  CHECK(theta[3] == p.hidden_weights[0](1, 0));
  CHECK(theta[6] == p.hidden_biases[0][0]);
  CHECK(theta[8] == p.output_weights(0, 0));
  CHECK(theta[13] == p.output_weights(2, 1));

  const NetworkParams q = unflatten(theta, arch);
  CHECK(flatten(q) == theta);

  CHECK_THROWS_AS(unflatten(Eigen::VectorXd::Zero(5), arch), std::invalid_argument);
}

TEST_CASE("forward of the zero network vanishes") {
  const Architecture arch{2, 6, 1.0};
  const NetworkParams p = NetworkParams::zeros(arch);
  CHECK(forward(p, arch, Eigen::Vector3d(0.3, 0.8, 0.1)) == Eigen::Vector3d::Zero());
}

TEST_CASE("single-neuron hand evaluation") {
  const Architecture arch{1, 1, 1.0};
  NetworkParams p = NetworkParams::zeros(arch);
  p.hidden_weights[0] << 2.0, 0.0, 0.0;
  p.hidden_biases[0] << -1.0;
  p.output_weights << 0.5, 0.0, 0.0;
  const Eigen::Vector3d u = forward(p, arch, {1.0, 0.0, 0.0});
  CHECK(u.x() == 0.5);
  CHECK(u.y() == 0.0);
  CHECK(u.z() == 0.0);
}

TEST_CASE("output scaling by powers of two is exact") {
  const Architecture arch{2, 5, 1.0};
  NetworkParams p = init_params(arch, 7);
  const Eigen::Vector3d point(0.4, 0.9, 0.2);
  const Eigen::Vector3d u1 = forward(p, arch, point);
  p.output_weights *= 2.0;
  CHECK(forward(p, arch, point) == Eigen::Vector3d(2.0 * u1));
  p.output_weights *= 0.125;
  CHECK(forward(p, arch, point) == Eigen::Vector3d(0.25 * u1));
}

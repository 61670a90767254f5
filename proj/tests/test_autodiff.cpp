#include <doctest.h>

#include <cmath>

#include "mgamsgd/autodiff.hpp"
#include "mgamsgd/network.hpp"
#include "mgamsgd/rng.hpp"

using namespace mgamsgd;

namespace {

// Sum over points and components of u^2 + |grad u|^2 + |hess u|^2; exercises
// every stored jet entry in the pullback.
struct JetNormFunctional : JetFunctional {
  double evaluate(std::span<const PointTape> tapes,
                  std::vector<DisplacementJet>& adjoints) const override {
    adjoints.assign(tapes.size(), DisplacementJet{});
    double loss = 0.0;
    for (std::size_t i = 0; i < tapes.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        const SecondOrderJet& j = tapes[i].out[c];
        loss += j.value * j.value + j.grad.squaredNorm() + j.hess.squaredNorm();
        adjoints[i][c].value = 2.0 * j.value;
        adjoints[i][c].grad = 2.0 * j.grad;
        adjoints[i][c].hess = 2.0 * j.hess;
      }
    }
    return loss;
  }
};

struct UxSquaredFunctional : JetFunctional {
  double evaluate(std::span<const PointTape> tapes,
                  std::vector<DisplacementJet>& adjoints) const override {
    adjoints.assign(tapes.size(), DisplacementJet{});
    double loss = 0.0;
    for (std::size_t i = 0; i < tapes.size(); ++i) {
      const double ux = tapes[i].out[0].value;
      loss += ux * ux;
      adjoints[i][0].value = 2.0 * ux;
    }
    return loss;
  }
};

NetworkParams single_neuron() {
  NetworkParams p = NetworkParams::zeros({1, 1, 1.0});
  p.hidden_weights[0] << 2.0, 0.0, 0.0;
  p.hidden_biases[0] << -1.0;
  p.output_weights << 0.5, 0.0, 0.0;
  return p;
}

}  // namespace

TEST_CASE("jet_evaluate reproduces hand chain-rule values") {
  const Architecture arch{1, 1, 1.0};
  const NetworkParams p = single_neuron();

  SUBCASE("positive pre-activation is piecewise linear") {
    const DisplacementJet jet = jet_evaluate(p, arch, {1.0, 0.0, 0.0});
    CHECK(jet[0].value == 0.5);
    CHECK(jet[0].grad[0] == 1.0);
    CHECK(jet[0].grad[1] == 0.0);
    CHECK(jet[0].hess.isZero(0.0));
    CHECK(jet[1].value == 0.0);
  }
  SUBCASE("negative pre-activation carries curvature") {
    const DisplacementJet jet = jet_evaluate(p, arch, {0.0, 0.0, 0.0});
    CHECK(jet[0].value == doctest::Approx(0.5 * std::expm1(-1.0)).epsilon(1e-14));
    CHECK(jet[0].grad[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(jet[0].hess_at(0, 0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  }
}

TEST_CASE("zero parameters give the zero jet everywhere") {
  const Architecture arch{2, 4, 1.0};
  const NetworkParams p = NetworkParams::zeros(arch);
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    const Eigen::Vector3d x(uniform01(rng), uniform01(rng), uniform01(rng));
    const DisplacementJet jet = jet_evaluate(p, arch, x);
    for (int c = 0; c < 3; ++c) {
      CHECK(jet[c].value == 0.0);
      CHECK(jet[c].grad.isZero(0.0));
      CHECK(jet[c].hess.isZero(0.0));
    }
  }
}

TEST_CASE("forward agrees with the jet value part") {
  const Architecture arch{2, 10, 1.0};
  Rng rng(11);
  for (int draw = 0; draw < 100; ++draw) {
    const NetworkParams p = init_params(arch, rng);
    const Eigen::Vector3d x(uniform01(rng), uniform01(rng), uniform01(rng));
    const Eigen::Vector3d u = forward(p, arch, x);
    const DisplacementJet jet = jet_evaluate(p, arch, x);
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(u[c] - jet[c].value) <=
            1e-14 * std::max(1.0, std::abs(jet[c].value)));
  }
}

TEST_CASE("jets are additive in the output weights") {
  const Architecture arch{1, 4, 1.0};
  Rng rng(5);
  NetworkParams a = init_params(arch, rng);
  NetworkParams b = a;
  NetworkParams sum = a;
  // Same hidden layer, output layers add: the output map is linear in its
  // weights, so the jets add.
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 4; ++j) {
      b.output_weights(k, j) = uniform_symmetric(rng);
      sum.output_weights(k, j) = a.output_weights(k, j) + b.output_weights(k, j);
    }
  const Eigen::Vector3d x(0.3, 0.6, 0.9);
  const DisplacementJet ja = jet_evaluate(a, arch, x);
  const DisplacementJet jb = jet_evaluate(b, arch, x);
  const DisplacementJet js = jet_evaluate(sum, arch, x);
  for (int c = 0; c < 3; ++c) {
    CHECK(js[c].value ==
          doctest::Approx(ja[c].value + jb[c].value).epsilon(1e-14));
    for (int i = 0; i < 3; ++i)
      CHECK(js[c].grad[i] ==
            doctest::Approx(ja[c].grad[i] + jb[c].grad[i]).epsilon(1e-14));
    for (int s = 0; s < 6; ++s)
      CHECK(js[c].hess[s] ==
            doctest::Approx(ja[c].hess[s] + jb[c].hess[s]).epsilon(1e-14));
  }
}

TEST_CASE("fd_gradient hand checks") {
  const auto square = [](const Eigen::VectorXd& t) { return t[0] * t[0]; };
  Eigen::VectorXd w(1);
  w << 3.0;
  CHECK(fd_gradient(square, w, 1e-5)[0] == doctest::Approx(6.0).epsilon(1e-9));

  const auto sine = [](const Eigen::VectorXd& t) { return std::sin(t[0]); };
  w << 0.0;
  CHECK(fd_gradient(sine, w, 1e-5)[0] == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(fd_gradient(square, w, 0.0), std::invalid_argument);
}

TEST_CASE("loss_gradient reproduces the quadratic example") {
  // u = ELU(w) = w at w = 3 for the identity-like single neuron, so the
  // functional u_x^2 realizes loss = w^2 with gradient 6 at the first flat
  // index.
  const Architecture arch{1, 1, 1.0};
  NetworkParams p = NetworkParams::zeros(arch);
  p.hidden_weights[0] << 3.0, 0.0, 0.0;
  p.output_weights << 1.0, 0.0, 0.0;

  const std::vector<Eigen::Vector3d> pts = {{1.0, 0.0, 0.0}};
  const JetLossResult r = loss_gradient(p, arch, pts, UxSquaredFunctional{});
  CHECK(r.loss == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(r.grad[0] == doctest::Approx(6.0).epsilon(1e-13));   // d/dw
  CHECK(r.grad[3] == doctest::Approx(6.0).epsilon(1e-13));   // d/db, same chain
  CHECK(r.grad[4] == doctest::Approx(18.0).epsilon(1e-13));  // d/dwout = 2 u a
}

TEST_CASE("loss_gradient matches finite differences on random networks") {
  const Architecture arch{2, 10, 1.0};
  const JetNormFunctional functional;
  Rng rng(17);
  int checked = 0;
  while (checked < 25) {
    const NetworkParams p = init_params(arch, rng);
    const std::vector<Eigen::Vector3d> pts = {
        {uniform01(rng), uniform01(rng), uniform01(rng)},
        {uniform01(rng), uniform01(rng), uniform01(rng)}};

    // The finite-difference oracle is invalid within a step of the ELU kink;
    // skip draws whose pre-activations sit too close to zero.
    bool near_kink = false;
    for (const auto& x : pts) {
      PointTape tape;
      forward_tape(p, arch, x, tape);
      for (const auto& layer : tape.pre)
        for (const auto& psi : layer)
          if (std::abs(psi.value) < 1e-3) near_kink = true;
    }
    if (near_kink) continue;
    ++checked;

    const JetLossResult exact = loss_gradient(p, arch, pts, functional);
    const Eigen::VectorXd theta = flatten(p);
    const auto loss_of = [&](const Eigen::VectorXd& t) {
      std::vector<PointTape> tapes(pts.size());
      const NetworkParams q = unflatten(t, arch);
      for (std::size_t i = 0; i < pts.size(); ++i) forward_tape(q, arch, pts[i], tapes[i]);
      std::vector<DisplacementJet> unused;
      return functional.evaluate(tapes, unused);
    };
    const Eigen::VectorXd fd = fd_gradient(loss_of, theta, 1e-5);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double err = std::abs(exact.grad[i] - fd[i]);
      const double tol = std::max(1e-8, 1e-5 * std::max(std::abs(exact.grad[i]),
                                                        std::abs(fd[i])));
      CHECK(err <= tol);
    }
  }
}

TEST_CASE("loss_gradient rejects non-finite functionals") {
  const Architecture arch{1, 1, 1.0};
  const NetworkParams p = single_neuron();
  struct InfFunctional : JetFunctional {
    double evaluate(std::span<const PointTape> tapes,
                    std::vector<DisplacementJet>& adjoints) const override {
      adjoints.assign(tapes.size(), DisplacementJet{});
      return std::numeric_limits<double>::infinity();
    }
  };
  const std::vector<Eigen::Vector3d> pts = {{0.5, 0.5, 0.5}};
  CHECK_THROWS_AS(loss_gradient(p, arch, pts, InfFunctional{}), NonFiniteLossError);
}

TEST_CASE("jet_evaluate validates inputs") {
  const Architecture arch{1, 1, 1.0};
  const NetworkParams p = single_neuron();
  CHECK_THROWS_AS(
      jet_evaluate(p, arch, Eigen::Vector3d(std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0)),
      std::invalid_argument);
  const NetworkParams wrong = NetworkParams::zeros({1, 2, 1.0});
  CHECK_THROWS_AS(jet_evaluate(wrong, arch, Eigen::Vector3d(0.0, 0.0, 0.0)), std::invalid_argument);
}

#pragma once

#include <Eigen/Dense>

#include <array>
#include <utility>

namespace mgamsgd {

/// Index pairs of the six unique Hessian entries, slot order xx, xy, xz, yy, yz, zz.
inline constexpr std::array<std::pair<int, int>, 6> kHessSlots = {
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

/// Forward-mode jet carrying value, spatial gradient and spatial Hessian of a
/// scalar field over (x, y, z). The Hessian is stored as its six unique
/// entries, so symmetry holds exactly by construction.
template <typename Scalar>
struct Jet2 {
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  using Vec6 = Eigen::Matrix<Scalar, 6, 1>;

  Scalar value{0};
  Vec3 grad = Vec3::Zero();
  Vec6 hess = Vec6::Zero();

  Jet2() = default;
  explicit Jet2(Scalar v) : value(v) {}
  Jet2(Scalar v, const Vec3& g, const Vec6& h) : value(v), grad(g), hess(h) {}

  /// Seeds an independent variable along the given axis (0..2).
  static Jet2 variable(Scalar v, int axis) {
    Jet2 j(v);
    j.grad[axis] = Scalar(1);
    return j;
  }

  static constexpr int slot(int i, int j) {
    // (i, j) with i <= j maps to xx,xy,xz,yy,yz,zz; swap otherwise.
    constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[i][j];
  }

  Scalar hess_at(int i, int j) const { return hess[slot(i, j)]; }

  Eigen::Matrix<Scalar, 3, 3> hess_matrix() const {
    Eigen::Matrix<Scalar, 3, 3> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = hess_at(i, j);
    return m;
  }

  Scalar laplacian() const { return hess[0] + hess[3] + hess[5]; }

  Jet2& operator+=(const Jet2& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    value -= o.value;
    grad -= o.grad;
    hess -= o.hess;
    return *this;
  }
  Jet2& operator*=(Scalar c) {
    value *= c;
    grad *= c;
    hess *= c;
    return *this;
  }
};

template <typename S>
Jet2<S> operator+(Jet2<S> a, const Jet2<S>& b) {
  a += b;
  return a;
}
template <typename S>
Jet2<S> operator-(Jet2<S> a, const Jet2<S>& b) {
  a -= b;
  return a;
}
template <typename S>
Jet2<S> operator-(const Jet2<S>& a) {
  return Jet2<S>(-a.value, -a.grad, -a.hess);
}
template <typename S>
Jet2<S> operator+(Jet2<S> a, S c) {
  a.value += c;
  return a;
}
template <typename S>
Jet2<S> operator+(S c, Jet2<S> a) {
  a.value += c;
  return a;
}
template <typename S>
Jet2<S> operator-(Jet2<S> a, S c) {
  a.value -= c;
  return a;
}
template <typename S>
Jet2<S> operator*(Jet2<S> a, S c) {
  a *= c;
  return a;
}
template <typename S>
Jet2<S> operator*(S c, Jet2<S> a) {
  a *= c;
  return a;
}

/// Product rule up to second order.
template <typename S>
Jet2<S> operator*(const Jet2<S>& a, const Jet2<S>& b) {
  Jet2<S> r;
  r.value = a.value * b.value;
  r.grad = a.grad * b.value + b.grad * a.value;
  for (int s = 0; s < 6; ++s) {
    const auto [p, q] = kHessSlots[s];
    r.hess[s] = a.hess[s] * b.value + a.grad[p] * b.grad[q] +
                a.grad[q] * b.grad[p] + a.value * b.hess[s];
  }
  return r;
}

/// Chain rule for a smooth scalar map applied to a jet, given the map's
/// value and first two derivatives at the jet's value.
template <typename S>
Jet2<S> chain(const Jet2<S>& x, S f0, S f1, S f2) {
  Jet2<S> r;
  r.value = f0;
  r.grad = f1 * x.grad;
  for (int s = 0; s < 6; ++s) {
    const auto [p, q] = kHessSlots[s];
    r.hess[s] = f2 * x.grad[p] * x.grad[q] + f1 * x.hess[s];
  }
  return r;
}

using SecondOrderJet = Jet2<double>;

/// Per-point bundle of the three displacement components with their spatial
/// derivatives. Row c of gradient() is the gradient of component c.
struct DisplacementJet {
  std::array<SecondOrderJet, 3> components;

  Eigen::Vector3d value() const {
    return {components[0].value, components[1].value, components[2].value};
  }
  Eigen::Matrix3d gradient() const {
    Eigen::Matrix3d g;
    for (int c = 0; c < 3; ++c) g.row(c) = components[c].grad.transpose();
    return g;
  }
  const SecondOrderJet& operator[](int c) const { return components[c]; }
  SecondOrderJet& operator[](int c) { return components[c]; }
};

}  // namespace mgamsgd

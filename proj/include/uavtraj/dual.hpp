#pragma once

#include <array>
#include <cstddef>

namespace uavtraj {

/// Fixed-width forward-mode dual number: value plus K partial derivatives.
/// Only the operations the dynamics actually use are provided.
template <int K>
struct Dual {
  double v = 0.0;
  std::array<double, K> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit from constants

  static Dual seeded(double value, int slot) {
    Dual r(value);
    r.d[slot] = 1.0;
    return r;
  }

  Dual operator-() const {
    Dual r(-v);
    for (int i = 0; i < K; ++i) r.d[i] = -d[i];
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < K; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < K; ++i) d[i] -= o.d[i];
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }

  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < K; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator*(double s, const Dual& a) {
    Dual r(s * a.v);
    for (int i = 0; i < K; ++i) r.d[i] = s * a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, double s) { return s * a; }
  friend Dual operator/(const Dual& a, double s) { return (1.0 / s) * a; }
};

}  // namespace uavtraj

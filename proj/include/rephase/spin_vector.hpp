#pragma once

#include <cmath>

namespace rephase {

/// Bloch vector in the frame {u_perp1, u_perp2, u_par}.
struct SpinVector {
  double perp1 = 0.0;
  double perp2 = 0.0;
  double par = 0.0;

  static constexpr SpinVector u_perp1() { return {1.0, 0.0, 0.0}; }
  static constexpr SpinVector u_perp2() { return {0.0, 1.0, 0.0}; }
  static constexpr SpinVector u_par() { return {0.0, 0.0, 1.0}; }

  constexpr SpinVector& operator+=(const SpinVector& o) {
    perp1 += o.perp1;
    perp2 += o.perp2;
    par += o.par;
    return *this;
  }
  constexpr SpinVector& operator-=(const SpinVector& o) {
    perp1 -= o.perp1;
    perp2 -= o.perp2;
    par -= o.par;
    return *this;
  }
  constexpr SpinVector& operator*=(double s) {
    perp1 *= s;
    perp2 *= s;
    par *= s;
    return *this;
  }

  friend constexpr SpinVector operator+(SpinVector a, const SpinVector& b) { return a += b; }
  friend constexpr SpinVector operator-(SpinVector a, const SpinVector& b) { return a -= b; }
  friend constexpr SpinVector operator-(const SpinVector& a) { return {-a.perp1, -a.perp2, -a.par}; }
  friend constexpr SpinVector operator*(SpinVector a, double s) { return a *= s; }
  friend constexpr SpinVector operator*(double s, SpinVector a) { return a *= s; }
  friend constexpr bool operator==(const SpinVector&, const SpinVector&) = default;

  double transverse() const { return std::sqrt(perp1 * perp1 + perp2 * perp2); }
  double norm() const { return std::sqrt(perp1 * perp1 + perp2 * perp2 + par * par); }
  bool finite() const { return std::isfinite(perp1) && std::isfinite(perp2) && std::isfinite(par); }
};

constexpr double dot(const SpinVector& a, const SpinVector& b) {
  return a.perp1 * b.perp1 + a.perp2 * b.perp2 + a.par * b.par;
}

constexpr SpinVector cross(const SpinVector& a, const SpinVector& b) {
  return {a.perp2 * b.par - a.par * b.perp2,
          a.par * b.perp1 - a.perp1 * b.par,
          a.perp1 * b.perp2 - a.perp2 * b.perp1};
}

}  // namespace rephase

#pragma once

// Hyper-dual numbers a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
// Seeding e1 and e2 on the surface parameters gives exact first and mixed
// second partials of any composition of the operations below.

#include <cmath>

namespace dupin {

// Keep the double overloads visible next to the hyper-dual ones below.
using std::cos;
using std::cosh;
using std::exp;
using std::sin;
using std::sinh;
using std::sqrt;

struct HyperDual {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d12 = 0.0;

  constexpr HyperDual() = default;
  constexpr HyperDual(double x) : v(x) {}  // NOLINT: implicit by design
  constexpr HyperDual(double x, double a, double b, double c) : v(x), d1(a), d2(b), d12(c) {}

  HyperDual& operator+=(const HyperDual& o) { return *this = *this + o; }
  HyperDual& operator-=(const HyperDual& o) { return *this = *this - o; }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
  HyperDual& operator/=(const HyperDual& o) { return *this = *this / o; }

  friend HyperDual operator+(const HyperDual& a, const HyperDual& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
  }
  friend HyperDual operator-(const HyperDual& a, const HyperDual& b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
  }
  friend HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
  friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    return {a.v * b.v, a.v * b.d1 + a.d1 * b.v, a.v * b.d2 + a.d2 * b.v,
            a.v * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.v};
  }
  friend HyperDual operator/(const HyperDual& a, const HyperDual& b) { return a * inv(b); }

  // f(x) lifted with f' and f''.
  static HyperDual chain(const HyperDual& x, double f, double fp, double fpp) {
    return {f, fp * x.d1, fp * x.d2, fp * x.d12 + fpp * x.d1 * x.d2};
  }
  friend HyperDual inv(const HyperDual& x) {
    const double r = 1.0 / x.v;
    return chain(x, r, -r * r, 2.0 * r * r * r);
  }
};

inline HyperDual sin(const HyperDual& x) { return HyperDual::chain(x, std::sin(x.v), std::cos(x.v), -std::sin(x.v)); }
inline HyperDual cos(const HyperDual& x) { return HyperDual::chain(x, std::cos(x.v), -std::sin(x.v), -std::cos(x.v)); }
inline HyperDual sinh(const HyperDual& x) { return HyperDual::chain(x, std::sinh(x.v), std::cosh(x.v), std::sinh(x.v)); }
inline HyperDual cosh(const HyperDual& x) { return HyperDual::chain(x, std::cosh(x.v), std::sinh(x.v), std::cosh(x.v)); }
inline HyperDual exp(const HyperDual& x) {
  const double e = std::exp(x.v);
  return HyperDual::chain(x, e, e, e);
}
inline HyperDual sqrt(const HyperDual& x) {
  const double s = std::sqrt(x.v);
  return HyperDual::chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}

inline double value(double x) { return x; }
inline double value(const HyperDual& x) { return x.v; }

}  // namespace dupin

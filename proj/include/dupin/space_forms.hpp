#pragma once

// The three space forms and the conformal maps between them.
//
//   euclidean : R^3 = span{e1,e2,e3}, stored as (x1,x2,x3)
//   sphere    : S^3 in R^4, stored as (x0,x1,x2,x3)
//   hyperbolic: H^3 = {<x,x> = -1, x4 >= 1} in R^{3,1}, stored as (x1,x2,x3,x4)
//
// Moebius space is the projectivized null cone of R^{4,1}; points are
// returned with epsilon coordinates (e0..e4) unless a function says otherwise.

#include "dupin/indefinite_linalg.hpp"

#include <array>
#include <stdexcept>

namespace dupin {

class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ChartError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Form { euclidean, sphere, hyperbolic };
std::string to_string(Form f);

inline constexpr double kPoleTol = 1e-9;

struct SpaceFormPoint {
  Form form;
  Vec coords;

  // Sphere: |x|^2 - 1; hyperbolic: <x,x> + 1; euclidean: 0.
  double constraint_residual() const;
  // Throws std::invalid_argument when the point is off its space form.
  static SpaceFormPoint checked(Form form, Vec coords, double tol = 1e-10);
};

// Templated cores, usable with HyperDual for exact derivatives.  No checks.
template <class T>
std::array<T, 3> stereo_t(const std::array<T, 4>& x) {
  const T d = T(1.0) + x[0];
  return {x[1] / d, x[2] / d, x[3] / d};
}

template <class T>
std::array<T, 4> stereo_inv_t(const std::array<T, 3>& y) {
  const T n2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const T d = T(1.0) + n2;
  return {(T(1.0) - n2) / d, T(2.0) * y[0] / d, T(2.0) * y[1] / d, T(2.0) * y[2] / d};
}

template <class T>
std::array<T, 3> hyp_stereo_t(const std::array<T, 4>& x) {
  const T d = T(1.0) + x[3];
  return {x[0] / d, x[1] / d, x[2] / d};
}

template <class T>
std::array<T, 4> hyp_stereo_inv_t(const std::array<T, 3>& y) {
  const T n2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const T d = T(1.0) - n2;
  return {T(2.0) * y[0] / d, T(2.0) * y[1] / d, T(2.0) * y[2] / d, (T(1.0) + n2) / d};
}

// Checked versions.  stereo throws PoleError within kPoleTol of -e0;
// hyp_stereo_inv and poincare_factor throw ChartError for |y| >= 1.
Vec stereo(const Vec& x);
Vec stereo_inv(const Vec& y);
Vec hyp_stereo(const Vec& x);
Vec hyp_stereo_inv(const Vec& y);
double poincare_factor(const Vec& y);

// Null vector representing f_+, f_0 or f_- of the point (epsilon coords of R^{4,1}):
//   f_+(x) = x + e4,  f_0 = f_+ o stereo_inv,  f_-(x) ~ x + e0.
Vec moebius_lift(const SpaceFormPoint& p);
ProjectivePoint embed_moebius(const SpaceFormPoint& p);

// Inverse charts on a null vector q (epsilon coords).  Throw ChartError when
// q is outside the image of the chart.
SpaceFormPoint moebius_to_sphere(const Vec& q);
SpaceFormPoint moebius_to_euclidean(const Vec& q);
SpaceFormPoint moebius_to_hyperbolic(const Vec& q);
SpaceFormPoint moebius_to_form(const Vec& q, Form form);

// Isometries of the space forms:
//   sphere:     4x4 A in SO(4)
//   euclidean:  4x4 (y, A) = [[1, 0], [y, A]] with A in SO(3)
//   hyperbolic: 4x4 B in SO(3,1) preserving x4 > 0 (basis e1..e4)
// Throws MembershipError when g fails its own group test.
void check_isometry(const Mat& g, Form form, double tol = 1e-10);
SpaceFormPoint act(const Mat& g, const SpaceFormPoint& p);

// The monomorphisms F_+, F_0, F_- into the Moebius group, returned in the
// delta basis (metric moebius_metric()).
GroupElement group_embed(const Mat& g, Form form);

// max over points of the projective distance between f(g p) and F(g) f(p).
double equivariance_residual(const Mat& g, Form form, const std::vector<SpaceFormPoint>& pts);

// Euclidean translation matrix in the delta basis: the image of (y, I).
Mat moebius_translation(const Vec& y);

// Distance between two projective points given by representatives:
// the residual of the best scalar fit, relative to the norm.
double projective_distance(const Vec& a, const Vec& b);

}  // namespace dupin

#include "dupin/space_forms.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace dupin;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec v4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

struct Sampler {
  std::mt19937 rng{2024};
  std::normal_distribution<double> nd{0.0, 1.0};
  std::uniform_real_distribution<double> ud{0.0, 1.0};

  Vec gauss(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
  }
  Vec sphere_point() {
    Vec x = gauss(4);
    if (x(0) < -0.9 * x.norm()) x(0) = -x(0);  // stay away from the pole
    return x.normalized();
  }
  Vec ball_point() { return gauss(3).normalized() * 0.95 * std::cbrt(ud(rng)); }
  Vec hyperbolic_point() {
    const Vec y = gauss(3) * 0.7;
    return v4(y(0), y(1), y(2), std::sqrt(1.0 + y.squaredNorm()));
  }
  Mat rotation(int n) {
    Mat a = gauss(n * n).reshaped(n, n);
    return (a - a.transpose()).exp();
  }
};

Mat hyperbolic_isometry(Sampler& s) {
  // exp of a random so(3,1) element in the basis e1..e4.
  Mat x = Mat::Zero(4, 4);
  const Vec r = s.gauss(6) * 0.5;
  x(0, 1) = r(0), x(1, 0) = -r(0);
  x(0, 2) = r(1), x(2, 0) = -r(1);
  x(1, 2) = r(2), x(2, 1) = -r(2);
  for (int i = 0; i < 3; ++i) x(i, 3) = x(3, i) = r(3 + i);
  return x.exp();
}

}  // namespace

TEST_CASE("stereographic projection") {
  CHECK(stereo(v4(1, 0, 0, 0)).norm() == 0.0);
  CHECK((stereo(v4(0, 1, 0, 0)) - v3(1, 0, 0)).norm() < 1e-15);
  CHECK((stereo_inv(v3(0, 0, 0)) - v4(1, 0, 0, 0)).norm() == 0.0);
  CHECK_THROWS_AS(stereo(v4(-1, 0, 0, 0)), PoleError);
  CHECK_THROWS_AS(stereo(v4(-1, 1e-12, 0, 0)), PoleError);

  Sampler s;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec x = s.sphere_point();
    worst = std::max(worst, (stereo_inv(stereo(x)) - x).norm());
    const Vec y = s.gauss(3) * 3.0;
    worst = std::max(worst, (stereo(stereo_inv(y)) - y).norm() / (1.0 + y.norm()));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("stereo_inv is conformal") {
  Sampler s;
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const Vec y = s.gauss(3);
    Mat J(4, 3);
    for (int i = 0; i < 3; ++i) {
      Vec yp = y, ym = y;
      yp(i) += h;
      ym(i) -= h;
      J.col(i) = (stereo_inv(yp) - stereo_inv(ym)) / (2 * h);
    }
    const Mat G = J.transpose() * J;
    const double lambda = G.trace() / 3.0;
    CHECK(lambda == doctest::Approx(4.0 / std::pow(1.0 + y.squaredNorm(), 2)).epsilon(1e-7));
    CHECK((G - lambda * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("hyperbolic stereographic projection") {
  CHECK(hyp_stereo(v4(0, 0, 0, 1)).norm() == 0.0);
  CHECK((hyp_stereo_inv(v3(0, 0, 0)) - v4(0, 0, 0, 1)).norm() == 0.0);
  for (double tau : {0.1, 0.8, 2.5}) {
    const Vec y = hyp_stereo(v4(std::sinh(tau), 0, 0, std::cosh(tau)));
    // half-angle identity: sinh t / (1 + cosh t) = tanh(t / 2)
    CHECK(y(0) == doctest::Approx(std::tanh(tau / 2)).epsilon(1e-14));
    CHECK(std::abs(y(1)) + std::abs(y(2)) == 0.0);
  }
  CHECK_THROWS_AS(hyp_stereo_inv(v3(1, 0, 0)), ChartError);
  CHECK_THROWS_AS(hyp_stereo_inv(v3(0.8, 0.8, 0)), ChartError);

  Sampler s;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec x = s.hyperbolic_point();
    const Vec y = hyp_stereo(x);
    CHECK(y.norm() < 1.0);
    worst = std::max(worst, (hyp_stereo_inv(y) - x).norm() / x.norm());
    const Vec b = s.ball_point();
    worst = std::max(worst, (hyp_stereo(hyp_stereo_inv(b)) - b).norm());
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Poincare conformal factor") {
  CHECK(poincare_factor(v3(0, 0, 0)) == 2.0);
  CHECK(poincare_factor(v3(0.5, 0, 0)) == doctest::Approx(8.0 / 3.0));
  CHECK(poincare_factor(v3(0, 0.999999, 0)) > 1e5);
  CHECK_THROWS_AS(poincare_factor(v3(0, 0, 1)), ChartError);

  // The pull back of the hyperboloid metric under hyp_stereo_inv is
  // poincare_factor^2 times the flat metric.
  const Vec y = v3(0.3, -0.2, 0.4);
  const double h = 1e-6;
  Mat J(4, 3);
  for (int i = 0; i < 3; ++i) {
    Vec yp = y, ym = y;
    yp(i) += h;
    ym(i) -= h;
    J.col(i) = (hyp_stereo_inv(yp) - hyp_stereo_inv(ym)) / (2 * h);
  }
  const Mat eta = Vec(v4(1, 1, 1, -1)).asDiagonal();
  const Mat G = J.transpose() * eta * J;
  const double f = poincare_factor(y);
  CHECK((G - f * f * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("space form points") {
  CHECK_NOTHROW(SpaceFormPoint::checked(Form::sphere, v4(0, 1, 0, 0)));
  CHECK_THROWS_AS(SpaceFormPoint::checked(Form::sphere, v4(0, 2, 0, 0)), std::invalid_argument);
  CHECK_NOTHROW(SpaceFormPoint::checked(Form::hyperbolic, v4(0, 0, 0, 1)));
  CHECK_THROWS_AS(SpaceFormPoint::checked(Form::hyperbolic, v4(0, 0, 0, -1)), std::invalid_argument);
  CHECK_THROWS_AS(SpaceFormPoint::checked(Form::hyperbolic, v4(1, 0, 0, 1)), std::invalid_argument);
  CHECK_NOTHROW(SpaceFormPoint::checked(Form::euclidean, v3(5, -3, 2)));
}

TEST_CASE("embedding into Moebius space") {
  const Metric e41(Space::R41);
  // f_+(e0) = [e0 + e4] = [delta_0]
  const Vec q = moebius_lift(SpaceFormPoint::checked(Form::sphere, v4(1, 0, 0, 0)));
  Vec d0 = Vec::Zero(5);
  d0(0) = d0(4) = 1.0;
  CHECK(projective_distance(q, d0) < 1e-15);
  CHECK(embed_moebius(SpaceFormPoint::checked(Form::euclidean, v3(0, 0, 0))).same_as(ProjectivePoint(d0)));

  Sampler s;
  double null = 0.0, hyp = 0.0, chart = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec xs = s.sphere_point();
    const Vec y = s.gauss(3);
    const Vec xh = s.hyperbolic_point();
    const auto ps = SpaceFormPoint::checked(Form::sphere, xs);
    const auto pe = SpaceFormPoint::checked(Form::euclidean, y);
    const auto ph = SpaceFormPoint::checked(Form::hyperbolic, xh);
    for (const auto& p : {ps, pe, ph}) {
      const Vec m = moebius_lift(p);
      null = std::max(null, std::abs(inner(m, m, e41)) / m.squaredNorm());
    }
    // f_-(x) = [x + e0], composed numerically through the sphere chart.
    Vec expect = Vec::Zero(5);
    expect(0) = 1.0;
    expect.segment(1, 3) = xh.head(3);
    expect(4) = xh(3);
    hyp = std::max(hyp, projective_distance(moebius_lift(ph), expect));
    const Vec via = moebius_lift(SpaceFormPoint::checked(Form::sphere, stereo_inv(hyp_stereo(xh))));
    hyp = std::max(hyp, projective_distance(via, expect));

    chart = std::max(chart, (moebius_to_sphere(moebius_lift(ps)).coords - xs).norm());
    chart = std::max(chart, (moebius_to_euclidean(moebius_lift(pe)).coords - y).norm() / (1 + y.norm()));
    chart = std::max(chart, (moebius_to_hyperbolic(moebius_lift(ph)).coords - xh).norm() / xh.norm());
  }
  CHECK(null < 1e-12);
  CHECK(hyp < 1e-12);
  CHECK(chart < 1e-12);
}

TEST_CASE("equivariant group embeddings") {
  Sampler s;
  std::vector<SpaceFormPoint> sp, ep, hp;
  for (int k = 0; k < 100; ++k) {
    sp.push_back(SpaceFormPoint::checked(Form::sphere, s.sphere_point()));
    ep.push_back(SpaceFormPoint::checked(Form::euclidean, s.gauss(3)));
    hp.push_back(SpaceFormPoint::checked(Form::hyperbolic, s.hyperbolic_point()));
  }
  const Metric mm = moebius_metric();

  const GroupElement id = group_embed(Mat::Identity(4, 4), Form::sphere);
  CHECK((id.mat - Mat::Identity(5, 5)).norm() < 1e-15);

  for (int k = 0; k < 10; ++k) {
    const Mat A = s.rotation(4);
    const GroupElement F = group_embed(A, Form::sphere);
    CHECK(group_residual(F.mat, mm) < 1e-10);
    CHECK(equivariance_residual(A, Form::sphere, sp) < 1e-10);
    // In epsilon coordinates F_+(A) fixes e4 and acts as A on e0..e3.
    const Mat Fe = change_basis(F.mat, Space::R41, BasisTag::delta, BasisTag::epsilon);
    CHECK((Fe.topLeftCorner(4, 4) - A).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(Fe(4, 4) - 1.0) < 1e-12);
    CHECK(Fe.row(4).head(4).norm() + Fe.col(4).head(4).norm() < 1e-12);

    Mat E = Mat::Identity(4, 4);
    E.block(1, 1, 3, 3) = s.rotation(3);
    E.block(1, 0, 3, 1) = s.gauss(3);
    CHECK(group_residual(group_embed(E, Form::euclidean).mat, mm) < 1e-10);
    CHECK(equivariance_residual(E, Form::euclidean, ep) < 1e-10);

    const Mat B = hyperbolic_isometry(s);
    CHECK(group_residual(group_embed(B, Form::hyperbolic).mat, mm) < 1e-10);
    CHECK(equivariance_residual(B, Form::hyperbolic, hp) < 1e-10);
  }

  // Pure translations are lower triangular in the delta basis.
  const Vec y = v3(0.5, -1.0, 2.0);
  Mat T = Mat::Identity(4, 4);
  T.block(1, 0, 3, 1) = y;
  const Mat F = group_embed(T, Form::euclidean).mat;
  CHECK((F - moebius_translation(y)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(F.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(F(0, 0) == doctest::Approx(1.0));
  CHECK(F(4, 4) == doctest::Approx(1.0));
  CHECK(std::abs(F(4, 0)) == doctest::Approx(y.squaredNorm()));

  Mat bad = Mat::Identity(4, 4);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(group_embed(bad, Form::sphere), MembershipError);
  Mat reflect = Mat::Identity(4, 4);
  reflect(3, 3) = -1.0;  // time reversal leaves the upper sheet
  CHECK_THROWS_AS(group_embed(reflect, Form::hyperbolic), MembershipError);
}

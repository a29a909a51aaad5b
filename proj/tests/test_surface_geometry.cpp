#include "dupin/surface_geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace dupin;

namespace {

ParametricSurface figure1() { return pushforward(torus(M_PI / 4), ProjectionMap::stereo); }

ParametricSurface with_grid(ParametricSurface s, int nu, int nv) {
  s.domain = s.domain.with_grid(nu, nv);
  return s;
}

}  // namespace

TEST_CASE("catalog parameters are range checked") {
  CHECK_THROWS_AS(torus(0.0), std::invalid_argument);
  CHECK_THROWS_AS(torus(M_PI / 4 + 1e-3), std::invalid_argument);
  CHECK_NOTHROW(torus(M_PI / 4));
  CHECK_THROWS_AS(hyperboloid(0.0), std::invalid_argument);
  CHECK_THROWS_AS(hyperboloid(1.0), std::invalid_argument);
  CHECK_THROWS_AS(cylinder(0.0), std::invalid_argument);
  CHECK_THROWS_AS(cylinder(-1.0), std::invalid_argument);
}

TEST_CASE("catalog surfaces lie in their space forms") {
  CHECK(torus(M_PI / 4).constraint_residual() < 1e-10);
  CHECK(torus(0.3).constraint_residual() < 1e-10);
  CHECK(hyperboloid(0.5).constraint_residual() < 1e-10);
  CHECK(hyperboloid(0.9).constraint_residual() < 1e-10);
  // The factor circles sit in the (e0, e1) and (e2, e3) planes.
  const Vec x = torus(M_PI / 6).position(0.4, 1.1);
  CHECK(std::hypot(x(0), x(1)) == doctest::Approx(std::cos(M_PI / 6)));
  CHECK(std::hypot(x(2), x(3)) == doctest::Approx(std::sin(M_PI / 6)));
}

TEST_CASE("principal curvatures of the catalog") {
  const CurvatureData t4 = curvature(torus(M_PI / 4), 0.3, 0.7);
  CHECK(t4.a == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(t4.c == doctest::Approx(1.0).epsilon(1e-10));

  const CurvatureData t6 = curvature(torus(M_PI / 6), 1.0, 2.0);
  CHECK(std::abs(t6.a + 1.0 / std::sqrt(3.0)) < 1e-6);
  CHECK(std::abs(t6.c - std::sqrt(3.0)) < 1e-6);

  const CurvatureData h = curvature(hyperboloid(0.5), 0.2, 0.1);
  CHECK(std::abs(h.a - 0.5) < 1e-6);
  CHECK(std::abs(h.c - 2.0) < 1e-6);

  for (int k = 1; k <= 20; ++k) {
    const double alpha = k * (M_PI / 4) / 20;
    const auto s = torus(alpha);
    const CurvatureData cd = curvature(s, 0.1 * k, 0.3 * k);
    CHECK(std::abs(cd.a * cd.c + 1.0) < 1e-8);
    CHECK(std::abs(cd.a + std::tan(alpha)) < 1e-6);
    CHECK(std::abs(cd.c - 1.0 / std::tan(alpha)) < 1e-6);
    const FundamentalForms ff = fundamental_forms(s, 0.1 * k, 0.3 * k);
    CHECK(std::abs(cd.dir_a.dot(ff.I * cd.dir_c)) < 1e-8);

    const double a = 0.045 * k;
    const CurvatureData hd = curvature(hyperboloid(a), 0.2 * k, 0.05 * k);
    CHECK(std::abs(hd.a * hd.c - 1.0) < 1e-8);
  }

  for (double R : {0.5, 1.0, 3.0}) {
    const CurvatureData cd = curvature(cylinder(R), 0.4, 0.2);
    CHECK(std::abs(cd.a * cd.c) < 1e-10);
    CHECK(std::abs(cd.c - 1.0 / R) < 1e-8);
  }
}

TEST_CASE("fundamental forms of the cylinder and the sphere") {
  const double R = 2.0;
  const FundamentalForms ff = fundamental_forms(cylinder(R), 0.5, 0.25);
  CHECK(ff.I(0, 0) == doctest::Approx(R * R));
  CHECK(ff.I(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(ff.I(0, 1)) < 1e-14);
  CHECK(std::abs(ff.II(0, 0)) == doctest::Approx(R));
  CHECK(std::abs(ff.II(1, 1)) < 1e-14);
  CHECK(std::abs(ff.II(0, 1)) < 1e-14);

  const auto sp = sphere_patch();
  const FundamentalForms fs = fundamental_forms(sp, 0.8, 0.6);
  CHECK((fs.II - fs.I).cwiseAbs().maxCoeff() < 1e-10);
  const CurvatureData cd = curvature(fs);
  CHECK(cd.umbilic);
  CHECK(cd.a == doctest::Approx(1.0));
}

TEST_CASE("singular points are rejected") {
  ParamDomain d;
  d.u0 = -1, d.u1 = 1, d.v0 = -1, d.v1 = 1;
  // (u, v) -> (u^2, v, u^3) is singular along u = 0.
  const auto s = from_positions("fold", Form::euclidean, d, [](double u, double v) {
    Vec x(3);
    x << u * u, v, u * u * u;
    return x;
  });
  CHECK_THROWS_AS(fundamental_forms(s, 0.0, 0.3), SingularPointError);
  CHECK_NOTHROW(fundamental_forms(s, 0.5, 0.3));
}

TEST_CASE("classification") {
  const ClassifyResult t = classify(with_grid(torus(M_PI / 4), 24, 24));
  CHECK(t.isoparametric);
  CHECK(t.dupin == Verdict::yes);
  CHECK(t.analytic);

  const ClassifyResult f = classify(with_grid(figure1(), 32, 32));
  CHECK_FALSE(f.isoparametric);
  CHECK(f.dupin == Verdict::yes);
  CHECK(f.umbilic_points.empty());

  const ClassifyResult h = classify(with_grid(pushforward(hyperboloid(0.5), ProjectionMap::hyp_stereo), 24, 24));
  CHECK_FALSE(h.isoparametric);
  CHECK(h.dupin == Verdict::yes);

  const ClassifyResult c = classify(with_grid(pushforward(cylinder(1.0), ProjectionMap::identity), 16, 16));
  CHECK(c.isoparametric);
  CHECK(c.dupin == Verdict::yes);

  const ClassifyResult sp = classify(with_grid(sphere_patch(), 12, 12));
  CHECK(sp.dupin == Verdict::undefined);
  CHECK(sp.umbilic_points.size() == 144);
  CHECK_FALSE(sp.warnings.empty());

  const ClassifyResult w = classify(with_grid(warped_stereo_torus(M_PI / 4, 0.1), 24, 24));
  CHECK(w.dupin == Verdict::no);
  CHECK(w.max_dupin_derivative > 1e-2);
}

TEST_CASE("classification is invariant under periodic shifts") {
  const auto base = figure1();
  const auto shifted = from_positions("shifted", Form::euclidean, base.domain,
                                      [base](double u, double v) { return base.position(u + 0.37, v + 1.9); });
  const ClassifyResult a = classify(with_grid(base, 24, 24));
  const ClassifyResult b = classify(with_grid(shifted, 24, 24));
  CHECK(a.isoparametric == b.isoparametric);
  CHECK(a.dupin == b.dupin);
  CHECK(a.a_min == doctest::Approx(b.a_min).epsilon(1e-2));
  CHECK(a.c_max == doctest::Approx(b.c_max).epsilon(1e-2));
}

TEST_CASE("curvature line derivative") {
  CHECK(curvature_line_derivative(figure1(), 0.3, 1.2, 0) < 1e-6);
  CHECK(curvature_line_derivative(figure1(), 0.3, 1.2, 1) < 1e-6);
  CHECK(curvature_line_derivative(warped_stereo_torus(M_PI / 4, 0.1), 0.3, 1.2, 0) +
            curvature_line_derivative(warped_stereo_torus(M_PI / 4, 0.1), 0.3, 1.2, 1) >
        1e-2);
}

TEST_CASE("Euclidean best frames") {
  const auto cyl = with_grid(pushforward(cylinder(1.0), ProjectionMap::identity), 16, 12);
  const EuclideanBestFrame bf = euclidean_best_frame(cyl);
  CHECK(bf.field.max_group_residual() < 1e-10);
  const Mat& e = bf.field.frames(3, 4);
  const Vec x = cyl.position(cyl.domain.u(3), cyl.domain.v(4));
  // e1 along the ruling, e2 along the circle, e3 normal.
  CHECK(std::abs(std::abs(e(3, 1)) - 1.0) < 1e-10);
  CHECK(std::abs(e.col(2).segment(1, 3).dot(x)) < 1e-10);
  CHECK(std::abs(std::abs(e.col(3).segment(1, 3).dot(x)) - 1.0) < 1e-10);
  CHECK(std::abs(bf.a(3, 4)) < 1e-10);
  CHECK(std::abs(bf.c(3, 4) - 1.0) < 1e-10);

  const DupinPDEReport r = dupin_pde_residual(bf);
  CHECK(r.max() < 1e-6);
  CHECK(r.theta3 < 1e-6);
  CHECK(r.omega31 < 1e-4);
  CHECK(r.omega32 < 1e-4);

  const EuclideanBestFrame fb = euclidean_best_frame(with_grid(figure1(), 64, 64));
  CHECK(fb.field.frames.size() == 64u * 64u);
  const DupinPDEReport rf = dupin_pde_residual(fb);
  CHECK(rf.max() < 1e-3);
  CHECK(rf.theta3 < 1e-4);
  CHECK(rf.omega31 < 1e-4);
  CHECK(rf.omega32 < 1e-4);

  const EuclideanBestFrame wb = euclidean_best_frame(with_grid(warped_stereo_torus(M_PI / 4, 0.1), 64, 64));
  CHECK(dupin_pde_residual(wb).max() > 1e-2);

  try {
    euclidean_best_frame(with_grid(sphere_patch(), 6, 6));
    FAIL("umbilic surface accepted");
  } catch (const UmbilicError& err) {
    CHECK(err.points.size() == 36);
  }
}

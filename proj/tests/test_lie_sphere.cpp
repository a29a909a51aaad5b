#include "dupin/lie_sphere.hpp"
#include "dupin/export.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dupin;

namespace {

Vec e6(int k) {
  Vec v = Vec::Zero(6);
  v(k) = 1.0;
  return v;
}

Vec e5(int k) {
  Vec v = Vec::Zero(5);
  v(k) = 1.0;
  return v;
}

ParametricSurface gridded(ParametricSurface s, int n) {
  s.domain = s.domain.with_grid(n, n);
  return s;
}

// A generic element of the Lie group: exp of a random algebra element (lambda basis).
Mat random_lie_frame(unsigned seed, double scale = 0.5) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Mat x(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) x(i, j) = scale * nd(rng);
  return mat_exp(project_to_algebra(x, lie_metric()));
}

}  // namespace

TEST_CASE("lines of the Lie quadric") {
  const PencilLine l = make_line(e6(0) + e6(4), e6(1) + e6(5));
  CHECK(l.quadric0 < 1e-15);
  CHECK(l.quadric1 < 1e-15);
  CHECK(l.orthogonality < 1e-15);
  CHECK(l.S0.norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_line(e6(0) + e6(4), e6(0) + e6(4)), DependentError);
  CHECK_THROWS_AS(make_line(e6(0) + e6(4), -3.0 * (e6(0) + e6(4))), DependentError);
  CHECK_THROWS_AS(make_line(e6(0), e6(1) + e6(5)), OffQuadricError);
  CHECK_THROWS_AS(make_line(e6(0) + e6(4), e6(0) + e6(5)), NonOrthogonalError);
  CHECK_THROWS_AS(make_line(e6(0) + e6(4), e6(0) + e6(5)), LineError);
}

TEST_CASE("inclusions and spherical projection") {
  CHECK((include_sphere(e5(0)) - (e6(0) + e6(5))).norm() == 0.0);

  const Vec q = e5(0) + e5(4);
  const Vec qi = include_point(q);
  CHECK(lie_inner(qi, e6(5)) == 0.0);
  CHECK(quadric_residual(qi) == 0.0);
  const Vec S = sphere_to_vec({(Vec(4) << 0, 1, 0, 0).finished(), 0.7});
  const Vec Si = include_sphere(S);
  CHECK(std::abs(quadric_residual(Si)) < 1e-15);
  CHECK(lie_inner(Si, e6(5)) != 0.0);

  // A sphere through the point: the line [point, sphere] projects back to the point.
  const Vec x = (Vec(4) << 1, 0, 0, 0).finished();
  const Vec n = (Vec(4) << 0, 0, 1, 0).finished();
  const Vec T = tangent_sphere(x, n, 1.1);
  const PencilLine pl = make_line(include_point(moebius_lift(SpaceFormPoint::checked(Form::sphere, x))),
                                  include_sphere(T));
  CHECK(projective_distance(spherical_projection(pl), q) < 1e-14);
  // Order of the spheres does not matter.
  CHECK(projective_distance(spherical_projection(pl.S1, pl.S0), q) < 1e-14);

  CHECK_THROWS_AS(spherical_projection(qi, 2.0 * qi), DegenerateLineError);
}

TEST_CASE("the explicit Legendre immersion") {
  const LegendreMap l = example_lambda(32, 32);
  CHECK(line_residual(l) < 1e-15);
  CHECK(contact_residual(l) < 1e-10);
  CHECK(min_immersion_rank(l) > 1e-2);
  const auto [second, first] = spherical_projection_rank(l);
  CHECK(second < 1e-10);
  CHECK(first > 1e-2);

  const LineSampler f = example_sampler();
  for (double u : {0.0, 0.7, 2.9}) {
    for (double v : {0.1, 4.0}) {
      const auto [S0, S1] = f(u, v);
      CHECK(std::abs(lie_inner(S0, S0)) < 1e-15);
      CHECK(std::abs(lie_inner(S1, S1)) < 1e-15);
      CHECK(std::abs(lie_inner(S0, S1)) < 1e-15);
      Vec expect = Vec::Zero(5);
      expect << std::cos(u), 0, 0, std::sin(u), 1;
      CHECK(projective_distance(spherical_projection(S0, S1), expect) < 1e-14);
    }
  }

  const LegendreDupinResult d = legendre_dupin_test(l);
  CHECK(d.dupin);
  CHECK_FALSE(d.umbilic);
  CHECK_FALSE(d.degenerate);
}

TEST_CASE("contact residual negative control") {
  ParamDomain d;
  d.u0 = 0, d.u1 = 2 * M_PI, d.v0 = 0, d.v1 = 1;
  d.nu = 16, d.nv = 8;
  d.periodic_u = true;
  const LegendreMap bad = sample_legendre(d, [](double u, double) {
    Vec s0 = Vec::Zero(6);
    s0 << std::cos(u), std::sin(u), 0, 0, 1, 0;
    return std::make_pair(s0, Vec(e6(0) + e6(5)));
  });
  CHECK(contact_residual(bad) > 0.1);
}

TEST_CASE("Legendre lifts") {
  const auto t = gridded(torus(M_PI / 4), 24);
  for (int which : {-1, 0, 1}) {
    const LegendreMap l = legendre_lift(surface_lift(t, which), t.domain);
    CHECK(contact_residual(l) < 1e-8);
    CHECK(line_residual(l) < 1e-10);
    // The spherical projection of the lift is the surface again.
    double back = 0.0;
    for (int i = 0; i < t.domain.nu; ++i)
      for (int j = 0; j < t.domain.nv; ++j) {
        const Vec p = moebius_lift(SpaceFormPoint::checked(Form::sphere, t.position(t.domain.u(i), t.domain.v(j))));
        back = std::max(back, projective_distance(spherical_projection(l.S0(i, j), l.S1(i, j)), p));
      }
    CHECK(back < 1e-10);
  }

  const auto cyl = gridded(pushforward(cylinder(1.0), ProjectionMap::identity), 16);
  CHECK(contact_residual(legendre_lift(surface_lift(cyl, 0), cyl.domain)) < 1e-8);

  // A sphere field that is not tangent is rejected.
  const auto base = surface_lift(t, 0);
  const LiftSampler skew = [base](double u, double v) {
    auto fs = base(u, v);
    fs.second = sphere_to_vec({(Vec(4) << 0.6, 0, 0.8, 0).finished(), 1.0});
    return fs;
  };
  CHECK_THROWS_AS(legendre_lift(skew, t.domain), TangencyError);
}

TEST_CASE("Dupin test for Legendre maps") {
  const auto fig1 = gridded(pushforward(torus(M_PI / 4), ProjectionMap::stereo), 24);
  CHECK(legendre_dupin_test(legendre_lift(surface_lift(fig1), fig1.domain)).dupin);

  const auto warped = gridded(warped_stereo_torus(M_PI / 4, 0.1), 24);
  const LegendreDupinResult w = legendre_dupin_test(legendre_lift(surface_lift(warped), warped.domain));
  CHECK_FALSE(w.dupin);
  CHECK(w.max_derivative > 1e-2);

  // Round sphere: every point is umbilic.
  const auto sp = gridded(sphere_patch(), 8);
  const LegendreDupinResult s = legendre_dupin_test(legendre_lift(surface_lift(sp), sp.domain));
  CHECK(s.umbilic);
  CHECK_FALSE(s.dupin);
}

TEST_CASE("the subalgebra h") {
  const SubalgebraBasis h = h_basis();
  CHECK(h.dim() == 6);
  CHECK(h.closure_residual < 1e-10);
  for (const Mat& x : h.elements) {
    CHECK(algebra_residual(x, lie_metric()) < 1e-12);
    for (const EntryFunctional& f : h_constraints()) CHECK(std::abs(f(x)) < 1e-12);
  }
  CHECK(h_constraints().size() == 9);
}

TEST_CASE("boosts") {
  CHECK((boost(0.0) - Mat::Identity(6, 6)).norm() == 0.0);
  for (double t : {-1.5, 0.3, 1.0, 2.0}) {
    const Mat b = boost(t);
    Mat expect = Mat::Identity(6, 6);
    expect(0, 0) = std::exp(t);
    expect(5, 5) = std::exp(-t);
    CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-12 * std::exp(std::abs(t)));
    CHECK(group_residual(b, lie_metric()) < 1e-12);
    CHECK((b * boost(-t) - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    // The cosh / sinh block in the (e0, e5) plane, conjugated into the lambda basis.
    Mat be = Mat::Identity(6, 6);
    be(0, 0) = be(5, 5) = std::cosh(t);
    be(0, 5) = be(5, 0) = std::sinh(t);
    CHECK((change_basis(be, Space::R42, BasisTag::epsilon, BasisTag::lambda) - b).cwiseAbs().maxCoeff() <
          1e-12 * std::exp(std::abs(t)));
  }
}

TEST_CASE("the example Lie frame") {
  const auto [Ou, Ov] = example_slice();
  CHECK(algebra_residual(Ou, lie_metric()) < 1e-15);
  CHECK(algebra_residual(Ov, lie_metric()) < 1e-15);
  CHECK(max_abs(bracket(Ou, Ov)) < 1e-15);
  for (const EntryFunctional& f : h_constraints()) {
    CHECK(std::abs(f(Ou)) < 1e-15);
    CHECK(std::abs(f(Ov)) < 1e-15);
  }

  const ParamDomain d = default_orbit_domain(16, 16);
  const FrameField T = example_frame_field(d);
  CHECK(T.max_group_residual() < 1e-12);
  const MCForm w = pullback_mc(T, {DiffMode::sampler, 1e-5});
  for (std::size_t k = 0; k < w.wu.size(); ++k) {
    CHECK(max_abs(w.wu.data()[k] - Ou) < 1e-8);
    CHECK(max_abs(w.wv.data()[k] - Ov) < 1e-8);
  }
  // The first two columns span the example line.
  const LineSampler f = example_sampler();
  const Mat L = basis_matrix(Space::R42, BasisTag::lambda);
  for (double u : {0.2, 2.0}) {
    for (double v : {1.0, 5.5}) {
      const Mat E = L * example_frame(u, v);
      const auto [S0, S1] = f(u, v);
      Mat span(6, 2);
      span << E.col(0), E.col(1);
      const Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinU);
      const Mat P = svd.matrixU() * svd.matrixU().transpose();
      CHECK((P * S0 - S0).norm() < 1e-12 * S0.norm());
      CHECK((P * S1 - S1).norm() < 1e-12 * S1.norm());
    }
  }
}

TEST_CASE("best Lie frame checks") {
  const ParamDomain d = default_orbit_domain(32, 32);
  const LieCoefficients c = best_lie_frame_check(example_frame_field(d));
  CHECK(c.order1 < 1e-8);
  CHECK(c.order2 < 1e-8);
  CHECK(c.order3 < 1e-8);
  CHECK(c.exterior1 < 1e-6);
  CHECK(c.exterior2 < 1e-6);
  CHECK(c.min_coframe_det > 0.1);

  // Left translation changes nothing.
  const Mat A = random_lie_frame(8) * boost(1.0);
  const LieCoefficients ca = best_lie_frame_check(example_frame_field(d, A));
  CHECK(std::abs(ca.order1 - c.order1) < 1e-8);
  CHECK(std::abs(ca.exterior1 - c.exterior1) < 1e-6);
  const MCForm w = pullback_mc(example_frame_field(d), {DiffMode::sampler, 1e-5});
  const MCForm wa = pullback_mc(example_frame_field(d, A), {DiffMode::sampler, 1e-5});
  double diff = 0.0;
  for (std::size_t k = 0; k < w.wu.size(); ++k)
    diff = std::max({diff, max_abs(w.wu.data()[k] - wa.wu.data()[k]), max_abs(w.wv.data()[k] - wa.wv.data()[k])});
  CHECK(diff < 1e-9);

  // A field whose first two columns are not curvature spheres.
  const Mat G = random_lie_frame(21, 1.0);
  FrameField twisted = example_frame_field(d);
  twisted.sampler = [G](double u, double v, const Mat&) { return Mat(example_frame(u, v) * G); };
  for (int i = 0; i < d.nu; ++i)
    for (int j = 0; j < d.nv; ++j) twisted.frames(i, j) = example_frame(d.u(i), d.v(j)) * G;
  CHECK_THROWS_AS(best_lie_frame_check(twisted), OrderError);

  // A constant frame has no coframe at all.
  FrameField constant = example_frame_field(d);
  constant.sampler = [G](double, double, const Mat&) { return G; };
  for (Mat& f : constant.frames.data()) f = G;
  CHECK_THROWS_AS(best_lie_frame_check(constant), OrderError);
}

TEST_CASE("coset orbits") {
  const ParamDomain d = default_orbit_domain(24, 24);
  const LegendreMap ho = coset_orbit(Mat::Identity(6, 6), d);
  CHECK(contact_residual(ho) < 1e-8);
  CHECK(spherical_projection_rank(ho).first < 1e-10);
  // sigma(Ho) is a great circle: the S^3 points span a plane through the origin.
  Mat pts(4, static_cast<int>(d.size()));
  int k = 0;
  for (int i = 0; i < d.nu; ++i)
    for (int j = 0; j < d.nv; ++j) pts.col(k++) = moebius_to_sphere(spherical_projection(ho.S0(i, j), ho.S1(i, j))).coords;
  const Eigen::JacobiSVD<Mat> svd(pts);
  CHECK(svd.singularValues()(1) > 1.0);
  CHECK(svd.singularValues()(2) < 1e-10);

  for (const Mat& A : {boost(1.0), random_lie_frame(4)}) {
    const LegendreMap l = coset_orbit(A, d);
    CHECK(contact_residual(l) < 1e-8);
    CHECK(line_residual(l) < 1e-10);
    CHECK(min_immersion_rank(l) > 1e-3);
  }
}

TEST_CASE("the Figure 7 pipeline") {
  const Fig7Result r0 = fig7_pipeline(0.0, 32, 32);
  CHECK(r0.degenerate);
  CHECK(r0.singular_points.size() == 32u * 32u);

  const Fig7Result r1 = fig7_pipeline(1.0, 32, 32);
  CHECK_FALSE(r1.degenerate);
  CHECK_FALSE(r1.singular_points.empty());
  CHECK(r1.singular_points.size() < 32u * 32u / 4);
  // Flagged points are left out of the mesh.
  const Mesh m = grid_mesh(r1.points, r1.domain, &r1.singular);
  CHECK(m.vertices.size() == 32u * 32u - r1.singular_points.size());
  for (const auto& [i, j] : r1.singular_points) CHECK(r1.singular(i, j));
}

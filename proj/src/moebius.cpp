#include "dupin/moebius.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace dupin {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

Mat delta_from_eps() { return basis_matrix(Space::R41, BasisTag::delta).inverse(); }
Mat eps_from_delta() { return basis_matrix(Space::R41, BasisTag::delta); }

Vec eps4(const Vec& x4, double e4) {
  Vec q(5);
  q.head(4) = x4;
  q(4) = e4;
  return q;
}

// Space-form frame (x, e1, e2, e3) with the principal curvature of e1, e2.
struct SpaceFrame {
  Vec x, e1, e2, e3;
  double k1 = 0.0, k2 = 0.0;
};

SpaceFrame space_frame(const ParametricSurface& s, double u, double v, bool swapped, bool flipped) {
  const FundamentalForms ff = fundamental_forms(s, u, v);
  const CurvatureData cd = curvature(ff);
  SpaceFrame f;
  f.x = ff.x;
  const Form form = s.form;
  auto unit = [&](const Vec& w) { return Vec(w / std::sqrt(ambient_inner(form, w, w))); };
  if (cd.umbilic) {
    f.e1 = unit(ff.xu);
    f.e2 = unit(ff.xv - ambient_inner(form, ff.xv, f.e1) * f.e1);
  } else {
    f.e1 = unit(ff.xu * cd.dir_a(0) + ff.xv * cd.dir_a(1));
    f.e2 = unit(ff.xu * cd.dir_c(0) + ff.xv * cd.dir_c(1));
  }
  f.e3 = ff.normal;
  f.k1 = cd.a;
  f.k2 = cd.umbilic ? cd.a : cd.c;
  if (swapped) {
    std::swap(f.e1, f.e2);
    f.e3 = -f.e3;
    const double k1 = f.k1;
    f.k1 = -f.k2;
    f.k2 = -k1;
  }
  if (flipped) {
    f.e1 = -f.e1;
    f.e3 = -f.e3;
    f.k1 = -f.k1;
    f.k2 = -f.k2;
  }
  return f;
}

// Sign of theta^1 ^ theta^2 in the (u, v) orientation.
double coframe_sign(const ParametricSurface& s, double u, double v, bool swapped) {
  const FundamentalForms ff = fundamental_forms(s, u, v);
  const SpaceFrame f = space_frame(s, u, v, swapped, false);
  const Form form = s.form;
  const double det = ambient_inner(form, ff.xu, f.e1) * ambient_inner(form, ff.xv, f.e2) -
                     ambient_inner(form, ff.xv, f.e1) * ambient_inner(form, ff.xu, f.e2);
  return det >= 0 ? 1.0 : -1.0;
}

void frame_constants(Form form, double* beta, double* gamma) {
  switch (form) {
    case Form::sphere: *beta = 1.0 / kSqrt2; *gamma = -1.0 / kSqrt2; return;
    case Form::euclidean: *beta = kSqrt2; *gamma = 0.0; return;
    case Form::hyperbolic: *beta = 1.0 / kSqrt2; *gamma = 1.0 / kSqrt2; return;
  }
}

// F applied to the space-form frame, as a delta-basis Moebius matrix.
Mat basic_matrix(Form form, const SpaceFrame& f) {
  Mat y(5, 5);
  if (form == Form::euclidean) {
    y.setZero();
    y(0, 0) = 1.0;
    y.block(1, 0, 3, 1) = kSqrt2 * f.x;
    y(4, 0) = f.x.squaredNorm();
    const Vec* es[3] = {&f.e1, &f.e2, &f.e3};
    for (int i = 0; i < 3; ++i) {
      y.block(1, i + 1, 3, 1) = *es[i];
      y(4, i + 1) = kSqrt2 * f.x.dot(*es[i]);
    }
    y(4, 4) = 1.0;
    return y;
  }
  Mat eps(5, 5);
  if (form == Form::sphere) {
    eps.col(0) = eps4(f.x, 1.0) / kSqrt2;
    eps.col(1) = eps4(f.e1, 0.0);
    eps.col(2) = eps4(f.e2, 0.0);
    eps.col(3) = eps4(f.e3, 0.0);
    eps.col(4) = eps4(-f.x, 1.0) / kSqrt2;
  } else {
    auto lift = [](const Vec& w, double e0) {
      Vec q(5);
      q(0) = e0;
      q.tail(4) = w;
      return q;
    };
    eps.col(0) = lift(f.x, 1.0) / kSqrt2;
    eps.col(1) = lift(f.e1, 0.0);
    eps.col(2) = lift(f.e2, 0.0);
    eps.col(3) = lift(f.e3, 0.0);
    eps.col(4) = lift(f.x, -1.0) / kSqrt2;
  }
  return delta_from_eps() * eps;
}

Mat nilpotent_N(const Vec& y) {
  Mat n = Mat::Identity(5, 5);
  n.block(0, 1, 1, 3) = y.transpose();
  n(0, 4) = 0.5 * y.squaredNorm();
  n.block(1, 4, 3, 1) = y;
  return n;
}

Mat dilation_D(double k) {
  Mat d = Mat::Identity(5, 5);
  d(0, 0) = k;
  d(4, 4) = 1.0 / k;
  return d;
}

Mat normalization(double beta, double k1, double k2) {
  const double mu = (k1 + k2) / (2.0 * beta);
  const double k = (k1 - k2) / (2.0 * beta);
  if (std::abs(k) < 1e-12) throw UmbilicError("best Moebius frame needs distinct principal curvatures", {});
  return nilpotent_N(Vec::Unit(3, 2) * mu) * dilation_D(k);
}

MoebiusFrameBuild build_frame(const ParametricSurface& s, bool swapped, bool best) {
  if (s.form == Form::euclidean && s.ambient_dim() != 3) throw std::invalid_argument("bad surface");
  const ParamDomain& d = s.domain;
  d.validate();
  double beta = 0.0, gamma = 0.0;
  frame_constants(s.form, &beta, &gamma);
  const bool flipped = coframe_sign(s, d.u0, d.v0, swapped) < 0;
  const SpaceFrame f0 = space_frame(s, d.u0, d.v0, swapped, flipped);
  const Form form = s.form;
  auto sample = [s, form, beta, swapped, flipped, best](double u, double v, const Mat&) {
    const SpaceFrame f = space_frame(s, u, v, swapped, flipped);
    Mat y = basic_matrix(form, f);
    if (best) y = y * normalization(beta, f.k1, f.k2);
    return y;
  };
  MoebiusFrameBuild b{FrameField{d, MatrixGroup::orthogonal(moebius_metric()), Grid<Mat>(d.nu, d.nv), sample},
                      beta, gamma, f0.k1, f0.k2, swapped, flipped};
  for (int i = 0; i < d.nu; ++i)
    for (int j = 0; j < d.nv; ++j) b.field.frames(i, j) = sample(d.u(i), d.v(j), Mat());
  return b;
}

}  // namespace

Vec sphere_to_vec(const OrientedSphere& s) {
  if (s.m.size() != 4) throw DimensionError("sphere center must be a vector of R^4");
  if (!(s.r > 0.0 && s.r < kPi)) throw std::invalid_argument("sphere radius must lie in (0, pi)");
  if (std::abs(s.m.norm() - 1.0) > 1e-10) throw std::invalid_argument("sphere center must be a unit vector");
  return eps4(s.m, std::cos(s.r)) / std::sin(s.r);
}

OrientedSphere vec_to_sphere(const Vec& S) {
  if (S.size() != 5) throw DimensionError("sphere vector must lie in R^{4,1}");
  const double n = S.head(4).squaredNorm() - S(4) * S(4);
  // Relative to |S|^2: small radii give large components and cancellation.
  if (std::abs(n - 1.0) > 1e-10 * std::max(1.0, S.squaredNorm())) throw std::invalid_argument("vector is not on S^{3,1}");
  const double r = std::atan2(1.0, S(4));  // cot r = s^4, r in (0, pi)
  return {S.head(4) * std::sin(r), r};
}

Vec tangent_sphere_cot(const Vec& x, const Vec& e3, double cot_r) {
  if (x.size() != 4 || e3.size() != 4) throw DimensionError("tangent_sphere: x and e3 must lie in R^4");
  return cot_r * eps4(x, 1.0) + eps4(e3, 0.0);
}

Vec tangent_sphere(const Vec& x, const Vec& e3, double r) {
  if (!(r > 0.0 && r < kPi)) throw std::invalid_argument("tangent_sphere: r must lie in (0, pi)");
  return tangent_sphere_cot(x, e3, std::cos(r) / std::sin(r));
}

namespace {

template <class F>
Grid<Vec> sample_sphere_surface(const ParametricSurface& s, F f) {
  if (s.form != Form::sphere) throw std::invalid_argument("sphere maps need a surface in S^3");
  const ParamDomain& d = s.domain;
  Grid<Vec> g(d.nu, d.nv);
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      const FundamentalForms ff = fundamental_forms(s, d.u(i), d.v(j));
      g(i, j) = f(ff);
    }
  }
  return g;
}

}  // namespace

Grid<Vec> point_field(const ParametricSurface& s) {
  return sample_sphere_surface(s, [](const FundamentalForms& ff) { return eps4(ff.x, 1.0); });
}

Grid<Vec> tangent_sphere_field(const ParametricSurface& s, double r) {
  return sample_sphere_surface(s, [r](const FundamentalForms& ff) { return tangent_sphere(ff.x, ff.normal, r); });
}

Grid<Vec> curvature_sphere_field(const ParametricSurface& s, int which) {
  return sample_sphere_surface(s, [which](const FundamentalForms& ff) {
    const CurvatureData cd = curvature(ff);
    return tangent_sphere_cot(ff.x, ff.normal, which == 0 ? cd.a : cd.c);
  });
}

PencilRoots curvature_sphere_params(const Mat& wu, const Mat& wv, double double_root_tol) {
  auto wedge = [](double au, double av, double bu, double bv) { return au * bv - av * bu; };
  // (A + rB) ^ (C + rD) with A = w^1_3, B = w^1_0, C = w^2_3, D = w^2_0.
  const double Au = wu(1, 3), Av = wv(1, 3), Bu = wu(1, 0), Bv = wv(1, 0);
  const double Cu = wu(2, 3), Cv = wv(2, 3), Du = wu(2, 0), Dv = wv(2, 0);
  const double c0 = wedge(Au, Av, Cu, Cv);
  const double c1 = wedge(Au, Av, Du, Dv) + wedge(Bu, Bv, Cu, Cv);
  const double c2 = wedge(Bu, Bv, Du, Dv);
  PencilRoots out;
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
  if (scale < 1e-14) {
    out.degenerate = true;
    return out;
  }
  if (std::abs(c2) < 1e-14 * scale) {
    // w^1_0 ^ w^2_0 = 0: the frame is not an immersion frame here.
    if (std::abs(c1) > 1e-14 * scale) out.roots.push_back(-c0 / c1);
    else out.degenerate = true;
    return out;
  }
  const double b = c1 / c2, c = c0 / c2;
  const double disc = b * b - 4.0 * c;
  const double dscale = std::max(1.0, b * b);
  if (std::abs(disc) <= double_root_tol * dscale) {
    out.double_root = true;
    out.roots = {-0.5 * b, -0.5 * b};
    return out;
  }
  if (disc < 0) {
    out.complex_roots = true;
    return out;
  }
  const double sq = std::sqrt(disc);
  // Numerically stable pair.
  const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
  double r1 = q, r2 = c / q;
  if (q == 0.0) r1 = r2 = 0.0;
  if (r1 > r2) std::swap(r1, r2);
  out.roots = {r1, r2};
  return out;
}

SphereMapDupinResult sphere_map_dupin_test(const Grid<Vec>& S, const Grid<Vec>& X, const ParamDomain& d,
                                           double rank_tol) {
  if (S.nu() != X.nu() || S.nv() != X.nv()) throw DimensionError("sphere_map_dupin_test: grid mismatch");
  const int nu = S.nu(), nv = S.nv();
  auto diff = [&](int axis, int i, int j) -> Vec {
    const int n = axis == 0 ? nu : nv;
    const bool periodic = axis == 0 ? d.periodic_u : d.periodic_v;
    const double h = axis == 0 ? d.du() : d.dv();
    const int k = axis == 0 ? i : j;
    auto at = [&](int idx) -> const Vec& { return axis == 0 ? S(idx, j) : S(i, idx); };
    if (periodic) return (at((k + 1) % n) - at((k - 1 + n) % n)) / (2.0 * h);
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
  };
  SphereMapDupinResult r;
  r.min_second_singular = std::numeric_limits<double>::infinity();
  bool all_small = true;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Vec x = X(i, j).normalized();
      Eigen::Matrix<double, 5, 2> m;
      m.col(0) = diff(0, i, j);
      m.col(1) = diff(1, i, j);
      // Quotient by span{x}: remove the component along x.
      m -= x * (x.transpose() * m);
      Eigen::JacobiSVD<Eigen::Matrix<double, 5, 2>> svd(m);
      const double s1 = svd.singularValues()(0), s2 = svd.singularValues()(1);
      r.max_first_singular = std::max(r.max_first_singular, s1);
      r.max_second_singular = std::max(r.max_second_singular, s2);
      r.min_second_singular = std::min(r.min_second_singular, s2);
      if (s2 >= rank_tol * std::max(1.0, s1)) all_small = false;
    }
  }
  r.dupin = all_small;
  r.degenerate = r.max_first_singular < rank_tol;
  return r;
}

MoebiusFrameBuild basic_moebius_frame(const ParametricSurface& s, bool swapped) {
  return build_frame(s, swapped, false);
}

MoebiusFrameBuild best_moebius_frame(const ParametricSurface& s, bool swapped) {
  return build_frame(s, swapped, true);
}

MoebiusCoefficients frame_order_check(const FrameField& Y, double order_tol, const PullbackOptions& opt) {
  PullbackOptions o = opt;
  if (o.mode == DiffMode::sampler && !Y.sampler) o.mode = DiffMode::grid;
  const MCForm w = pullback_mc(Y, o);
  const ParamDomain& d = Y.domain;
  const int nu = d.nu, nv = d.nv;
  MoebiusCoefficients mc;
  mc.q1 = mc.q2 = mc.p1 = mc.p2 = mc.p3 = Grid<double>(nu, nv, 0.0);
  Grid<Eigen::Matrix2d> phi_inv(nu, nv);
  double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin, csum = 0.0;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Mat& a = w.wu(i, j);
      const Mat& b = w.wv(i, j);
      mc.first_order = std::max({mc.first_order, std::abs(a(3, 0)), std::abs(b(3, 0))});
    }
  }
  if (mc.first_order > order_tol) {
    throw OrderError("frame is not first order: |w^3_0| = " + std::to_string(mc.first_order));
  }
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Mat& a = w.wu(i, j);
      const Mat& b = w.wv(i, j);
      Eigen::Matrix2d phi;
      phi << a(1, 0), b(1, 0), a(2, 0), b(2, 0);
      if (phi.determinant() <= 0) mc.positive = false;
      const Eigen::Matrix2d pinv = phi.inverse();
      phi_inv(i, j) = pinv;
      mc.second_order = std::max({mc.second_order, std::abs(a(3, 1) - a(1, 0)), std::abs(b(3, 1) - b(1, 0)),
                                  std::abs(a(3, 2) + a(2, 0)), std::abs(b(3, 2) + b(2, 0))});
      mc.third_order = std::max({mc.third_order, std::abs(a(0, 3)), std::abs(b(0, 3))});
      auto fit = [&](int r, int c) { return Eigen::RowVector2d(Eigen::RowVector2d(a(r, c), b(r, c)) * pinv); };
      const Eigen::RowVector2d q = fit(2, 1);
      const Eigen::RowVector2d p = fit(0, 1);
      const Eigen::RowVector2d p23 = fit(0, 2);
      const Eigen::RowVector2d w00 = fit(0, 0);
      mc.q1(i, j) = q(0);
      mc.q2(i, j) = q(1);
      mc.p1(i, j) = p(0);
      mc.p2(i, j) = p(1);
      mc.p3(i, j) = p23(1);
      // w^0_2 = -p2 w^1_0 + p3 w^2_0 and w^0_0 = -2 (q2 w^1_0 - q1 w^2_0).
      mc.fit_residual = std::max({mc.fit_residual, std::abs(p23(0) + p(1)), std::abs(w00(0) + 2.0 * q(1)),
                                  std::abs(w00(1) - 2.0 * q(0))});
      mc.max_q = std::max({mc.max_q, std::abs(q(0)), std::abs(q(1))});
      mc.max_p2 = std::max(mc.max_p2, std::abs(p(1)));
      mc.max_p1p3 = std::max(mc.max_p1p3, std::abs(p(0) + p23(1) + 1.0));
      const double c = 0.5 * (p(0) - p23(1));
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
      csum += c;
    }
  }
  mc.C = csum / static_cast<double>(nu * nv);
  mc.C_spread = cmax - cmin;

  using cplx = std::complex<double>;
  const cplx I(0.0, 1.0);
  Grid<double> p1p3(nu, nv), p1mp3(nu, nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      p1p3(i, j) = mc.p1(i, j) + mc.p3(i, j);
      p1mp3(i, j) = mc.p1(i, j) - mc.p3(i, j);
    }
  // Frame derivatives (f_1, f_2) with df = f_1 w^1_0 + f_2 w^2_0.
  auto fd = [&](const Grid<double>& f, int i, int j) {
    return Eigen::RowVector2d(Eigen::RowVector2d(grid_diff4(f, d, 0, i, j), grid_diff4(f, d, 1, i, j)) * phi_inv(i, j));
  };
  const int i0 = d.periodic_u ? 0 : 2, i1 = d.periodic_u ? nu : nu - 2;
  const int j0 = d.periodic_v ? 0 : 2, j1 = d.periodic_v ? nv : nv - 2;
  for (int i = i0; i < i1; ++i) {
    for (int j = j0; j < j1; ++j) {
      const double q1 = mc.q1(i, j), q2 = mc.q2(i, j), p2 = mc.p2(i, j);
      // d(q2 + i q1) ^ phi = -1/2 P phi ^ conj(phi), phi ^ conj(phi) = -2i w^1_0 ^ w^2_0.
      const Eigen::RowVector2d dq1 = fd(mc.q1, i, j), dq2 = fd(mc.q2, i, j);
      const cplx f1 = dq2(0) + I * dq1(0), f2 = dq2(1) + I * dq1(1);
      const cplx P = p1p3(i, j) + 1.0 + q1 * q1 + q2 * q2 + I * p2;
      mc.integrability1 = std::max(mc.integrability1, std::abs(I * f1 - f2 - I * P));
      // d(p1 + p3 - 2i p2) ^ phi + d(p1 - p3) ^ conj(phi) = (...) phi ^ phi = 0.
      const Eigen::RowVector2d ds = fd(p1p3, i, j), dp2 = fd(mc.p2, i, j), dd = fd(p1mp3, i, j);
      const cplx g1 = ds(0) - 2.0 * I * dp2(0), g2 = ds(1) - 2.0 * I * dp2(1);
      const cplx lhs = (I * g1 - g2) + (-I * dd(0) - dd(1));
      mc.integrability2 = std::max(mc.integrability2, std::abs(lhs));
    }
  }
  mc.dupin = mc.max_q < order_tol && mc.max_p2 < order_tol;
  return mc;
}

std::vector<EntryFunctional> hC_constraints(double C) {
  return {
      omega(0, 0),
      omega(0, 1) - (-0.5 + C) * omega(1, 0),
      omega(0, 2) - (-0.5 - C) * omega(2, 0),
      omega(0, 3),
      omega(2, 1),
      omega(3, 1) - omega(1, 0),
      omega(3, 2) + omega(2, 0),
      omega(3, 0),
  };
}

SubalgebraBasis hC_basis(double C) {
  SubalgebraBasis b = subalgebra_from_constraints(hC_constraints(C), moebius_metric());
  if (b.dim() != 2) return b;
  // Change to the basis dual to (w^1_0, w^2_0).
  Eigen::Matrix2d m;
  m << b.elements[0](1, 0), b.elements[1](1, 0), b.elements[0](2, 0), b.elements[1](2, 0);
  const Eigen::Matrix2d minv = m.inverse();
  const Mat x = minv(0, 0) * b.elements[0] + minv(1, 0) * b.elements[1];
  const Mat y = minv(0, 1) * b.elements[0] + minv(1, 1) * b.elements[1];
  b.elements = {x, y};
  b.closure_residual = closure_residual(b.elements);
  b.constraint_residual = 0.0;
  for (const auto& f : b.constraints)
    for (const auto& e : b.elements) b.constraint_residual = std::max(b.constraint_residual, std::abs(f(e)));
  return b;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::torus: return "torus";
    case Regime::cylinder: return "cylinder";
    case Regime::hyperboloid: return "hyperboloid";
  }
  return "?";
}

Regime regime_of(double C, double tol) {
  const double a = std::abs(C);
  if (std::abs(a - 1.0) <= tol) return Regime::cylinder;
  return a < 1.0 ? Regime::torus : Regime::hyperboloid;
}

CanonicalForC canonical_for_C(double C) {
  if (!std::isfinite(C)) throw std::invalid_argument("C must be finite");
  const Regime r = regime_of(C);
  const bool swapped = C < 0;
  const double a = std::abs(C);
  switch (r) {
    case Regime::torus: {
      const double alpha = 0.5 * std::acos(a);
      return {r, torus(alpha), swapped, alpha};
    }
    case Regime::cylinder:
      return {r, cylinder(1.0), swapped, 1.0};
    case Regime::hyperboloid: {
      const double p = std::sqrt((a - 1.0) / (a + 1.0));
      return {r, hyperboloid(p), swapped, p};
    }
  }
  throw std::logic_error("unreachable");
}

Mat HCOrbit::frame(double s, double t) const { return placement * mat_exp(s * X + t * Y); }

ParametricSurface HCOrbit::surface() const {
  const HCOrbit self = *this;
  const Mat to_eps = eps_from_delta();
  auto f = [self, to_eps](double s, double t) {
    const Vec q = to_eps * self.frame(s, t).col(0);
    return moebius_to_form(q, self.form).coords;
  };
  return from_positions("hC_orbit", form, domain, f);
}

HCOrbit hC_orbit(double C, int ns, int nt) {
  HCOrbit o;
  o.C = C;
  const SubalgebraBasis b = hC_basis(C);
  if (b.dim() != 2) throw std::runtime_error("h_C does not have dimension 2");
  o.X = b.elements[0];
  o.Y = b.elements[1];

  CanonicalForC can = canonical_for_C(C);
  o.regime = can.regime;
  o.form = can.surface.form;
  const MoebiusFrameBuild best = best_moebius_frame(can.surface, can.swapped);
  o.placement = best.field.frames(0, 0);

  // Lengths of the e1 and e2 curvature lines on the canonical surface.
  double L1 = 0, L2 = 0;
  bool per1 = true, per2 = true;
  switch (can.regime) {
    case Regime::torus:
      L1 = 2 * kPi * std::cos(can.parameter);
      L2 = 2 * kPi * std::sin(can.parameter);
      break;
    case Regime::cylinder:
      L1 = 4.0;  // a stretch of the ruling
      per1 = false;
      L2 = 2 * kPi;
      break;
    case Regime::hyperboloid: {
      const double bb = std::sqrt(1 - can.parameter * can.parameter);
      L1 = 2.0 / bb;  // v in [-1, 1]
      per1 = false;
      L2 = 2 * kPi * can.parameter / bb;
      break;
    }
  }
  if (can.swapped) {
    std::swap(L1, L2);
    std::swap(per1, per2);
  }
  // s and t integrate w^1_0 = k beta theta^1 and w^2_0 = k beta theta^2.
  const double kb = std::abs(best.kappa1 - best.kappa2) / 2.0;
  o.domain.u0 = 0.0;
  o.domain.u1 = kb * L1;
  o.domain.periodic_u = per1;
  o.domain.v0 = 0.0;
  o.domain.v1 = kb * L2;
  o.domain.periodic_v = per2;
  o.domain.nu = ns;
  o.domain.nv = nt;
  o.domain.validate();

  const Mat to_eps = eps_from_delta();
  o.raw = o.placed = o.space_form = Grid<Vec>(ns, nt);
  o.chart_ok = Grid<char>(ns, nt, 0);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const Mat e = mat_exp(o.domain.u(i) * o.X + o.domain.v(j) * o.Y);
      o.raw(i, j) = to_eps * e.col(0);
      o.placed(i, j) = to_eps * (o.placement * e).col(0);
      try {
        o.space_form(i, j) = moebius_to_form(o.placed(i, j), o.form).coords;
        o.chart_ok(i, j) = 1;
      } catch (const ChartError&) {
        o.excluded.push_back({i, j});
      }
    }
  }
  return o;
}

Mat pm_C_permutation() {
  Mat p = Mat::Zero(5, 5);
  p(0, 0) = 1;
  p(2, 1) = 1;
  p(1, 2) = 1;
  p(3, 3) = -1;
  p(4, 4) = 1;
  return p;
}

double pm_C_congruence_residual(double C, int n) {
  const SubalgebraBasis plus = hC_basis(C);
  const SubalgebraBasis minus = hC_basis(-C);
  const Mat p = pm_C_permutation();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = -1.0 + 2.0 * i / (n - 1), t = -1.0 + 2.0 * j / (n - 1);
      const Vec a = mat_exp(s * minus.elements[0] + t * minus.elements[1]).col(0);
      const Vec b = p * mat_exp(t * plus.elements[0] + s * plus.elements[1]).col(0);
      worst = std::max(worst, projective_distance(a, b));
    }
  }
  return worst;
}

std::pair<double, double> axis_distance_test(const std::vector<Vec>& pts, double radius) {
  if (pts.size() < 4) throw std::invalid_argument("axis_distance_test: too few points");
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += Eigen::Vector3d(p);
  c /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d d = Eigen::Vector3d(p) - c;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d l = es.eigenvalues();
  // The axis belongs to the eigenvalue that is not repeated.
  const int k = (l(1) - l(0)) > (l(2) - l(1)) ? 0 : 2;
  const Eigen::Vector3d axis = es.eigenvectors().col(k);
  double worst = 0.0, mean = 0.0;
  for (const auto& p : pts) {
    const Eigen::Vector3d d = Eigen::Vector3d(p) - c;
    const double dist = (d - d.dot(axis) * axis).norm();
    worst = std::max(worst, std::abs(dist - radius));
    mean += dist;
  }
  return {worst, mean / static_cast<double>(pts.size())};
}

}  // namespace dupin

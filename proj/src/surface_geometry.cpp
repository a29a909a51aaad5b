#include "dupin/surface_geometry.hpp"

#include <cmath>
#include <numbers>

namespace dupin {

namespace {

constexpr double kPi = std::numbers::pi;

// Wraps a generic (templated) position functor as both an exact hyper-dual
// map and a plain position map.
template <class F>
ParametricSurface make_surface(std::string name, Form form, ParamDomain domain, F f) {
  ParametricSurface s;
  s.name = std::move(name);
  s.form = form;
  s.domain = domain;
  s.exact = [f](const HyperDual& u, const HyperDual& v) {
    const auto a = f(u, v);
    return HDVec(a.begin(), a.end());
  };
  s.position_fn = [f](double u, double v) {
    const auto a = f(u, v);
    Vec x(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) x(static_cast<Eigen::Index>(i)) = a[i];
    return x;
  };
  return s;
}

ParamDomain periodic_domain(double v0, double v1, bool periodic_v, int n = 64) {
  ParamDomain d;
  d.u0 = 0.0;
  d.u1 = 2.0 * kPi;
  d.periodic_u = true;
  d.v0 = v0;
  d.v1 = v1;
  d.periodic_v = periodic_v;
  d.nu = d.nv = n;
  return d;
}

Vec hd_value(const HDVec& a) {
  Vec x(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) x(static_cast<Eigen::Index>(i)) = a[i].v;
  return x;
}

Vec hd_part(const HDVec& a, double HyperDual::*field) {
  Vec x(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) x(static_cast<Eigen::Index>(i)) = a[i].*field;
  return x;
}

Eigen::Vector2d fix_sign(Eigen::Vector2d d) {
  const Eigen::Index k = std::abs(d(0)) >= std::abs(d(1)) ? 0 : 1;
  return d(k) < 0 ? Eigen::Vector2d(-d) : d;
}

// Cofactor vector orthogonal (Euclidean dot) to the three rows.
Vec cofactor4(const Vec& r0, const Vec& r1, const Vec& r2) {
  Eigen::Matrix<double, 3, 4> m;
  m.row(0) = r0.transpose();
  m.row(1) = r1.transpose();
  m.row(2) = r2.transpose();
  Vec c(4);
  for (int k = 0; k < 4; ++k) {
    Eigen::Matrix3d minor;
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      minor.col(col++) = m.col(j);
    }
    c(k) = ((k % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  return c;
}

}  // namespace

double ambient_inner(Form f, const Vec& a, const Vec& b) {
  if (f == Form::hyperbolic) return a.head(3).dot(b.head(3)) - a(3) * b(3);
  return a.dot(b);
}

double ParametricSurface::constraint_residual() const {
  double worst = 0.0;
  for (int i = 0; i < domain.nu; ++i) {
    for (int j = 0; j < domain.nv; ++j) {
      worst = std::max(worst, SpaceFormPoint{form, position(domain.u(i), domain.v(j))}.constraint_residual());
    }
  }
  return worst;
}

ParametricSurface torus(double alpha) {
  if (!(alpha > 0.0 && alpha <= kPi / 4 + 1e-15)) {
    throw std::invalid_argument("torus: alpha must lie in (0, pi/4]");
  }
  const double r = std::cos(alpha), s = std::sin(alpha);
  auto s_ = make_surface("torus", Form::sphere, periodic_domain(0.0, 2.0 * kPi, true), [r, s](auto u, auto v) {
    using T = decltype(u);
    return std::array<T, 4>{r * cos(u), r * sin(u), s * cos(v), s * sin(v)};
  });
  s_.params["alpha"] = alpha;
  orient(s_);
  return s_;
}

ParametricSurface hyperboloid(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("hyperboloid: a must lie in (0, 1)");
  const double b = std::sqrt(1.0 - a * a);
  const double rho = a / b, sigma = 1.0 / b;
  auto s = make_surface("hyperboloid", Form::hyperbolic, periodic_domain(-1.0, 1.0, false),
                        [rho, sigma](auto u, auto v) {
                          using T = decltype(u);
                          return std::array<T, 4>{rho * cos(u), rho * sin(u), sigma * sinh(v), sigma * cosh(v)};
                        });
  s.params["a"] = a;
  orient(s);
  return s;
}

ParametricSurface cylinder(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("cylinder: radius must be positive");
  auto s = make_surface("cylinder", Form::euclidean, periodic_domain(-1.0, 1.0, false), [radius](auto u, auto v) {
    using T = decltype(u);
    return std::array<T, 3>{radius * cos(u), radius * sin(u), T(1.0) * v};
  });
  s.params["radius"] = radius;
  orient(s);
  return s;
}

ParametricSurface sphere_patch(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere_patch: radius must be positive");
  auto s = make_surface("sphere_patch", Form::euclidean, periodic_domain(-1.0, 1.0, false), [radius](auto u, auto v) {
    using T = decltype(u);
    return std::array<T, 3>{radius * cos(u) * cos(v), radius * sin(u) * cos(v), radius * sin(v)};
  });
  s.params["radius"] = radius;
  orient(s);
  return s;
}

ParametricSurface warped_stereo_torus(double alpha, double amplitude) {
  const double r = std::cos(alpha), s = std::sin(alpha);
  auto surf = make_surface("warped_stereo_torus", Form::euclidean, periodic_domain(0.0, 2.0 * kPi, true),
                           [r, s, amplitude](auto u, auto v) {
                             using T = decltype(u);
                             const std::array<T, 4> x{r * cos(u), r * sin(u), s * cos(v), s * sin(v)};
                             auto y = stereo_t(x);
                             const T k = T(1.0) + amplitude * sin(u);
                             return std::array<T, 3>{k * y[0], k * y[1], k * y[2]};
                           });
  surf.params["alpha"] = alpha;
  surf.params["amplitude"] = amplitude;
  orient(surf);
  return surf;
}

ParametricSurface from_positions(std::string name, Form form, ParamDomain domain, PositionMap f) {
  domain.validate();
  ParametricSurface s;
  s.name = std::move(name);
  s.form = form;
  s.domain = domain;
  s.position_fn = std::move(f);
  orient(s);
  return s;
}

std::string to_string(ProjectionMap m) {
  switch (m) {
    case ProjectionMap::identity: return "none";
    case ProjectionMap::stereo: return "stereo";
    case ProjectionMap::hyp_stereo: return "hyp_stereo";
  }
  return "?";
}

ProjectionMap projection_from_string(const std::string& s) {
  if (s == "none" || s == "identity") return ProjectionMap::identity;
  if (s == "stereo") return ProjectionMap::stereo;
  if (s == "hyp_stereo") return ProjectionMap::hyp_stereo;
  throw std::invalid_argument("unknown projection '" + s + "' (expected none, stereo or hyp_stereo)");
}

ParametricSurface pushforward(const ParametricSurface& s, ProjectionMap map) {
  if (map == ProjectionMap::identity) return s;
  const Form need = map == ProjectionMap::stereo ? Form::sphere : Form::hyperbolic;
  if (s.form != need) {
    throw std::invalid_argument("pushforward: " + to_string(map) + " needs a surface in " + to_string(need));
  }
  ParametricSurface out = s;
  out.name = to_string(map) + "(" + s.name + ")";
  out.form = Form::euclidean;
  out.normal_sign = 1.0;
  if (s.exact) {
    const ExactMap inner = s.exact;
    const bool st = map == ProjectionMap::stereo;
    out.exact = [inner, st](const HyperDual& u, const HyperDual& v) {
      const HDVec x = inner(u, v);
      const std::array<HyperDual, 4> a{x[0], x[1], x[2], x[3]};
      const auto y = st ? stereo_t(a) : hyp_stereo_t(a);
      return HDVec(y.begin(), y.end());
    };
  }
  const PositionMap pos = s.position_fn;
  if (map == ProjectionMap::stereo) {
    out.position_fn = [pos](double u, double v) { return stereo(pos(u, v)); };
  } else {
    out.position_fn = [pos](double u, double v) { return hyp_stereo(pos(u, v)); };
  }
  orient(out);
  return out;
}

SurfaceJet jet(const ParametricSurface& s, double u, double v) {
  SurfaceJet j;
  if (s.exact) {
    const HDVec a = s.exact(HyperDual(u, 1, 1, 0), HyperDual(v));
    const HDVec b = s.exact(HyperDual(u), HyperDual(v, 1, 1, 0));
    const HDVec c = s.exact(HyperDual(u, 1, 0, 0), HyperDual(v, 0, 1, 0));
    j.x = hd_value(a);
    j.xu = hd_part(a, &HyperDual::d1);
    j.xuu = hd_part(a, &HyperDual::d12);
    j.xv = hd_part(b, &HyperDual::d1);
    j.xvv = hd_part(b, &HyperDual::d12);
    j.xuv = hd_part(c, &HyperDual::d12);
    return j;
  }
  const auto& f = s.position_fn;
  const double h1u = 1e-5 * s.domain.u_range(), h1v = 1e-5 * s.domain.v_range();
  const double h2u = 3e-4 * s.domain.u_range(), h2v = 3e-4 * s.domain.v_range();
  j.x = f(u, v);
  j.xu = (f(u + h1u, v) - f(u - h1u, v)) / (2 * h1u);
  j.xv = (f(u, v + h1v) - f(u, v - h1v)) / (2 * h1v);
  j.xuu = (f(u + h2u, v) - 2 * j.x + f(u - h2u, v)) / (h2u * h2u);
  j.xvv = (f(u, v + h2v) - 2 * j.x + f(u, v - h2v)) / (h2v * h2v);
  j.xuv = (f(u + h2u, v + h2v) - f(u + h2u, v - h2v) - f(u - h2u, v + h2v) + f(u - h2u, v - h2v)) /
          (4 * h2u * h2v);
  return j;
}

namespace {

FundamentalForms forms_from_jet(const ParametricSurface& s, const SurfaceJet& j, double rank_tol) {
  FundamentalForms ff;
  const Form f = s.form;
  ff.x = j.x;
  ff.xu = j.xu;
  ff.xv = j.xv;
  ff.I << ambient_inner(f, j.xu, j.xu), ambient_inner(f, j.xu, j.xv), ambient_inner(f, j.xu, j.xv),
      ambient_inner(f, j.xv, j.xv);
  const double scale = 0.5 * ff.I.trace();
  if (!(ff.I.determinant() > rank_tol * scale * scale)) {
    throw SingularPointError("first fundamental form is degenerate");
  }
  Vec n;
  if (f == Form::euclidean) {
    const Eigen::Vector3d c = Eigen::Vector3d(j.xu).cross(Eigen::Vector3d(j.xv));
    n = c;
  } else {
    n = cofactor4(j.x, j.xu, j.xv);
    if (f == Form::hyperbolic) n(3) = -n(3);
  }
  const double nn = ambient_inner(f, n, n);
  if (!(nn > 0.0)) throw SingularPointError("normal vector is not spacelike");
  ff.normal = s.normal_sign * n / std::sqrt(nn);
  ff.II << ambient_inner(f, j.xuu, ff.normal), ambient_inner(f, j.xuv, ff.normal),
      ambient_inner(f, j.xuv, ff.normal), ambient_inner(f, j.xvv, ff.normal);
  return ff;
}

}  // namespace

void orient(ParametricSurface& s) {
  s.normal_sign = 1.0;
  const FundamentalForms ff = forms_from_jet(s, jet(s, s.domain.u0, s.domain.v0), 1e-12);
  const Eigen::Matrix2d shape = ff.I.inverse() * ff.II;
  const double h = 0.5 * shape.trace();
  const double scale = 1.0 + shape.cwiseAbs().maxCoeff();
  if (h < -1e-9 * scale) s.normal_sign = -1.0;
}

FundamentalForms fundamental_forms(const ParametricSurface& s, double u, double v, double rank_tol) {
  return forms_from_jet(s, jet(s, u, v), rank_tol);
}

CurvatureData curvature(const FundamentalForms& ff, double umbilic_tol) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(ff.II, ff.I);
  CurvatureData cd;
  cd.a = es.eigenvalues()(0);
  cd.c = es.eigenvalues()(1);
  cd.dir_a = fix_sign(es.eigenvectors().col(0));
  cd.dir_c = fix_sign(es.eigenvectors().col(1));
  cd.umbilic = std::abs(cd.c - cd.a) <= umbilic_tol * std::max({1.0, std::abs(cd.a), std::abs(cd.c)});
  return cd;
}

CurvatureData curvature(const ParametricSurface& s, double u, double v, double umbilic_tol) {
  return curvature(fundamental_forms(s, u, v), umbilic_tol);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    case Verdict::undefined: return "undefined";
  }
  return "?";
}

double curvature_line_derivative(const ParametricSurface& s, double u, double v, int which, double h) {
  const Eigen::Vector2d p0(u, v);
  const CurvatureData c0 = curvature(s, u, v, 0.0);
  const Eigen::Vector2d d0 = which == 0 ? c0.dir_a : c0.dir_c;
  auto field = [&](const Eigen::Vector2d& p) {
    const CurvatureData cd = curvature(s, p(0), p(1), 0.0);
    Eigen::Vector2d d = which == 0 ? cd.dir_a : cd.dir_c;
    if (d.dot(d0) < 0) d = -d;
    return d;
  };
  auto kappa = [&](const Eigen::Vector2d& p) {
    const CurvatureData cd = curvature(s, p(0), p(1), 0.0);
    return which == 0 ? cd.a : cd.c;
  };
  auto rk4 = [&](double step) {
    const Eigen::Vector2d k1 = d0;
    const Eigen::Vector2d k2 = field(p0 + 0.5 * step * k1);
    const Eigen::Vector2d k3 = field(p0 + 0.5 * step * k2);
    const Eigen::Vector2d k4 = field(p0 + step * k3);
    return Eigen::Vector2d(p0 + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
  };
  return (kappa(rk4(h)) - kappa(rk4(-h))) / (2.0 * h);
}

ClassifyResult classify(const ParametricSurface& s, const ClassifyOptions& opt) {
  const ParamDomain& d = s.domain;
  d.validate();
  ClassifyResult r;
  r.analytic = s.analytic();
  r.iso_tol = opt.iso_tol >= 0 ? opt.iso_tol : (r.analytic ? 1e-6 : 1e-3);
  r.dupin_tol = opt.dupin_tol >= 0 ? opt.dupin_tol : (r.analytic ? 1e-6 : 1e-3);

  Grid<double> det(d.nu, d.nv, 0.0);
  Grid<char> ok(d.nu, d.nv, 0);
  Grid<CurvatureData> cd(d.nu, d.nv);
  double mean_det = 0.0;
  int count = 0;
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      try {
        const FundamentalForms ff = fundamental_forms(s, d.u(i), d.v(j), opt.rank_tol);
        det(i, j) = ff.I.determinant();
        cd(i, j) = curvature(ff, opt.umbilic_tol);
        ok(i, j) = 1;
        mean_det += det(i, j);
        ++count;
      } catch (const SingularPointError&) {
        r.singular_points.push_back({i, j});
      } catch (const std::domain_error&) {
        r.singular_points.push_back({i, j});
      }
    }
  }
  if (count == 0) throw SingularPointError("classify: surface is singular at every grid point");
  mean_det /= count;
  bool first = true;
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      if (!ok(i, j)) continue;
      if (det(i, j) < opt.rank_tol * mean_det) {
        ok(i, j) = 0;
        r.singular_points.push_back({i, j});
        continue;
      }
      const CurvatureData& c = cd(i, j);
      if (first) {
        r.a_min = r.a_max = c.a;
        r.c_min = r.c_max = c.c;
        first = false;
      }
      r.a_min = std::min(r.a_min, c.a);
      r.a_max = std::max(r.a_max, c.a);
      r.c_min = std::min(r.c_min, c.c);
      r.c_max = std::max(r.c_max, c.c);
      if (c.umbilic) r.umbilic_points.push_back({i, j});
    }
  }
  r.isoparametric = (r.a_max - r.a_min) < r.iso_tol && (r.c_max - r.c_min) < r.iso_tol;

  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      if (!ok(i, j) || cd(i, j).umbilic) continue;
      for (int which = 0; which < 2; ++which) {
        try {
          const double der = std::abs(curvature_line_derivative(s, d.u(i), d.v(j), which, opt.arc_step));
          r.max_dupin_derivative = std::max(r.max_dupin_derivative, der);
        } catch (const std::domain_error&) {
          // The curvature line left the regular part of the surface.
        }
      }
    }
  }
  if (!r.singular_points.empty()) {
    r.warnings.push_back(std::to_string(r.singular_points.size()) + " singular grid points excluded");
  }
  if (!r.umbilic_points.empty()) {
    r.warnings.push_back(std::to_string(r.umbilic_points.size()) +
                         " umbilic grid points: principal curvatures are not distinct, Dupin is undefined");
    r.dupin = Verdict::undefined;
  } else {
    r.dupin = r.max_dupin_derivative < r.dupin_tol ? Verdict::yes : Verdict::no;
  }
  return r;
}

namespace {

Mat euclidean_frame(const ParametricSurface& s, double u, double v, double umbilic_tol, CurvatureData* out) {
  const FundamentalForms ff = fundamental_forms(s, u, v);
  const CurvatureData cd = curvature(ff, umbilic_tol);
  if (cd.umbilic) throw UmbilicError("umbilic point", {});
  const Eigen::Vector3d e1 = (ff.xu * cd.dir_a(0) + ff.xv * cd.dir_a(1)).normalized();
  const Eigen::Vector3d e3 = Eigen::Vector3d(ff.normal);
  const Eigen::Vector3d e2 = e3.cross(e1);
  Mat f = Mat::Identity(4, 4);
  f.block(1, 0, 3, 1) = ff.x;
  f.block(1, 1, 3, 1) = e1;
  f.block(1, 2, 3, 1) = e2;
  f.block(1, 3, 3, 1) = e3;
  if (out) *out = cd;
  return f;
}

void align(Mat& f, const Mat& ref) {
  if (f.col(1).segment(1, 3).dot(ref.col(1).segment(1, 3)) < 0) {
    f.block(1, 1, 3, 2) *= -1.0;
  }
}

}  // namespace

EuclideanBestFrame euclidean_best_frame(const ParametricSurface& s, double umbilic_tol) {
  if (s.form != Form::euclidean) throw std::invalid_argument("euclidean_best_frame: surface is not in R^3");
  const ParamDomain& d = s.domain;
  d.validate();
  EuclideanBestFrame bf{FrameField{d, MatrixGroup::euclidean(), Grid<Mat>(d.nu, d.nv), {}},
                        Grid<double>(d.nu, d.nv, 0.0), Grid<double>(d.nu, d.nv, 0.0)};
  std::vector<GridIndex> umbilics;
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      CurvatureData cd;
      try {
        bf.field.frames(i, j) = euclidean_frame(s, d.u(i), d.v(j), umbilic_tol, &cd);
      } catch (const UmbilicError&) {
        umbilics.push_back({i, j});
        continue;
      }
      bf.a(i, j) = cd.a;
      bf.c(i, j) = cd.c;
    }
  }
  if (!umbilics.empty()) {
    std::string msg = "euclidean_best_frame: umbilic grid points";
    for (std::size_t k = 0; k < std::min<std::size_t>(umbilics.size(), 8); ++k) {
      msg += " (" + std::to_string(umbilics[k].first) + "," + std::to_string(umbilics[k].second) + ")";
    }
    if (umbilics.size() > 8) msg += " ...";
    throw UmbilicError(msg, umbilics);
  }
  // Sign propagation: along the first row, then up each column.
  for (int i = 1; i < d.nu; ++i) align(bf.field.frames(i, 0), bf.field.frames(i - 1, 0));
  for (int i = 0; i < d.nu; ++i)
    for (int j = 1; j < d.nv; ++j) align(bf.field.frames(i, j), bf.field.frames(i, j - 1));

  bf.field.sampler = [s, umbilic_tol](double u, double v, const Mat& ref) {
    Mat f = euclidean_frame(s, u, v, umbilic_tol, nullptr);
    align(f, ref);
    return f;
  };
  return bf;
}

DupinPDEReport dupin_pde_residual(const EuclideanBestFrame& bf, const PullbackOptions& opt) {
  const ParamDomain& d = bf.field.domain;
  PullbackOptions o = opt;
  if (o.mode == DiffMode::sampler && !bf.field.sampler) o.mode = DiffMode::grid;
  const MCForm w = pullback_mc(bf.field, o);
  const int nu = d.nu, nv = d.nv;
  Grid<double> p(nu, nv, 0.0), q(nu, nv, 0.0);
  Grid<Eigen::Matrix2d> coframe_inv(nu, nv);
  DupinPDEReport rep;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Mat& wu = w.wu(i, j);
      const Mat& wv = w.wv(i, j);
      Eigen::Matrix2d th;
      th << wu(1, 0), wv(1, 0), wu(2, 0), wv(2, 0);
      const Eigen::Matrix2d thi = th.inverse();
      coframe_inv(i, j) = thi;
      const Eigen::RowVector2d pq = Eigen::RowVector2d(wu(2, 1), wv(2, 1)) * thi;
      p(i, j) = pq(0);
      q(i, j) = pq(1);
      const double a = bf.a(i, j), c = bf.c(i, j);
      rep.theta3 = std::max({rep.theta3, std::abs(wu(3, 0)), std::abs(wv(3, 0))});
      rep.omega31 = std::max({rep.omega31, std::abs(wu(3, 1) - a * wu(1, 0)), std::abs(wv(3, 1) - a * wv(1, 0))});
      rep.omega32 = std::max({rep.omega32, std::abs(wu(3, 2) - c * wu(2, 0)), std::abs(wv(3, 2) - c * wv(2, 0))});
    }
  }
  const int i0 = d.periodic_u ? 0 : 2, i1 = d.periodic_u ? nu : nu - 2;
  const int j0 = d.periodic_v ? 0 : 2, j1 = d.periodic_v ? nv : nv - 2;
  auto frame_deriv = [&](const Grid<double>& f, int i, int j) -> Eigen::RowVector2d {
    return Eigen::RowVector2d(grid_diff4(f, d, 0, i, j), grid_diff4(f, d, 1, i, j)) * coframe_inv(i, j);
  };
  for (int i = i0; i < i1; ++i) {
    for (int j = j0; j < j1; ++j) {
      const double a = bf.a(i, j), c = bf.c(i, j);
      const Eigen::RowVector2d da = frame_deriv(bf.a, i, j);
      const Eigen::RowVector2d dc = frame_deriv(bf.c, i, j);
      const Eigen::RowVector2d dp = frame_deriv(p, i, j);
      const Eigen::RowVector2d dq = frame_deriv(q, i, j);
      const double pp = p(i, j), qq = q(i, j);
      rep.a1 = std::max(rep.a1, std::abs(da(0)));
      rep.c2 = std::max(rep.c2, std::abs(dc(1)));
      rep.eq1 = std::max(rep.eq1, std::abs(da(1) - pp * (a - c)));
      rep.eq2 = std::max(rep.eq2, std::abs(dc(0) - qq * (a - c)));
      rep.eq3 = std::max(rep.eq3, std::abs(dp(1) - dq(0) - (a * c + pp * pp + qq * qq)));
    }
  }
  rep.r1 = std::max(rep.a1, rep.eq1);
  rep.r2 = std::max(rep.c2, rep.eq2);
  rep.r3 = rep.eq3;
  return rep;
}

}  // namespace dupin

#include "dupin/lie_sphere.hpp"

#include <cmath>
#include <numbers>

namespace dupin {

namespace {

constexpr double kPi = std::numbers::pi;

const Vec& lie_signs() {
  static const Vec s = (Vec(6) << 1, 1, 1, 1, -1, -1).finished();
  return s;
}

double moebius_inner(const Vec& x, const Vec& y) {
  return x.head(4).dot(y.head(4)) - x(4) * y(4);
}

Mat eps_from_lambda() { return basis_matrix(Space::R42, BasisTag::lambda); }

Vec extend(const Vec& x5, double e5) {
  Vec q(6);
  q.head(5) = x5;
  q(5) = e5;
  return q;
}

// Orthonormal f_1, f_2 spanning a complement of the line inside its
// orthogonal space; <x, f_a> are coordinates of x mod the line.
std::array<Vec, 2> quotient_basis(const Vec& S0, const Vec& S1) {
  Eigen::Matrix<double, 2, 6> c;
  c.row(0) = S0.cwiseProduct(lie_signs()).transpose();
  c.row(1) = S1.cwiseProduct(lie_signs()).transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(c, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 6, 4> n = svd.matrixV().rightCols(4);
  const Eigen::Matrix4d gram = n.transpose() * lie_signs().asDiagonal() * n;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(gram);
  std::array<Vec, 2> f;
  for (int a = 0; a < 2; ++a) {
    const double l = es.eigenvalues()(2 + a);
    f[a] = n * es.eigenvectors().col(2 + a) / std::sqrt(l);
  }
  return f;
}

std::array<Vec, 4> sampler_derivatives(const LineSampler& f, double u, double v, double hu, double hv) {
  const auto up = f(u + hu, v), um = f(u - hu, v);
  const auto vp = f(u, v + hv), vm = f(u, v - hv);
  return {(up.first - um.first) / (2 * hu), (vp.first - vm.first) / (2 * hv), (up.second - um.second) / (2 * hu),
          (vp.second - vm.second) / (2 * hv)};
}

Vec grid_vec_diff(const Grid<Vec>& g, const ParamDomain& d, int axis, int i, int j) {
  const int n = axis == 0 ? g.nu() : g.nv();
  const bool periodic = axis == 0 ? d.periodic_u : d.periodic_v;
  const double h = axis == 0 ? d.du() : d.dv();
  const int k = axis == 0 ? i : j;
  auto at = [&](int idx) -> const Vec& {
    if (periodic) idx = ((idx % n) + n) % n;
    return axis == 0 ? g(idx, j) : g(i, idx);
  };
  if (periodic || (k >= 2 && k <= n - 3)) {
    return (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
  }
  if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

double sampler_step(const LegendreMap& l, int axis) {
  return l.relative_step * (axis == 0 ? l.domain.u_range() : l.domain.v_range());
}

}  // namespace

double lie_inner(const Vec& x, const Vec& y) {
  if (x.size() != 6 || y.size() != 6) throw DimensionError("lie_inner: vectors must lie in R^{4,2}");
  return x.cwiseProduct(lie_signs()).dot(y);
}

double quadric_residual(const Vec& q) {
  const double n = q.squaredNorm();
  if (n == 0.0) throw OffQuadricError("zero vector is not a point of the quadric");
  return std::abs(lie_inner(q, q)) / n;
}

PencilLine make_line(const Vec& S0, const Vec& S1, double tol) {
  if (S0.size() != 6 || S1.size() != 6) throw DimensionError("make_line: vectors must lie in R^{4,2}");
  if (S0.norm() == 0.0 || S1.norm() == 0.0) throw DependentError("make_line: zero vector");
  PencilLine l{S0.normalized(), S1.normalized()};
  l.quadric0 = quadric_residual(l.S0);
  l.quadric1 = quadric_residual(l.S1);
  if (l.quadric0 > tol || l.quadric1 > tol) throw OffQuadricError("make_line: vector is not on the Lie quadric");
  Eigen::Matrix<double, 6, 2> m;
  m << l.S0, l.S1;
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>>(m).singularValues();
  if (sv(1) < 1e-8) throw DependentError("make_line: the two spheres are linearly dependent");
  l.orthogonality = std::abs(lie_inner(l.S0, l.S1));
  if (l.orthogonality > tol) throw NonOrthogonalError("make_line: the two spheres are not orthogonal");
  return l;
}

Vec include_sphere(const Vec& S) {
  if (S.size() != 5) throw DimensionError("include_sphere: sphere vector must lie in R^{4,1}");
  if (std::abs(moebius_inner(S, S) - 1.0) > 1e-10) throw std::invalid_argument("include_sphere: <S,S> != 1");
  return extend(S, 1.0);
}

Vec include_point(const Vec& q) {
  if (q.size() != 5) throw DimensionError("include_point: point must lie in R^{4,1}");
  if (q.norm() == 0.0 || std::abs(moebius_inner(q, q)) > 1e-10 * q.squaredNorm()) {
    throw std::invalid_argument("include_point: vector is not null");
  }
  return extend(q, 0.0);
}

Vec spherical_projection(const Vec& S0, const Vec& S1) {
  if (S0.size() != 6 || S1.size() != 6) throw DimensionError("spherical_projection: vectors must lie in R^{4,2}");
  // <x, e5> = -x5
  const double a0 = S0(5), a1 = S1(5);
  if (std::abs(a0) <= 1e-12 * S0.norm() && std::abs(a1) <= 1e-12 * S1.norm()) {
    throw DegenerateLineError("spherical_projection: line lies in Moebius space");
  }
  const Vec p = a1 * S0 - a0 * S1;
  return p.head(5).normalized();
}

Vec spherical_projection(const PencilLine& l) { return spherical_projection(l.S0, l.S1); }

LegendreMap sample_legendre(const ParamDomain& d, const LineSampler& f) {
  d.validate();
  LegendreMap l{d, Grid<Vec>(d.nu, d.nv), Grid<Vec>(d.nu, d.nv), f};
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      const auto s = f(d.u(i), d.v(j));
      l.S0(i, j) = s.first;
      l.S1(i, j) = s.second;
    }
  }
  return l;
}

std::array<Vec, 4> line_derivatives(const LegendreMap& l, int i, int j) {
  const ParamDomain& d = l.domain;
  if (l.sampler) return sampler_derivatives(l.sampler, d.u(i), d.v(j), sampler_step(l, 0), sampler_step(l, 1));
  return {grid_vec_diff(l.S0, d, 0, i, j), grid_vec_diff(l.S0, d, 1, i, j), grid_vec_diff(l.S1, d, 0, i, j),
          grid_vec_diff(l.S1, d, 1, i, j)};
}

double contact_residual(const LegendreMap& l) {
  double worst = 0.0;
  for (int i = 0; i < l.domain.nu; ++i) {
    for (int j = 0; j < l.domain.nv; ++j) {
      const auto dd = line_derivatives(l, i, j);
      const Vec& s1 = l.S1(i, j);
      const double scale = l.S0(i, j).norm() * s1.norm();
      worst = std::max({worst, std::abs(lie_inner(dd[0], s1)) / scale, std::abs(lie_inner(dd[1], s1)) / scale});
    }
  }
  return worst;
}

double line_residual(const LegendreMap& l) {
  double worst = 0.0;
  for (std::size_t k = 0; k < l.S0.size(); ++k) {
    const Vec& a = l.S0.data()[k];
    const Vec& b = l.S1.data()[k];
    worst = std::max({worst, quadric_residual(a), quadric_residual(b), std::abs(lie_inner(a, b)) / (a.norm() * b.norm())});
  }
  return worst;
}

double min_immersion_rank(const LegendreMap& l) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < l.domain.nu; ++i) {
    for (int j = 0; j < l.domain.nv; ++j) {
      const Vec s0 = l.S0(i, j).normalized(), s1 = l.S1(i, j).normalized();
      const auto f = quotient_basis(s0, s1);
      auto dd = line_derivatives(l, i, j);
      dd[0] /= l.S0(i, j).norm();
      dd[1] /= l.S0(i, j).norm();
      dd[2] /= l.S1(i, j).norm();
      dd[3] /= l.S1(i, j).norm();
      Eigen::Matrix<double, 4, 2> m;
      for (int a = 0; a < 2; ++a) {
        m(a, 0) = lie_inner(dd[0], f[a]);
        m(a, 1) = lie_inner(dd[1], f[a]);
        m(2 + a, 0) = lie_inner(dd[2], f[a]);
        m(2 + a, 1) = lie_inner(dd[3], f[a]);
      }
      worst = std::min(worst, Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>>(m).singularValues()(1));
    }
  }
  return worst;
}

LegendreMap legendre_lift(const LiftSampler& fs, const ParamDomain& d, double tol) {
  d.validate();
  const double hu = 1e-6 * d.u_range(), hv = 1e-6 * d.v_range();
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      const double u = d.u(i), v = d.v(j);
      const auto [F, S] = fs(u, v);
      if (F.size() != 5 || S.size() != 5) throw DimensionError("legendre_lift: F and S must lie in R^{4,1}");
      const double scale = F.norm() * S.norm();
      const Vec Fu = (fs(u + hu, v).first - fs(u - hu, v).first) / (2 * hu);
      const Vec Fv = (fs(u, v + hv).first - fs(u, v - hv).first) / (2 * hv);
      const double r = std::max({std::abs(moebius_inner(F, F)) / F.squaredNorm(), std::abs(moebius_inner(S, S) - 1.0),
                                 std::abs(moebius_inner(F, S)) / scale, std::abs(moebius_inner(Fu, S)) / scale,
                                 std::abs(moebius_inner(Fv, S)) / scale});
      if (!(r <= tol)) {
        throw TangencyError("legendre_lift: S is not a tangent sphere map along f at grid point (" +
                            std::to_string(i) + "," + std::to_string(j) + "), residual " + std::to_string(r));
      }
    }
  }
  auto line = [fs](double u, double v) {
    const auto [F, S] = fs(u, v);
    return std::make_pair(extend(F, 0.0), extend(S, 1.0));
  };
  return sample_legendre(d, line);
}

LiftSampler surface_lift(const ParametricSurface& s, int which) {
  if (which < -1 || which > 1) throw std::invalid_argument("surface_lift: which must be -1, 0 or 1");
  if (s.form == Form::hyperbolic) throw std::invalid_argument("surface_lift: surfaces in R^3 or S^3 only");
  const Mat to_eps = basis_matrix(Space::R41, BasisTag::delta);
  return [s, which, to_eps](double u, double v) {
    const FundamentalForms ff = fundamental_forms(s, u, v);
    double k = 0.0;
    if (which >= 0) {
      const CurvatureData cd = curvature(ff);
      k = which == 0 ? cd.a : cd.c;
    }
    const Vec& x = ff.x;
    const Vec& n = ff.normal;
    if (s.form == Form::sphere) {
      Vec F(5), N(5);
      F << x, 1.0;
      N << n, 0.0;
      return std::make_pair(F, Vec(k * F + N));
    }
    // Delta coordinates: F = (1, sqrt2 x, |x|^2), the tangent plane
    // P = (0, n, sqrt2 n.x), and the tangent sphere P + (k / sqrt2) F.
    const double r2 = std::sqrt(2.0);
    Vec F(5), P(5);
    F << 1.0, r2 * x, x.squaredNorm();
    P << 0.0, n, r2 * n.dot(x);
    return std::make_pair(Vec(to_eps * F), Vec(to_eps * (P + (k / r2) * F)));
  };
}

LineSampler example_sampler() {
  return [](double u, double v) {
    Vec s0(6), s1(6);
    s0 << std::cos(u), 0, 0, std::sin(u), 1, 0;
    s1 << 0, std::cos(v), std::sin(v), 0, 0, 1;
    return std::make_pair(s0, s1);
  };
}

LegendreMap example_lambda(int nu, int nv) {
  ParamDomain d{0.0, 2 * kPi, 0.0, 2 * kPi, nu, nv, true, true};
  return sample_legendre(d, example_sampler());
}

std::pair<double, double> spherical_projection_rank(const LegendreMap& l) {
  if (!l.sampler) throw std::invalid_argument("spherical_projection_rank needs a sampler");
  const ParamDomain& d = l.domain;
  double second = 0.0, first = 0.0;
  auto sigma = [&](double u, double v) {
    const auto s = l.sampler(u, v);
    return spherical_projection(s.first, s.second);
  };
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      Eigen::Matrix<double, 5, 2> m;
      Vec x;
      {
        const double u = d.u(i), v = d.v(j), hu = sampler_step(l, 0), hv = sampler_step(l, 1);
        x = sigma(u, v);
        Vec a = sigma(u + hu, v), b = sigma(u - hu, v), c = sigma(u, v + hv), e = sigma(u, v - hv);
        // Representatives are unit vectors; align signs with the centre.
        for (Vec* y : {&a, &b, &c, &e})
          if (y->dot(x) < 0) *y = -*y;
        m.col(0) = (a - b) / (2 * hu);
        m.col(1) = (c - e) / (2 * hv);
      }
      m -= x * (x.transpose() * m);
      const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 5, 2>>(m).singularValues();
      first = std::max(first, sv(0));
      second = std::max(second, sv(1));
    }
  }
  return {second, first};
}

LegendrePencil legendre_pencil(const Vec& S0in, const Vec& S1in, const std::array<Vec, 4>& d, double root_tol) {
  const double n0 = S0in.norm(), n1 = S1in.norm();
  const Vec S0 = S0in / n0, S1 = S1in / n1;
  const auto f = quotient_basis(S0, S1);
  Eigen::Matrix2d A, B;
  for (int a = 0; a < 2; ++a) {
    A(a, 0) = lie_inner(d[0], f[a]) / n0;
    A(a, 1) = lie_inner(d[1], f[a]) / n0;
    B(a, 0) = lie_inner(d[2], f[a]) / n1;
    B(a, 1) = lie_inner(d[3], f[a]) / n1;
  }
  // det(sigma A + tau B) as a quadratic form in (sigma, tau).
  const double m = A(0, 0) * B(1, 1) + A(1, 1) * B(0, 0) - A(0, 1) * B(1, 0) - A(1, 0) * B(0, 1);
  Eigen::Matrix2d Q;
  Q << A.determinant(), 0.5 * m, 0.5 * m, B.determinant();
  const double scale = std::max({A.squaredNorm(), B.squaredNorm(), 1e-300});
  LegendrePencil out;
  if (max_abs(Q) < root_tol * scale) {
    out.degenerate = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q);
  const double l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
  std::vector<Eigen::Vector2d> st;
  if (std::abs(l0 * l1) < root_tol * scale * scale) {
    out.double_root = true;
    st.push_back(std::abs(l0) < std::abs(l1) ? es.eigenvectors().col(0) : es.eigenvectors().col(1));
  } else if (l0 * l1 > 0) {
    return out;
  } else {
    const double a = std::sqrt(l1), b = std::sqrt(-l0);
    for (double sgn : {1.0, -1.0}) st.push_back((es.eigenvectors() * Eigen::Vector2d(a, sgn * b)).normalized());
  }
  for (const auto& p : st) {
    CurvatureSphere k;
    k.sigma = p(0);
    k.tau = p(1);
    k.K = (k.sigma * S0 + k.tau * S1).normalized();
    const Eigen::Matrix2d N = k.sigma * A + k.tau * B;
    const Eigen::RowVector2d r = N.row(0).norm() >= N.row(1).norm() ? N.row(0) : N.row(1);
    k.dir = r.norm() > 0 ? Eigen::Vector2d(-r(1), r(0)).normalized() : Eigen::Vector2d(1, 0);
    out.spheres.push_back(k);
  }
  return out;
}

namespace {

// Index of the sphere in `p` closest to K projectively.
int closest(const LegendrePencil& p, const Vec& K) {
  int best = -1;
  double bv = -1;
  for (int k = 0; k < static_cast<int>(p.spheres.size()); ++k) {
    const double c = std::abs(p.spheres[k].K.dot(K));
    if (c > bv) {
      bv = c;
      best = k;
    }
  }
  return best;
}

Vec aligned(const Vec& K, const Vec& ref) { return K.dot(ref) < 0 ? Vec(-K) : K; }

Vec mod_K(const Vec& dK, const Vec& K) { return dK - K.dot(dK) * K; }

}  // namespace

LegendreDupinResult legendre_dupin_test(const LegendreMap& l, double tol) {
  const ParamDomain& d = l.domain;
  LegendreDupinResult r;
  r.tolerance = tol;
  r.K0 = r.K1 = Grid<Vec>(d.nu, d.nv);
  Grid<LegendrePencil> pencils(d.nu, d.nv);
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      LegendrePencil p = legendre_pencil(l.S0(i, j), l.S1(i, j), line_derivatives(l, i, j));
      if (p.degenerate) r.degenerate = true;
      if (p.double_root) r.umbilic = true;
      if (p.spheres.size() != 2) {
        r.dupin = false;
        if (!p.degenerate && !p.double_root) r.degenerate = true;  // complex roots: not a Legendre map
      }
      pencils(i, j) = p;
    }
  }
  if (r.degenerate || r.umbilic) return r;

  // Branch matching in scan order: the first column follows u, each row v.
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      LegendrePencil& p = pencils(i, j);
      if (i == 0 && j == 0) continue;
      const Vec& ref = j == 0 ? pencils(i - 1, 0).spheres[0].K : pencils(i, j - 1).spheres[0].K;
      if (closest(p, ref) == 1) std::swap(p.spheres[0], p.spheres[1]);
      const Vec& ref0 = j == 0 ? pencils(i - 1, 0).spheres[0].K : pencils(i, j - 1).spheres[0].K;
      const Vec& ref1 = j == 0 ? pencils(i - 1, 0).spheres[1].K : pencils(i, j - 1).spheres[1].K;
      p.spheres[0].K = aligned(p.spheres[0].K, ref0);
      p.spheres[1].K = aligned(p.spheres[1].K, ref1);
    }
  }
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      r.K0(i, j) = pencils(i, j).spheres[0].K;
      r.K1(i, j) = pencils(i, j).spheres[1].K;
    }
  }

  const double h = 1e-4 * std::min(d.u_range(), d.v_range());
  const double hu = sampler_step(l, 0), hv = sampler_step(l, 1);
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      for (int b = 0; b < 2; ++b) {
        const CurvatureSphere& k = pencils(i, j).spheres[b];
        Vec dK;
        if (l.sampler) {
          const double u = d.u(i), v = d.v(j);
          auto at = [&](double s) {
            const double uu = u + s * k.dir(0), vv = v + s * k.dir(1);
            const auto sv = l.sampler(uu, vv);
            const LegendrePencil p = legendre_pencil(sv.first, sv.second, sampler_derivatives(l.sampler, uu, vv, hu, hv));
            if (p.spheres.empty()) throw std::runtime_error("legendre_dupin_test: pencil lost its roots");
            return aligned(p.spheres[closest(p, k.K)].K, k.K);
          };
          dK = (at(h) - at(-h)) / (2 * h);
        } else {
          const Grid<Vec>& g = b == 0 ? r.K0 : r.K1;
          Grid<Vec> local = g;
          // Local sign alignment for the stencil around (i, j).
          for (auto& x : local.data()) x = aligned(x, k.K);
          dK = k.dir(0) * grid_vec_diff(local, d, 0, i, j) + k.dir(1) * grid_vec_diff(local, d, 1, i, j);
        }
        r.max_derivative = std::max(r.max_derivative, mod_K(dK, k.K).norm());
      }
    }
  }
  r.dupin = r.max_derivative < tol;
  return r;
}

std::vector<EntryFunctional> h_constraints() {
  return {omega(2, 0), omega(3, 1), omega(1, 0), omega(0, 1), omega(2, 3),
          omega(0, 2), omega(1, 3), omega(0, 4), omega(4, 0)};
}

SubalgebraBasis h_basis() { return subalgebra_from_constraints(h_constraints(), lie_metric()); }

Mat boost(double t) {
  Mat b = Mat::Identity(6, 6);
  b(0, 0) = b(5, 5) = std::cosh(t);
  b(0, 5) = b(5, 0) = std::sinh(t);
  const Mat p = eps_from_lambda();
  return p.inverse() * b * p;
}

Mat example_frame(double u, double v) {
  const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
  Mat t = Mat::Zero(6, 6);
  t.col(0) << cu, 0, 0, su, 1, 0;
  t.col(1) << 0, cv, sv, 0, 0, 1;
  t.col(2) << 0, -sv, cv, 0, 0, 0;
  t.col(3) << -su, 0, 0, cu, 0, 0;
  t.col(4) << 0, -cv / 2, -sv / 2, 0, 0, 0.5;
  t.col(5) << -cu / 2, 0, 0, -su / 2, 0.5, 0;
  return eps_from_lambda().inverse() * t;
}

std::pair<Mat, Mat> example_slice() {
  Mat a = Mat::Zero(6, 6), b = Mat::Zero(6, 6);
  a(3, 0) = 1;
  a(0, 3) = -0.5;
  a(5, 3) = 1;
  a(3, 5) = -0.5;
  b(2, 1) = 1;
  b(1, 2) = -0.5;
  b(4, 2) = 1;
  b(2, 4) = -0.5;
  return {a, b};
}

ParamDomain default_orbit_domain(int ns, int nt) { return ParamDomain{0.0, 2 * kPi, 0.0, 2 * kPi, ns, nt, true, true}; }

LegendreMap coset_orbit(const Mat& A, const ParamDomain& d) {
  if (group_residual(A, lie_metric()) > 1e-10) throw MembershipError("coset_orbit: A is not a Lie frame");
  const Mat base = eps_from_lambda() * A * example_frame(0.0, 0.0);
  const auto [X, Y] = example_slice();
  auto f = [base, X, Y](double s, double t) {
    const Mat m = base * mat_exp(s * X + t * Y);
    return std::make_pair(Vec(m.col(0)), Vec(m.col(1)));
  };
  LegendreMap l = sample_legendre(d, f);
  const double rank = min_immersion_rank(l);
  if (rank < 1e-8) {
    throw ImmersionError("coset_orbit: the (theta^3, theta^2) slice of h does not immerse on this grid "
                         "(min rank " + std::to_string(rank) + "); choose another slice");
  }
  return l;
}

Fig7Result fig7_pipeline(double t, int ns, int nt, double rank_tol) {
  Fig7Result r;
  r.t = t;
  r.rank_tol = rank_tol;
  r.domain = default_orbit_domain(ns, nt);
  const LegendreMap l = coset_orbit(boost(t), r.domain);
  const ParamDomain& d = r.domain;
  auto on_sphere = [&](double u, double v) {
    const auto s = l.sampler(u, v);
    return moebius_to_sphere(spherical_projection(s.first, s.second)).coords;
  };
  r.sphere = r.points = Grid<Vec>(ns, nt);
  r.singular = Grid<char>(ns, nt, 0);
  const double hu = 1e-5 * d.u_range(), hv = 1e-5 * d.v_range();
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double u = d.u(i), v = d.v(j);
      const Vec x = on_sphere(u, v);
      r.sphere(i, j) = x;
      const Vec xu = (on_sphere(u + hu, v) - on_sphere(u - hu, v)) / (2 * hu);
      const Vec xv = (on_sphere(u, v + hv) - on_sphere(u, v - hv)) / (2 * hv);
      const double det = xu.squaredNorm() * xv.squaredNorm() - std::pow(xu.dot(xv), 2);
      bool bad = det < rank_tol;
      try {
        r.points(i, j) = stereo(x);
      } catch (const PoleError&) {
        bad = true;
      }
      if (bad) {
        r.singular(i, j) = 1;
        r.singular_points.push_back({i, j});
      }
    }
  }
  r.degenerate = r.singular_points.size() == d.size();
  return r;
}

FrameField example_frame_field(const ParamDomain& d, const Mat& A) {
  d.validate();
  auto sample = [A](double u, double v, const Mat&) { return Mat(A * example_frame(u, v)); };
  FrameField f{d, MatrixGroup::orthogonal(lie_metric()), Grid<Mat>(d.nu, d.nv), sample};
  for (int i = 0; i < d.nu; ++i)
    for (int j = 0; j < d.nv; ++j) f.frames(i, j) = sample(d.u(i), d.v(j), Mat());
  return f;
}

LieCoefficients best_lie_frame_check(const FrameField& T, double order_tol, const PullbackOptions& opt) {
  if (T.group.dim() != 6) throw DimensionError("best_lie_frame_check: Lie frames are 6x6");
  PullbackOptions o = opt;
  if (o.mode == DiffMode::sampler && !T.sampler) o.mode = DiffMode::grid;
  const MCForm w = pullback_mc(T, o);
  const ParamDomain& d = T.domain;
  const int nu = d.nu, nv = d.nv;
  LieCoefficients c;
  c.p = c.q = c.t = c.u = c.c2 = c.c3 = c.d2 = c.d3 = Grid<double>(nu, nv, 0.0);
  c.coframe = Grid<Eigen::Matrix2d>(nu, nv);
  c.min_coframe_det = std::numeric_limits<double>::infinity();
  auto both = [&](int a, int b, int i, int j) { return std::max(std::abs(w.wu(i, j)(a, b)), std::abs(w.wv(i, j)(a, b))); };
  Grid<double> t2u(nu, nv), t2v(nu, nv), t3u(nu, nv), t3v(nu, nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      c.order1 = std::max({c.order1, both(2, 0, i, j), both(3, 1, i, j)});
      c.order2 = std::max({c.order2, both(1, 0, i, j), both(0, 1, i, j), both(2, 3, i, j),
                           std::abs(w.wu(i, j)(2, 3) + w.wu(i, j)(3, 2)), std::abs(w.wv(i, j)(2, 3) + w.wv(i, j)(3, 2))});
      c.order3 = std::max({c.order3, both(0, 2, i, j), both(1, 3, i, j), both(0, 4, i, j)});
      Eigen::Matrix2d th;
      th << w.wu(i, j)(2, 1), w.wv(i, j)(2, 1), w.wu(i, j)(3, 0), w.wv(i, j)(3, 0);
      c.coframe(i, j) = th;
      c.min_coframe_det = std::min(c.min_coframe_det, std::abs(th.determinant()));
      t2u(i, j) = th(0, 0);
      t2v(i, j) = th(0, 1);
      t3u(i, j) = th(1, 0);
      t3v(i, j) = th(1, 1);
    }
  }
  if (c.order1 > order_tol) {
    throw OrderError("best_lie_frame_check: [T0], [T1] are not curvature spheres (order-1 residual " +
                     std::to_string(c.order1) + ")");
  }
  if (c.min_coframe_det < order_tol) throw OrderError("best_lie_frame_check: theta^2 ^ theta^3 vanishes");

  auto fit = [&](int a, int b, int i, int j) {
    return Eigen::RowVector2d(Eigen::RowVector2d(w.wu(i, j)(a, b), w.wv(i, j)(a, b)) * c.coframe(i, j).inverse());
  };
  auto interior = [&](int i, int j, int m) {
    return (d.periodic_u || (i >= m && i < nu - m)) && (d.periodic_v || (j >= m && j < nv - m));
  };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Eigen::RowVector2d w00 = fit(0, 0, i, j), w11 = fit(1, 1, i, j);
      const Eigen::RowVector2d w03 = fit(0, 3, i, j), w12 = fit(1, 2, i, j);
      c.t(i, j) = w00(1);
      c.u(i, j) = w11(0);
      c.c2(i, j) = w03(0);
      c.c3(i, j) = w03(1);
      c.d2(i, j) = w12(0);
      c.d3(i, j) = w12(1);
      // Defaults from the fit; replaced by d theta in the interior.
      c.q(i, j) = w00(0);
      c.p(i, j) = -w11(1);
      if (interior(i, j, 2)) {
        const double det = c.coframe(i, j).determinant();
        const double p = (grid_diff4(t2v, d, 0, i, j) - grid_diff4(t2u, d, 1, i, j)) / det;
        const double q = (grid_diff4(t3v, d, 0, i, j) - grid_diff4(t3u, d, 1, i, j)) / det;
        c.fit_residual = std::max({c.fit_residual, std::abs(p + w11(1)), std::abs(q - w00(0))});
        c.p(i, j) = p;
        c.q(i, j) = q;
      }
    }
  }
  // Frame derivatives f_2, f_3 of a scalar: df = f_2 theta^2 + f_3 theta^3.
  auto fd = [&](const Grid<double>& f, int i, int j) {
    return Eigen::RowVector2d(Eigen::RowVector2d(grid_diff4(f, d, 0, i, j), grid_diff4(f, d, 1, i, j)) *
                              c.coframe(i, j).inverse());
  };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (!interior(i, j, 4)) continue;
      const double p = c.p(i, j), q = c.q(i, j), t = c.t(i, j), u = c.u(i, j);
      const Eigen::RowVector2d dq = fd(c.q, i, j), dt = fd(c.t, i, j), du = fd(c.u, i, j), dp = fd(c.p, i, j);
      // dq^th2 + dt^th3 = -(c2 + q(p + t)) th2^th3
      c.exterior1 = std::max(c.exterior1, std::abs(-dq(1) + dt(0) + c.c2(i, j) + q * (p + t)));
      // du^th2 - dp^th3 = (d3 + p(q - u)) th2^th3
      c.exterior2 = std::max(c.exterior2, std::abs(-du(1) - dp(0) - (c.d3(i, j) + p * (q - u))));
    }
  }
  return c;
}

}  // namespace dupin

#include "dupin/space_forms.hpp"

#include <cmath>

namespace dupin {

namespace {

std::array<double, 4> arr4(const Vec& x) { return {x(0), x(1), x(2), x(3)}; }
std::array<double, 3> arr3(const Vec& x) { return {x(0), x(1), x(2)}; }

template <std::size_t N>
Vec to_vec(const std::array<double, N>& a) {
  Vec v(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) v(static_cast<Eigen::Index>(i)) = a[i];
  return v;
}

void need_size(const Vec& x, int n, const char* what) {
  if (x.size() != n) throw DimensionError(std::string(what) + ": expected " + std::to_string(n) + " coordinates");
}

Mat minkowski31() { return Vec((Vec(4) << 1, 1, 1, -1).finished()).asDiagonal(); }

// epsilon -> delta coordinate change on R^{4,1}
Mat eps_to_delta() { return basis_matrix(Space::R41, BasisTag::delta).inverse(); }

}  // namespace

std::string to_string(Form f) {
  switch (f) {
    case Form::euclidean: return "euclidean";
    case Form::sphere: return "sphere";
    case Form::hyperbolic: return "hyperbolic";
  }
  return "?";
}

double SpaceFormPoint::constraint_residual() const {
  switch (form) {
    case Form::euclidean: return 0.0;
    case Form::sphere: return std::abs(coords.squaredNorm() - 1.0);
    case Form::hyperbolic: return std::abs(coords.dot(minkowski31() * coords) + 1.0);
  }
  return 0.0;
}

SpaceFormPoint SpaceFormPoint::checked(Form form, Vec coords, double tol) {
  need_size(coords, form == Form::euclidean ? 3 : 4, "SpaceFormPoint");
  SpaceFormPoint p{form, std::move(coords)};
  if (p.constraint_residual() > tol) {
    throw std::invalid_argument("point is not on " + to_string(form));
  }
  if (form == Form::hyperbolic && p.coords(3) < 1.0 - tol) {
    throw std::invalid_argument("hyperbolic point lies on the lower sheet");
  }
  return p;
}

Vec stereo(const Vec& x) {
  need_size(x, 4, "stereo");
  if ((x + Vec::Unit(4, 0)).norm() < kPoleTol) throw PoleError("stereo: point is the pole -e0");
  return to_vec(stereo_t(arr4(x)));
}

Vec stereo_inv(const Vec& y) {
  need_size(y, 3, "stereo_inv");
  return to_vec(stereo_inv_t(arr3(y)));
}

Vec hyp_stereo(const Vec& x) {
  need_size(x, 4, "hyp_stereo");
  if (x(3) <= -1.0 + kPoleTol) throw ChartError("hyp_stereo: point off the upper sheet");
  return to_vec(hyp_stereo_t(arr4(x)));
}

Vec hyp_stereo_inv(const Vec& y) {
  need_size(y, 3, "hyp_stereo_inv");
  if (y.squaredNorm() >= 1.0) throw ChartError("hyp_stereo_inv: point outside the unit ball");
  return to_vec(hyp_stereo_inv_t(arr3(y)));
}

double poincare_factor(const Vec& y) {
  need_size(y, 3, "poincare_factor");
  const double n2 = y.squaredNorm();
  if (n2 >= 1.0) throw ChartError("poincare_factor: point outside the unit ball");
  return 2.0 / (1.0 - n2);
}

Vec moebius_lift(const SpaceFormPoint& p) {
  Vec q = Vec::Zero(5);
  switch (p.form) {
    case Form::sphere:
      need_size(p.coords, 4, "moebius_lift");
      q.head(4) = p.coords;
      q(4) = 1.0;
      return q;
    case Form::euclidean:
      return moebius_lift({Form::sphere, stereo_inv(p.coords)});
    case Form::hyperbolic:
      // f_0(hyp_stereo(x)) is proportional to x + e0.
      need_size(p.coords, 4, "moebius_lift");
      q(0) = 1.0;
      q.tail(4) = p.coords;
      return q;
  }
  return q;
}

ProjectivePoint embed_moebius(const SpaceFormPoint& p) { return ProjectivePoint(moebius_lift(p)); }

SpaceFormPoint moebius_to_sphere(const Vec& q) {
  need_size(q, 5, "moebius_to_sphere");
  if (std::abs(q(4)) < kPoleTol * q.norm()) throw ChartError("null vector has no e4 component");
  Vec x = q.head(4) / q(4);
  x.normalize();  // absorbs cone round-off
  return {Form::sphere, x};
}

SpaceFormPoint moebius_to_euclidean(const Vec& q) {
  const SpaceFormPoint s = moebius_to_sphere(q);
  try {
    return {Form::euclidean, stereo(s.coords)};
  } catch (const PoleError&) {
    throw ChartError("point at infinity of R^3");
  }
}

SpaceFormPoint moebius_to_hyperbolic(const Vec& q) {
  need_size(q, 5, "moebius_to_hyperbolic");
  if (std::abs(q(0)) < kPoleTol * q.norm()) throw ChartError("point on the ideal boundary of H^3");
  Vec x = q.tail(4) / q(0);
  if (x(3) <= 0.0) throw ChartError("point on the lower sheet (outside the ball)");
  // Project back to the hyperboloid to absorb round-off.
  const double s = x.head(3).squaredNorm();
  x(3) = std::sqrt(1.0 + s);
  return {Form::hyperbolic, x};
}

SpaceFormPoint moebius_to_form(const Vec& q, Form form) {
  switch (form) {
    case Form::sphere: return moebius_to_sphere(q);
    case Form::euclidean: return moebius_to_euclidean(q);
    case Form::hyperbolic: return moebius_to_hyperbolic(q);
  }
  throw ChartError("unknown form");
}

void check_isometry(const Mat& g, Form form, double tol) {
  if (g.rows() != 4 || g.cols() != 4) throw DimensionError("isometry must be 4x4");
  switch (form) {
    case Form::sphere: {
      const double r = max_abs(g.transpose() * g - Mat::Identity(4, 4));
      if (r > tol || g.determinant() < 0) throw MembershipError("matrix is not in SO(4)");
      return;
    }
    case Form::euclidean: {
      const Mat a = g.bottomRightCorner(3, 3);
      const double r = std::max(max_abs(a.transpose() * a - Mat::Identity(3, 3)),
                                std::max(std::abs(g(0, 0) - 1.0), max_abs(g.topRightCorner(1, 3))));
      if (r > tol || a.determinant() < 0) throw MembershipError("matrix is not in E(3)");
      return;
    }
    case Form::hyperbolic: {
      const Mat eta = minkowski31();
      const double r = max_abs(g.transpose() * eta * g - eta);
      if (r > tol || g.determinant() < 0 || g(3, 3) < 0) {
        throw MembershipError("matrix is not in the identity component of SO(3,1)");
      }
      return;
    }
  }
}

SpaceFormPoint act(const Mat& g, const SpaceFormPoint& p) {
  if (p.form == Form::euclidean) {
    return {p.form, g.block(1, 0, 3, 1) + g.bottomRightCorner(3, 3) * p.coords};
  }
  return {p.form, g * p.coords};
}

Mat moebius_translation(const Vec& y) {
  need_size(y, 3, "moebius_translation");
  const double r2 = std::sqrt(2.0);
  Mat t = Mat::Identity(5, 5);
  t.block(1, 0, 3, 1) = r2 * y;
  t(4, 0) = y.squaredNorm();
  t.block(4, 1, 1, 3) = r2 * y.transpose();
  return t;
}

GroupElement group_embed(const Mat& g, Form form) {
  check_isometry(g, form);
  Mat m = Mat::Identity(5, 5);
  switch (form) {
    case Form::sphere: {
      Mat eps = Mat::Identity(5, 5);
      eps.topLeftCorner(4, 4) = g;
      const Mat c = eps_to_delta();
      m = c * eps * c.inverse();
      break;
    }
    case Form::hyperbolic: {
      Mat eps = Mat::Identity(5, 5);
      eps.bottomRightCorner(4, 4) = g;
      const Mat c = eps_to_delta();
      m = c * eps * c.inverse();
      break;
    }
    case Form::euclidean: {
      Mat rot = Mat::Identity(5, 5);
      rot.block(1, 1, 3, 3) = g.bottomRightCorner(3, 3);
      m = moebius_translation(g.block(1, 0, 3, 1)) * rot;
      break;
    }
  }
  return GroupElement::checked(m, moebius_metric());
}

double projective_distance(const Vec& a, const Vec& b) {
  const Vec an = a.normalized();
  const Vec bn = b.normalized();
  // || b - (a.b) a || for unit vectors: sine of the angle between the lines.
  return (bn - an.dot(bn) * an).norm();
}

double equivariance_residual(const Mat& g, Form form, const std::vector<SpaceFormPoint>& pts) {
  const GroupElement big = group_embed(g, form);
  const Mat to_eps = basis_matrix(Space::R41, BasisTag::delta);
  const Mat to_delta = to_eps.inverse();
  double worst = 0.0;
  for (const auto& p : pts) {
    const Vec lhs = moebius_lift(act(g, p));
    const Vec rhs = to_eps * (big.mat * (to_delta * moebius_lift(p)));
    worst = std::max(worst, projective_distance(lhs, rhs));
  }
  return worst;
}

}  // namespace dupin

#include "dupin/frame_calculus.hpp"

#include <cmath>

namespace dupin {

MatrixGroup MatrixGroup::euclidean() { return MatrixGroup(); }

MatrixGroup MatrixGroup::orthogonal(const Metric& m) {
  MatrixGroup g;
  g.metric_ = m;
  return g;
}

int MatrixGroup::dim() const { return metric_ ? metric_->dim() : 4; }

std::string MatrixGroup::name() const {
  if (!metric_) return "E(3)";
  return "O(" + to_string(metric_->space()) + "," + to_string(metric_->basis()) + ")";
}

const Metric& MatrixGroup::metric() const {
  if (!metric_) throw std::logic_error("E(3) has no invariant metric");
  return *metric_;
}

double MatrixGroup::group_residual(const Mat& t) const {
  if (metric_) return dupin::group_residual(t, *metric_);
  if (t.rows() != 4 || t.cols() != 4) throw DimensionError("E(3) elements are 4x4");
  const Mat a = t.bottomRightCorner(3, 3);
  double r = max_abs(a.transpose() * a - Mat::Identity(3, 3));
  r = std::max(r, std::abs(t(0, 0) - 1.0));
  r = std::max(r, max_abs(t.topRightCorner(1, 3)));
  return r;
}

double MatrixGroup::algebra_residual(const Mat& x) const {
  if (metric_) return dupin::algebra_residual(x, *metric_);
  if (x.rows() != 4 || x.cols() != 4) throw DimensionError("e(3) elements are 4x4");
  const Mat w = x.bottomRightCorner(3, 3);
  return std::max(max_abs(x.row(0)), max_abs(w + w.transpose()));
}

Mat MatrixGroup::project(const Mat& x) const {
  if (metric_) return project_to_algebra(x, *metric_);
  Mat p = x;
  p.row(0).setZero();
  const Mat w = x.bottomRightCorner(3, 3);
  p.bottomRightCorner(3, 3) = 0.5 * (w - w.transpose());
  return p;
}

Mat MatrixGroup::inverse(const Mat& t) const {
  if (metric_) {
    const Mat& g = metric_->gram();
    return g.inverse() * t.transpose() * g;
  }
  Mat inv = Mat::Identity(4, 4);
  const Mat at = t.bottomRightCorner(3, 3).transpose();
  inv.bottomRightCorner(3, 3) = at;
  inv.block(1, 0, 3, 1) = -at * t.block(1, 0, 3, 1);
  return inv;
}

double FrameField::max_group_residual() const {
  double worst = 0.0;
  for (const auto& m : frames.data()) worst = std::max(worst, group.group_residual(m));
  return worst;
}

void FrameField::validate(double tol) const {
  for (int i = 0; i < frames.nu(); ++i) {
    for (int j = 0; j < frames.nv(); ++j) {
      const double r = group.group_residual(frames(i, j));
      if (!(r <= tol)) {
        throw MembershipError("frame at grid point (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not in " + group.name() + " (residual " + std::to_string(r) + ")");
      }
    }
  }
}

double MCForm::max_algebra_residual() const {
  double worst = 0.0;
  for (const auto& m : wu.data()) worst = std::max(worst, group.algebra_residual(m));
  for (const auto& m : wv.data()) worst = std::max(worst, group.algebra_residual(m));
  return worst;
}

namespace {

// Derivative of a grid field along u (axis 0) or v (axis 1): fourth-order
// central differences (wrapped when periodic), second order next to edges.
Mat grid_diff(const Grid<Mat>& g, const ParamDomain& d, int axis, int i, int j) {
  const int n = axis == 0 ? g.nu() : g.nv();
  const bool periodic = axis == 0 ? d.periodic_u : d.periodic_v;
  const double h = axis == 0 ? d.du() : d.dv();
  const int k = axis == 0 ? i : j;
  auto at = [&](int idx) -> const Mat& {
    if (periodic) idx = ((idx % n) + n) % n;
    return axis == 0 ? g(idx, j) : g(i, idx);
  };
  if (n >= 5 && (periodic || (k >= 2 && k <= n - 3))) {
    return (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
  }
  if (periodic) return (at(k + 1) - at(k - 1)) / (2.0 * h);
  if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

}  // namespace

MCForm pullback_mc(const FrameField& e, const PullbackOptions& opt) {
  e.validate();
  const ParamDomain& d = e.domain;
  const int nu = e.frames.nu(), nv = e.frames.nv();
  const int n = e.group.dim();
  MCForm w{d, e.group, Grid<Mat>(nu, nv, Mat::Zero(n, n)), Grid<Mat>(nu, nv, Mat::Zero(n, n)), 0.0};
  if (opt.mode == DiffMode::sampler && !e.sampler) {
    throw std::invalid_argument("pullback_mc: sampler mode needs a frame sampler");
  }
  const double hu = opt.relative_step * d.u_range();
  const double hv = opt.relative_step * d.v_range();
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Mat& f = e.frames(i, j);
      Mat du, dv;
      if (opt.mode == DiffMode::grid) {
        du = grid_diff(e.frames, d, 0, i, j);
        dv = grid_diff(e.frames, d, 1, i, j);
      } else {
        const double u = d.u(i), v = d.v(j);
        du = (e.sampler(u + hu, v, f) - e.sampler(u - hu, v, f)) / (2.0 * hu);
        dv = (e.sampler(u, v + hv, f) - e.sampler(u, v - hv, f)) / (2.0 * hv);
      }
      const Mat finv = e.group.inverse(f);
      const Mat ru = finv * du;
      const Mat rv = finv * dv;
      w.wu(i, j) = e.group.project(ru);
      w.wv(i, j) = e.group.project(rv);
      w.discarded = std::max({w.discarded, max_abs(ru - w.wu(i, j)), max_abs(rv - w.wv(i, j))});
    }
  }
  return w;
}

double structure_residual(const MCForm& w, int margin) {
  const ParamDomain& d = w.domain;
  const int nu = w.wu.nu(), nv = w.wu.nv();
  const int i0 = d.periodic_u ? 0 : margin, i1 = d.periodic_u ? nu : nu - margin;
  const int j0 = d.periodic_v ? 0 : margin, j1 = d.periodic_v ? nv : nv - margin;
  double worst = 0.0;
  for (int i = i0; i < i1; ++i) {
    for (int j = j0; j < j1; ++j) {
      const Mat r = grid_diff(w.wv, d, 0, i, j) - grid_diff(w.wu, d, 1, i, j) +
                    bracket(w.wu(i, j), w.wv(i, j));
      worst = std::max(worst, max_abs(r));
    }
  }
  return worst;
}

CongruenceResult congruence_test(const FrameField& e, const FrameField& e_tilde, double tol) {
  if (e.frames.nu() != e_tilde.frames.nu() || e.frames.nv() != e_tilde.frames.nv()) {
    throw DimensionError("congruence_test: frame fields live on different grids");
  }
  if (e.group.dim() != e_tilde.group.dim() || e.group.name() != e_tilde.group.name()) {
    throw DimensionError("congruence_test: frame fields take values in different groups");
  }
  const std::size_t count = e.frames.size();
  std::vector<Mat> gs;
  gs.reserve(count);
  Mat mean = Mat::Zero(e.group.dim(), e.group.dim());
  for (std::size_t k = 0; k < count; ++k) {
    gs.push_back(e_tilde.frames.data()[k] * e.group.inverse(e.frames.data()[k]));
    mean += gs.back();
  }
  mean /= static_cast<double>(count);
  CongruenceResult r;
  for (const auto& g : gs) r.deviation = std::max(r.deviation, max_abs(g - mean));
  r.g = mean;
  r.congruent = r.deviation < tol;
  return r;
}

namespace {

Grid<Mat> integrate_order(const MCForm& eta, const Mat& base, bool rows_first) {
  const ParamDomain& d = eta.domain;
  const int nu = eta.wu.nu(), nv = eta.wu.nv();
  Grid<Mat> e(nu, nv, base);
  auto step_u = [&](int i, int j) {
    e(i + 1, j) = e(i, j) * mat_exp(0.5 * d.du() * (eta.wu(i, j) + eta.wu(i + 1, j)));
  };
  auto step_v = [&](int i, int j) {
    e(i, j + 1) = e(i, j) * mat_exp(0.5 * d.dv() * (eta.wv(i, j) + eta.wv(i, j + 1)));
  };
  if (rows_first) {
    for (int i = 0; i + 1 < nu; ++i) step_u(i, 0);
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j + 1 < nv; ++j) step_v(i, j);
  } else {
    for (int j = 0; j + 1 < nv; ++j) step_v(0, j);
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i + 1 < nu; ++i) step_u(i, j);
  }
  return e;
}

}  // namespace

IntegrationResult integrate_mc(const MCForm& eta, const Mat& base, double integrability_tol) {
  const double flat = structure_residual(eta);
  if (flat > integrability_tol) {
    throw IntegrabilityError("integrate_mc: form is not flat (structure residual " + std::to_string(flat) +
                             " > " + std::to_string(integrability_tol) + ")");
  }
  if (eta.group.group_residual(base) > 1e-8) throw MembershipError("integrate_mc: base is not a group element");
  IntegrationResult out{FrameField{eta.domain, eta.group, integrate_order(eta, base, true), {}}, 0.0, 0.0};
  const Grid<Mat> other = integrate_order(eta, base, false);
  for (std::size_t k = 0; k < other.size(); ++k) {
    out.path_independence = std::max(out.path_independence, max_abs(other.data()[k] - out.field.frames.data()[k]));
  }
  // The integrated field is not periodic even when the grid is.
  // Keep the spacing when switching to a closed interval.
  FrameField open = out.field;
  open.domain.u1 = open.domain.u0 + open.domain.du() * (open.domain.nu - 1);
  open.domain.v1 = open.domain.v0 + open.domain.dv() * (open.domain.nv - 1);
  open.domain.periodic_u = open.domain.periodic_v = false;
  const MCForm back = pullback_mc(open);
  for (std::size_t k = 0; k < back.wu.size(); ++k) {
    out.pullback_residual = std::max({out.pullback_residual, max_abs(back.wu.data()[k] - eta.wu.data()[k]),
                                      max_abs(back.wv.data()[k] - eta.wv.data()[k])});
  }
  return out;
}

double grid_diff4(const Grid<double>& g, const ParamDomain& d, int axis, int i, int j) {
  const int n = axis == 0 ? g.nu() : g.nv();
  const bool periodic = axis == 0 ? d.periodic_u : d.periodic_v;
  const double h = axis == 0 ? d.du() : d.dv();
  const int k = axis == 0 ? i : j;
  auto at = [&](int idx) {
    if (periodic) idx = ((idx % n) + n) % n;
    return axis == 0 ? g(idx, j) : g(i, idx);
  };
  return (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
}

MCForm constant_form(const ParamDomain& d, const MatrixGroup& g, const Mat& x, const Mat& y) {
  d.validate();
  return MCForm{d, g, Grid<Mat>(d.nu, d.nv, x), Grid<Mat>(d.nu, d.nv, y), 0.0};
}

}  // namespace dupin

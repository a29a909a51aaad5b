#include "dupin/indefinite_linalg.hpp"

#include <cmath>
#include <sstream>

namespace dupin {

namespace {

Mat diag_gram(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

Mat epsilon_gram(Space s) {
  switch (s) {
    case Space::R3: return diag_gram({1, 1, 1});
    case Space::R4: return diag_gram({1, 1, 1, 1});
    case Space::R31: return diag_gram({1, 1, 1, -1});
    case Space::R41: return diag_gram({1, 1, 1, 1, -1});
    case Space::R42: return diag_gram({1, 1, 1, 1, -1, -1});
  }
  throw BasisError("unknown space");
}

}  // namespace

std::string to_string(Space s) {
  switch (s) {
    case Space::R3: return "R3";
    case Space::R4: return "R4";
    case Space::R31: return "R31";
    case Space::R41: return "R41";
    case Space::R42: return "R42";
  }
  return "?";
}

std::string to_string(BasisTag b) {
  switch (b) {
    case BasisTag::epsilon: return "epsilon";
    case BasisTag::delta: return "delta";
    case BasisTag::lambda: return "lambda";
  }
  return "?";
}

int space_dim(Space s) { return static_cast<int>(epsilon_gram(s).rows()); }

Mat basis_matrix(Space s, BasisTag tag) {
  const double r = 1.0 / std::sqrt(2.0);
  const int n = space_dim(s);
  Mat p = Mat::Identity(n, n);
  switch (tag) {
    case BasisTag::epsilon:
      return p;
    case BasisTag::delta:
      if (s != Space::R41) throw BasisError("delta basis is only defined on R^{4,1}");
      // d0 = (e4 + e0)/sqrt2, d4 = (e4 - e0)/sqrt2
      p(0, 0) = r; p(4, 0) = r;
      p(0, 4) = -r; p(4, 4) = r;
      return p;
    case BasisTag::lambda:
      if (s != Space::R42) throw BasisError("lambda basis is only defined on R^{4,2}");
      p.setZero();
      p(5, 0) = r; p(0, 0) = r;   // l0 = (e5 + e0)/sqrt2
      p(4, 1) = r; p(1, 1) = r;   // l1 = (e4 + e1)/sqrt2
      p(2, 2) = 1.0;              // l2 = e2
      p(3, 3) = 1.0;              // l3 = e3
      p(4, 4) = r; p(1, 4) = -r;  // l4 = (e4 - e1)/sqrt2
      p(5, 5) = r; p(0, 5) = -r;  // l5 = (e5 - e0)/sqrt2
      return p;
  }
  throw BasisError("unknown basis tag");
}

Metric::Metric(Space space, BasisTag basis) : space_(space), basis_(basis) {
  const Mat p = basis_matrix(space, basis);
  gram_ = p.transpose() * epsilon_gram(space) * p;
  // Clean the 1/sqrt2 round-off; every gram here is integral.
  gram_ = gram_.array().round().matrix();
}

std::pair<int, int> Metric::signature() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(gram_);
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 0) ++pos; else ++neg;
  }
  return {pos, neg};
}

Metric euclidean3() { return Metric(Space::R3); }
Metric moebius_metric() { return Metric(Space::R41, BasisTag::delta); }
Metric lie_metric() { return Metric(Space::R42, BasisTag::lambda); }

double inner(const Vec& u, const Vec& v, const Metric& m) {
  if (u.size() != m.dim() || v.size() != m.dim()) {
    throw DimensionError("inner: vector length does not match metric dimension " +
                         std::to_string(m.dim()));
  }
  return u.dot(m.gram() * v);
}

Vec change_basis(const Vec& x, Space s, BasisTag from, BasisTag to) {
  if (x.size() != space_dim(s)) throw DimensionError("change_basis: wrong vector length");
  const Mat pf = basis_matrix(s, from);
  const Mat pt = basis_matrix(s, to);
  return pt.inverse() * (pf * x);
}

Mat change_basis(const Mat& x, Space s, BasisTag from, BasisTag to) {
  const int n = space_dim(s);
  if (x.rows() != n || x.cols() != n) throw DimensionError("change_basis: wrong matrix size");
  const Mat pf = basis_matrix(s, from);
  const Mat pt = basis_matrix(s, to);
  const Mat c = pt.inverse() * pf;  // coordinates: from -> to
  return c * x * c.inverse();
}

double group_residual(const Mat& t, const Metric& m) {
  if (t.rows() != m.dim() || t.cols() != m.dim()) throw DimensionError("group_residual: size");
  return max_abs(t.transpose() * m.gram() * t - m.gram());
}

double algebra_residual(const Mat& x, const Metric& m) {
  if (x.rows() != m.dim() || x.cols() != m.dim()) throw DimensionError("algebra_residual: size");
  return max_abs(x.transpose() * m.gram() + m.gram() * x);
}

Mat project_to_algebra(const Mat& x, const Metric& m) {
  const Mat& g = m.gram();
  const Mat ginv = g.inverse();
  return 0.5 * (x - ginv * x.transpose() * g);
}

Mat mat_exp(const Mat& x) {
  const Eigen::Index n = x.rows();
  if (x.cols() != n) throw DimensionError("mat_exp: matrix not square");
  if (!x.allFinite()) throw std::invalid_argument("mat_exp: non-finite input");
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Mat a = x / std::ldexp(1.0, squarings);
  // |a| <= 1/4: degree 18 leaves a remainder far below machine epsilon.
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 18; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Vec projective_normalize(const Vec& v) {
  if (v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("projective point needs a nonzero representative");
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  return v / v(best);
}

ProjectivePoint::ProjectivePoint(const Vec& rep) : rep_(projective_normalize(rep)) {}

bool ProjectivePoint::same_as(const ProjectivePoint& other, double tol) const {
  if (other.dim() != dim()) return false;
  // Ties in the normalization can pick different pivots; compare via the
  // rank of [a b] instead of raw coordinates.
  const Vec a = rep_.normalized();
  const Vec b = other.rep_.normalized();
  const double d = std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
  return d <= tol;
}

GroupElement GroupElement::checked(Mat m, const Metric& metric, double tol) {
  const double r = group_residual(m, metric);
  if (r > tol) {
    throw MembershipError("matrix is not in the group of " + to_string(metric.space()) +
                          " (residual " + std::to_string(r) + ")");
  }
  return GroupElement{std::move(m), metric, r};
}

AlgebraElement AlgebraElement::checked(Mat m, const Metric& metric, double tol) {
  const double r = algebra_residual(m, metric);
  if (r > tol) {
    throw MembershipError("matrix is not in the Lie algebra of " + to_string(metric.space()) +
                          " (residual " + std::to_string(r) + ")");
  }
  return AlgebraElement{std::move(m), metric, r};
}

double EntryFunctional::operator()(const Mat& x) const {
  double s = 0.0;
  for (const auto& [idx, coef] : terms) s += coef * x(idx.first, idx.second);
  return s;
}

EntryFunctional EntryFunctional::operator+(const EntryFunctional& o) const {
  EntryFunctional r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

EntryFunctional EntryFunctional::operator-(const EntryFunctional& o) const {
  return *this + o * -1.0;
}

EntryFunctional EntryFunctional::operator*(double k) const {
  EntryFunctional r = *this;
  for (auto& t : r.terms) t.second *= k;
  return r;
}

std::string EntryFunctional::describe() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, coef] : terms) {
    if (!first) os << " + ";
    first = false;
    os << coef << "*w^" << idx.first << "_" << idx.second;
  }
  return os.str();
}

EntryFunctional omega(int a, int b) { return EntryFunctional{{{{a, b}, 1.0}}}; }

AlgebraChart::AlgebraChart(const Metric& m) : metric_(m) {
  const int n = m.dim();
  const Mat ginv = m.gram().inverse();
  // X = G^{-1} K with K skew spans the algebra.
  std::vector<Mat> raw;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Mat k = Mat::Zero(n, n);
      k(a, b) = 1.0;
      k(b, a) = -1.0;
      raw.push_back(ginv * k);
    }
  }
  const int d = static_cast<int>(raw.size());
  // Greedy choice of independent entries in row-major order.
  Mat selected(0, d);
  for (int r = 0; r < n && static_cast<int>(entries_.size()) < d; ++r) {
    for (int c = 0; c < n && static_cast<int>(entries_.size()) < d; ++c) {
      Eigen::RowVectorXd row(d);
      for (int j = 0; j < d; ++j) row(j) = raw[static_cast<std::size_t>(j)](r, c);
      Mat trial(selected.rows() + 1, d);
      trial << selected, row;
      Eigen::FullPivLU<Mat> lu(trial);
      lu.setThreshold(1e-12);
      if (lu.rank() == trial.rows()) {
        selected = trial;
        entries_.push_back({r, c});
      }
    }
  }
  const Mat inv = selected.inverse();  // selected(k, j) = entry_k(raw_j)
  for (int k = 0; k < d; ++k) {
    Mat e = Mat::Zero(n, n);
    for (int j = 0; j < d; ++j) e += inv(j, k) * raw[static_cast<std::size_t>(j)];
    basis_.push_back(e);
  }
}

Vec AlgebraChart::coords(const Mat& x) const {
  Vec c(dim());
  for (int k = 0; k < dim(); ++k) c(k) = x(entries_[static_cast<std::size_t>(k)].first,
                                          entries_[static_cast<std::size_t>(k)].second);
  return c;
}

Mat AlgebraChart::from_coords(const Vec& c) const {
  if (c.size() != dim()) throw DimensionError("AlgebraChart: coordinate length");
  Mat x = Mat::Zero(metric_.dim(), metric_.dim());
  for (int k = 0; k < dim(); ++k) x += c(k) * basis_[static_cast<std::size_t>(k)];
  return x;
}

namespace {

Mat stack_columns(const std::vector<Mat>& elements) {
  if (elements.empty()) return Mat();
  const Eigen::Index n2 = elements.front().size();
  Mat b(n2, static_cast<Eigen::Index>(elements.size()));
  for (std::size_t j = 0; j < elements.size(); ++j) {
    b.col(static_cast<Eigen::Index>(j)) = elements[j].reshaped();
  }
  return b;
}

}  // namespace

double span_residual(const std::vector<Mat>& elements, const Mat& y) {
  if (elements.empty()) return max_abs(y);
  const Mat b = stack_columns(elements);
  const Vec target = y.reshaped();
  const Vec coef = b.colPivHouseholderQr().solve(target);
  return (b * coef - target).cwiseAbs().maxCoeff();
}

double closure_residual(const std::vector<Mat>& elements) {
  double worst = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      worst = std::max(worst, span_residual(elements, bracket(elements[i], elements[j])));
    }
  }
  return worst;
}

SubalgebraBasis subalgebra_from_constraints(const std::vector<EntryFunctional>& constraints,
                                            const Metric& m, double rank_tol) {
  const AlgebraChart chart(m);
  const int d = chart.dim();
  SubalgebraBasis out{m, {}, constraints, 0.0, 0.0};

  Mat kernel;
  if (constraints.empty()) {
    kernel = Mat::Identity(d, d);
  } else {
    Mat a(static_cast<Eigen::Index>(constraints.size()), d);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      for (int l = 0; l < d; ++l) a(static_cast<Eigen::Index>(i), l) = constraints[i](chart.basis(l));
    }
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > rank_tol * scale) ++rank;
    }
    kernel = svd.matrixV().rightCols(d - rank);
  }

  for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
    Mat x = chart.from_coords(kernel.col(j));
    // Deterministic sign: largest-magnitude entry positive.
    Eigen::Index r, c;
    x.cwiseAbs().maxCoeff(&r, &c);
    if (x(r, c) < 0) x = -x;
    out.elements.push_back(x);
  }
  for (const auto& f : constraints) {
    for (const auto& x : out.elements) out.constraint_residual = std::max(out.constraint_residual, std::abs(f(x)));
  }
  out.closure_residual = closure_residual(out.elements);
  return out;
}

}  // namespace dupin

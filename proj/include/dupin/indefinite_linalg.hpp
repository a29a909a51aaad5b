#pragma once

// Exact-signature linear algebra for the small pseudo-Euclidean spaces used
// throughout the library: R^3, R^4, R^{3,1}, R^{4,1} and R^{4,2}.
//
// Coordinates are always stored as Eigen dynamic vectors/matrices (at most
// 6x6).  Index conventions follow the epsilon labelling of R^{4,2}:
//   R^3     -> (e1, e2, e3)
//   R^4     -> (e0, e1, e2, e3)
//   R^{3,1} -> (e1, e2, e3, e4)            e4 timelike
//   R^{4,1} -> (e0, e1, e2, e3, e4)        e4 timelike
//   R^{4,2} -> (e0, e1, e2, e3, e4, e5)    e4, e5 timelike

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dupin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kDefaultTol = 1e-10;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BasisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MembershipError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Space { R3, R4, R31, R41, R42 };

// epsilon: the standard orthonormal basis.
// delta:   the Moebius null basis of R^{4,1}.
// lambda:  the Lie frame basis of R^{4,2}.
enum class BasisTag { epsilon, delta, lambda };

std::string to_string(Space s);
std::string to_string(BasisTag b);

class Metric {
 public:
  // Throws BasisError when the tag is not defined for the space.
  explicit Metric(Space space, BasisTag basis = BasisTag::epsilon);

  Space space() const { return space_; }
  BasisTag basis() const { return basis_; }
  int dim() const { return static_cast<int>(gram_.rows()); }
  const Mat& gram() const { return gram_; }
  // Signature counts (positive, negative).
  std::pair<int, int> signature() const;

  bool operator==(const Metric& o) const { return space_ == o.space_ && basis_ == o.basis_; }

 private:
  Space space_;
  BasisTag basis_;
  Mat gram_;
};

// Commonly used metrics.
Metric euclidean3();
Metric moebius_metric();  // R^{4,1}, delta basis (gram g)
Metric lie_metric();      // R^{4,2}, lambda basis (gram g-hat)

int space_dim(Space s);

// Columns are the basis vectors of `tag` written in epsilon coordinates.
Mat basis_matrix(Space s, BasisTag tag);

double inner(const Vec& u, const Vec& v, const Metric& m);

// Coordinates of the same vector (or linear map) in another basis.
Vec change_basis(const Vec& x, Space s, BasisTag from, BasisTag to);
Mat change_basis(const Mat& x, Space s, BasisTag from, BasisTag to);

// Max-abs entry of T^t G T - G.
double group_residual(const Mat& t, const Metric& m);
// Max-abs entry of X^t G + G X.
double algebra_residual(const Mat& x, const Metric& m);

// Orthogonal projection of an arbitrary matrix onto the Lie algebra of the
// metric's group: X -> (X - G^{-1} X^t G) / 2.
Mat project_to_algebra(const Mat& x, const Metric& m);

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Scaling-and-squaring exponential with a truncated Taylor core.
Mat mat_exp(const Mat& x);

inline Mat bracket(const Mat& x, const Mat& y) { return x * y - y * x; }

// A point of projective space.  The stored representative has its
// largest-magnitude coordinate equal to +1 (ties go to the lowest index).
class ProjectivePoint {
 public:
  explicit ProjectivePoint(const Vec& rep);

  const Vec& rep() const { return rep_; }
  int dim() const { return static_cast<int>(rep_.size()); }

  // Proportionality test via the normalized representatives.
  bool same_as(const ProjectivePoint& other, double tol = 1e-10) const;

 private:
  Vec rep_;
};

Vec projective_normalize(const Vec& v);

struct GroupElement {
  Mat mat;
  Metric metric;
  double residual;

  // Throws MembershipError when residual > tol.
  static GroupElement checked(Mat m, const Metric& metric, double tol = kDefaultTol);
};

struct AlgebraElement {
  Mat mat;
  Metric metric;
  double residual;

  static AlgebraElement checked(Mat m, const Metric& metric, double tol = kDefaultTol);
};

// A linear functional on matrix entries: sum of coef * X(row, col).
// Entry (a, b) is the Maurer-Cartan component omega^a_b.
struct EntryFunctional {
  std::vector<std::pair<std::pair<int, int>, double>> terms;

  double operator()(const Mat& x) const;

  EntryFunctional operator+(const EntryFunctional& o) const;
  EntryFunctional operator-(const EntryFunctional& o) const;
  EntryFunctional operator*(double k) const;
  std::string describe() const;
};

// The functional X -> X(a, b), written omega^a_b.
EntryFunctional omega(int a, int b);

inline EntryFunctional operator*(double k, const EntryFunctional& f) { return f * k; }

// Coordinates on the Lie algebra of a metric's group given by a fixed list of
// independent matrix entries (chosen greedily in row-major order).
class AlgebraChart {
 public:
  explicit AlgebraChart(const Metric& m);

  int dim() const { return static_cast<int>(entries_.size()); }
  const Metric& metric() const { return metric_; }
  const std::vector<std::pair<int, int>>& entries() const { return entries_; }
  // Basis element whose chart coordinates are the k-th unit vector.
  const Mat& basis(int k) const { return basis_[static_cast<std::size_t>(k)]; }

  Vec coords(const Mat& x) const;
  Mat from_coords(const Vec& c) const;

 private:
  Metric metric_;
  std::vector<std::pair<int, int>> entries_;
  std::vector<Mat> basis_;
};

struct SubalgebraBasis {
  Metric metric;
  std::vector<Mat> elements;
  std::vector<EntryFunctional> constraints;
  // Largest residual of projecting a pairwise bracket back onto the span.
  double closure_residual = 0.0;
  // Largest |f(X)| over constraints f and elements X.
  double constraint_residual = 0.0;

  int dim() const { return static_cast<int>(elements.size()); }
};

// Max-abs residual of the bracket of every pair projected onto the span.
double closure_residual(const std::vector<Mat>& elements);

// Residual of projecting y onto span(elements).
double span_residual(const std::vector<Mat>& elements, const Mat& y);

// Basis of {X in algebra : f(X) = 0 for all constraints}.  An inconsistent
// (over-determined) system yields an empty basis.
SubalgebraBasis subalgebra_from_constraints(const std::vector<EntryFunctional>& constraints,
                                            const Metric& m, double rank_tol = 1e-12);

}  // namespace dupin

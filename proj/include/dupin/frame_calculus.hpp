#pragma once

// Numerical Maurer-Cartan calculus on parameter grids: pull back g^{-1} dg,
// check d(omega) + omega ^ omega = 0, compare frame fields, and integrate
// flat algebra-valued forms back into frame fields.

#include "dupin/grid.hpp"
#include "dupin/indefinite_linalg.hpp"

#include <functional>
#include <optional>

namespace dupin {

// Either the Euclidean group E(3) as 4x4 matrices [[1, 0], [y, A]], or the
// pseudo-orthogonal group of a Metric.
class MatrixGroup {
 public:
  static MatrixGroup euclidean();
  static MatrixGroup orthogonal(const Metric& m);

  int dim() const;
  std::string name() const;
  bool is_euclidean() const { return !metric_.has_value(); }
  const Metric& metric() const;

  double group_residual(const Mat& t) const;
  double algebra_residual(const Mat& x) const;
  // Nearest algebra element (orthogonal projection w.r.t. the entrywise inner product
  // for E(3); the metric projection otherwise).
  Mat project(const Mat& x) const;
  Mat inverse(const Mat& t) const;

 private:
  MatrixGroup() = default;
  std::optional<Metric> metric_;
};

// Returns the frame at (u, v), chosen continuously near `reference`
// (used to fix discrete choices such as the sign of a principal direction).
using FrameSampler = std::function<Mat(double u, double v, const Mat& reference)>;

struct FrameField {
  ParamDomain domain;
  MatrixGroup group;
  Grid<Mat> frames;
  FrameSampler sampler;  // optional

  double max_group_residual() const;
  // Throws MembershipError when any element fails the group test.
  void validate(double tol = 1e-8) const;
};

struct MCForm {
  ParamDomain domain;
  MatrixGroup group;
  Grid<Mat> wu;  // coefficient of du
  Grid<Mat> wv;  // coefficient of dv
  // Largest entry removed by projecting the raw derivatives onto the algebra.
  double discarded = 0.0;

  double max_algebra_residual() const;
};

enum class DiffMode {
  grid,     // differences of neighbouring grid frames
  sampler,  // differences of the sampler at a small step around each grid point
};

struct PullbackOptions {
  DiffMode mode = DiffMode::grid;
  // Sampler step relative to the parameter range.
  double relative_step = 1e-5;
};

// omega = e^{-1} de, split into du and dv coefficients.
MCForm pullback_mc(const FrameField& e, const PullbackOptions& opt = {});

// Max-abs entry of d_u w_v - d_v w_u + [w_u, w_v] over the points at least
// `margin` away from a non-periodic boundary.
double structure_residual(const MCForm& w, int margin = 2);

struct CongruenceResult {
  bool congruent = false;
  double deviation = 0.0;  // max-abs deviation of g(m) from the mean
  Mat g;                   // mean of g(m) = e~(m) e(m)^{-1}
};

CongruenceResult congruence_test(const FrameField& e, const FrameField& e_tilde, double tol = 1e-8);

struct IntegrationResult {
  FrameField field;
  double path_independence = 0.0;   // row-first vs column-first integration
  double pullback_residual = 0.0;    // max |pullback_mc(field) - eta|
};

class IntegrabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Path-ordered products of midpoint exponentials: along the first row from
// the base corner, then up every column.  Throws IntegrabilityError when
// structure_residual(eta) exceeds integrability_tol.
IntegrationResult integrate_mc(const MCForm& eta, const Mat& base, double integrability_tol = 1e-2);

// Fourth-order central difference of a scalar grid field along u (axis 0)
// or v (axis 1); wraps when periodic.  Needs two neighbours on each side
// in a non-periodic direction.
double grid_diff4(const Grid<double>& g, const ParamDomain& d, int axis, int i, int j);

// The constant form X du + Y dv on a domain.
MCForm constant_form(const ParamDomain& d, const MatrixGroup& g, const Mat& x, const Mat& y);

}  // namespace dupin

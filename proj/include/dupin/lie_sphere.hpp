#pragma once

// Lie sphere geometry: the Lie quadric in R^{4,2}, lines (pencils of
// oriented spheres), Legendre maps and lifts, curvature spheres of a
// Legendre map, the subalgebra h and its coset orbits.
//
// Vectors of R^{4,2} use epsilon coordinates (e0..e5, with e4, e5
// timelike); Lie frames and their Maurer-Cartan forms use the lambda basis.

#include "dupin/frame_calculus.hpp"
#include "dupin/moebius.hpp"
#include "dupin/surface_geometry.hpp"

#include <array>
#include <functional>
#include <optional>
#include <utility>

namespace dupin {

class LineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class OffQuadricError : public LineError {
 public:
  using LineError::LineError;
};
class NonOrthogonalError : public LineError {
 public:
  using LineError::LineError;
};
class DependentError : public LineError {
 public:
  using LineError::LineError;
};
class DegenerateLineError : public LineError {
 public:
  using LineError::LineError;
};
class TangencyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ImmersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// <x, y> on R^{4,2} in epsilon coordinates.
double lie_inner(const Vec& x, const Vec& y);
// <q, q> / |q|^2 for a nonzero q.
double quadric_residual(const Vec& q);

struct PencilLine {
  Vec S0, S1;  // Euclidean-unit representatives
  double quadric0 = 0.0, quadric1 = 0.0, orthogonality = 0.0;
};

// Throws OffQuadricError, NonOrthogonalError or DependentError.
PencilLine make_line(const Vec& S0, const Vec& S1, double tol = 1e-10);

// S + e5 for a unit S in R^{4,1}, and the natural inclusion of R^{4,1}.
Vec include_sphere(const Vec& S);
Vec include_point(const Vec& q);

// The point sphere on the line, as a vector of R^{4,1}.  Throws
// DegenerateLineError if both spheres are orthogonal to e5.
Vec spherical_projection(const Vec& S0, const Vec& S1);
Vec spherical_projection(const PencilLine& l);

// (S0, S1) at a parameter point, epsilon coordinates of R^{4,2}.
using LineSampler = std::function<std::pair<Vec, Vec>(double u, double v)>;

struct LegendreMap {
  ParamDomain domain;
  Grid<Vec> S0, S1;
  LineSampler sampler;  // optional; derivatives use it when present
  // Sampler step relative to the parameter range.
  double relative_step = 1e-6;
};

// Evaluates a sampler on a domain.
LegendreMap sample_legendre(const ParamDomain& d, const LineSampler& f);

// Derivatives of (S0, S1) at grid point (i, j): {S0_u, S0_v, S1_u, S1_v}.
std::array<Vec, 4> line_derivatives(const LegendreMap& l, int i, int j);

// max over the grid and both directions of |<dS0, S1>| / (|S0| |S1|).
double contact_residual(const LegendreMap& l);
// Largest quadric and orthogonality residuals of the line representatives.
double line_residual(const LegendreMap& l);
// Smallest second singular value of the 4x2 matrix (dS0, dS1) taken mod the
// line, over the grid: zero where the map fails to be an immersion into Lambda.
double min_immersion_rank(const LegendreMap& l);

// (F, S) at a parameter point: a null lift F of f and a unit tangent sphere
// S along it, both in epsilon coordinates of R^{4,1}.
using LiftSampler = std::function<std::pair<Vec, Vec>(double u, double v)>;

// [F, S + e5].  Throws TangencyError when <F, S> or <dF, S> (relative to
// |F| |S| and the parameter step) exceeds tol anywhere on the grid.
LegendreMap legendre_lift(const LiftSampler& fs, const ParamDomain& d, double tol = 1e-8);

// The lift sampler of a surface in R^3 (via f_0) or S^3 (via f_+):
// which = -1 uses the tangent sphere with cot r = 0 (the tangent plane in
// R^3), 0 and 1 the two curvature spheres.
LiftSampler surface_lift(const ParametricSurface& s, int which = -1);

// The explicit Legendre immersion [S0(u), S1(v)] on [0, 2pi)^2.
LineSampler example_sampler();
LegendreMap example_lambda(int nu = 64, int nv = 64);

// Second singular value of d(sigma o lambda) mod the point, maximized over
// the grid, and the largest first singular value.
std::pair<double, double> spherical_projection_rank(const LegendreMap& l);

struct CurvatureSphere {
  Vec K;       // Euclidean-unit representative in the line
  double sigma, tau;  // K ~ sigma S0 + tau S1, sigma^2 + tau^2 = 1
  Eigen::Vector2d dir;  // kernel direction in (u, v), unit
};

struct LegendrePencil {
  std::vector<CurvatureSphere> spheres;  // 0 (complex), 1 (double) or 2
  bool degenerate = false;               // pencil vanishes identically
  bool double_root = false;
};

// Spheres K = sigma S0 + tau S1 with d K dropping rank mod the line.
LegendrePencil legendre_pencil(const Vec& S0, const Vec& S1, const std::array<Vec, 4>& d,
                               double root_tol = 1e-10);

struct LegendreDupinResult {
  bool dupin = false;
  bool degenerate = false;  // some point had a degenerate pencil
  bool umbilic = false;     // some point had a double root
  // Worst |d[K](dir) mod K| over both curvature-sphere fields.
  double max_derivative = 0.0;
  Grid<Vec> K0, K1;  // the two curvature sphere fields (branch-matched)
  double tolerance = 0.0;
};

LegendreDupinResult legendre_dupin_test(const LegendreMap& l, double tol = 1e-4);

// The 6-dimensional subalgebra h annihilated by the nine order functionals.
std::vector<EntryFunctional> h_constraints();
SubalgebraBasis h_basis();

// The paper's cosh/sinh boost in the lambda basis: diag(e^t, 1, 1, 1, 1, e^-t).
Mat boost(double t);

// The Lie frame of the explicit example at (u, v), lambda basis.
Mat example_frame(double u, double v);
// Its Maurer-Cartan form is the constant Omega_u du + Omega_v dv.
std::pair<Mat, Mat> example_slice();

// A E exp(s Omega_u + t Omega_v) o with E = example_frame(0, 0) and
// o = [lambda_0, lambda_1].  Throws ImmersionError if the slice does not
// immerse on the grid.
LegendreMap coset_orbit(const Mat& A, const ParamDomain& d);
ParamDomain default_orbit_domain(int ns = 64, int nt = 64);

struct Fig7Result {
  double t = 0.0;
  ParamDomain domain;
  Grid<Vec> sphere;     // spherical projection in S^3 (via f_+^{-1})
  Grid<Vec> points;     // stereographic image in R^3 (where defined)
  Grid<char> singular;  // first fundamental form determinant below rank_tol
  std::vector<GridIndex> singular_points;
  bool degenerate = false;  // every point singular: the image is a curve
  double rank_tol = 0.0;
};

Fig7Result fig7_pipeline(double t, int ns = 64, int nt = 64, double rank_tol = 1e-10);

struct LieCoefficients {
  Grid<double> p, q, t, u, c2, c3, d2, d3;
  Grid<Eigen::Matrix2d> coframe;  // rows: theta^2, theta^3 as (du, dv) coefficients
  double order1 = 0.0, order2 = 0.0, order3 = 0.0;
  double fit_residual = 0.0;     // two estimates of p and of q
  double exterior1 = 0.0, exterior2 = 0.0;
  double min_coframe_det = 0.0;  // |theta^2 ^ theta^3|
};

// Throws OrderError when [T0], [T1] are not the curvature spheres (order-1
// residual above order_tol) or theta^2 ^ theta^3 vanishes.
LieCoefficients best_lie_frame_check(const FrameField& T, double order_tol = 1e-6,
                                     const PullbackOptions& opt = {DiffMode::sampler, 1e-5});

// Example frame field on a domain, optionally left-translated by A.
FrameField example_frame_field(const ParamDomain& d, const Mat& A = Mat::Identity(6, 6));

}  // namespace dupin

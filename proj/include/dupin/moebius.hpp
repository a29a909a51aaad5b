#pragma once

// Oriented spheres, tangent and curvature sphere maps, Moebius frames and
// their order conditions, the invariant C, and the subalgebras h_C with
// their orbit surfaces.
//
// Vectors of R^{4,1} use epsilon coordinates unless the name says delta;
// Moebius group elements and Maurer-Cartan forms use the delta basis.

#include "dupin/frame_calculus.hpp"
#include "dupin/surface_geometry.hpp"

#include <optional>

namespace dupin {

class OrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OrientedSphere {
  Vec m;     // unit vector of R^4
  double r;  // signed radius in (0, pi)
};

// S_r(m) <-> (m + cos r e4) / sin r, so that cot r = s^4.
Vec sphere_to_vec(const OrientedSphere& s);
OrientedSphere vec_to_sphere(const Vec& S);

// cot r (x + e4) + e3.
Vec tangent_sphere(const Vec& x, const Vec& e3, double r);
Vec tangent_sphere_cot(const Vec& x, const Vec& e3, double cot_r);

// Grids along a surface in S^3: point reps x + e4, and the tangent sphere
// maps with a fixed radius or with cot r equal to a principal curvature.
Grid<Vec> point_field(const ParametricSurface& s);
Grid<Vec> tangent_sphere_field(const ParametricSurface& s, double r);
// which = 0 for the a-branch, 1 for the c-branch.
Grid<Vec> curvature_sphere_field(const ParametricSurface& s, int which);

struct PencilRoots {
  std::vector<double> roots;  // real roots r, ascending
  bool complex_roots = false;
  bool double_root = false;
  bool degenerate = false;  // pencil vanishes identically: totally umbilic
};

// Roots r of (w^1_3 + r w^1_0) ^ (w^2_3 + r w^2_0) = 0 at a point, given
// the du and dv coefficients of a first-order frame's Maurer-Cartan form.
PencilRoots curvature_sphere_params(const Mat& wu, const Mat& wv, double double_root_tol = 1e-12);

struct SphereMapDupinResult {
  bool dupin = false;
  bool degenerate = false;  // dS vanishes identically (constant map)
  double max_second_singular = 0.0;
  double min_second_singular = 0.0;
  double max_first_singular = 0.0;
};

// Rank test of dS mod (x + e4) on a grid of sphere vectors S and point reps X.
SphereMapDupinResult sphere_map_dupin_test(const Grid<Vec>& S, const Grid<Vec>& X, const ParamDomain& d,
                                           double rank_tol = 1e-6);

// Frames built from a canonical surface's space-form frame (x, e1, e2, e3):
// the basic frame F(x, e) and the best frame F(x, e) N(mu e3) D(k).
struct MoebiusFrameBuild {
  FrameField field;     // Moebius group, delta basis
  double beta = 0.0;    // w^i_0 = beta theta^i for the basic frame
  double gamma = 0.0;   // w^0_i = gamma theta^i for the basic frame
  double kappa1 = 0.0;  // principal curvature along e1 (after any flip)
  double kappa2 = 0.0;
  bool swapped = false;  // e1 <-> e2, e3 -> -e3
  bool flipped = false;  // e1, e3 negated for w^1_0 ^ w^2_0 > 0
};

// s must be in S^3, R^3 or H^3 and nonumbilic unless basic_only is set.
// swapped uses the frame (e2, e1, -e3), which changes C to -C.
MoebiusFrameBuild basic_moebius_frame(const ParametricSurface& s, bool swapped = false);
MoebiusFrameBuild best_moebius_frame(const ParametricSurface& s, bool swapped = false);

struct MoebiusCoefficients {
  Grid<double> q1, q2, p1, p2, p3;
  // Residuals of the order conditions.
  double first_order = 0.0;   // |w^3_0|
  double second_order = 0.0;  // |w^3_1 - w^1_0|, |w^3_2 + w^2_0|
  double third_order = 0.0;   // |w^0_3|
  bool positive = true;       // w^1_0 ^ w^2_0 > 0 everywhere
  // Fit residuals of the over-determined coefficient relations.
  double fit_residual = 0.0;
  // The two complex integrability equations.
  double integrability1 = 0.0;
  double integrability2 = 0.0;
  // Summary values.
  double max_q = 0.0, max_p2 = 0.0, max_p1p3 = 0.0;  // |q1|,|q2|; |p2|; |p1+p3+1|
  double C = 0.0;        // mean of (p1 - p3)/2
  double C_spread = 0.0; // max - min of (p1 - p3)/2
  bool dupin = false;
};

// Throws OrderError when the frame is not first order (|w^3_0| > order_tol).
MoebiusCoefficients frame_order_check(const FrameField& Y, double order_tol = 1e-6,
                                      const PullbackOptions& opt = {DiffMode::sampler, 1e-5});

// Basis {X, Y} of h_C with X dual to w^1_0 and Y dual to w^2_0.
SubalgebraBasis hC_basis(double C);
std::vector<EntryFunctional> hC_constraints(double C);

enum class Regime { torus, cylinder, hyperboloid };
std::string to_string(Regime r);
Regime regime_of(double C, double tol = 1e-9);

// The canonical surface of the regime (torus(alpha), cylinder(1),
// hyperboloid(a)) and whether its frame is swapped (C < 0).
struct CanonicalForC {
  Regime regime;
  ParametricSurface surface;
  bool swapped;
  double parameter;  // alpha, radius or a
};
CanonicalForC canonical_for_C(double C);

struct HCOrbit {
  double C = 0.0;
  Regime regime = Regime::torus;
  Form form = Form::sphere;
  ParamDomain domain;          // (s, t)
  Mat X, Y;                    // h_C basis, delta basis
  Mat placement;               // A_C: moves H_C[delta_0] onto the canonical surface
  Grid<Vec> raw;               // exp(sX) exp(tY) delta_0, epsilon coords
  Grid<Vec> placed;            // A_C applied
  Grid<char> chart_ok;         // placed point lies in the chart of f^{-1}
  Grid<Vec> space_form;        // f^{-1}(placed), where chart_ok
  std::vector<GridIndex> excluded;
  // A_C exp(sX + tY), delta basis, for frames and sphere maps.
  Mat frame(double s, double t) const;
  ParametricSurface surface() const;  // (s, t) -> f^{-1}(placed point); finite differences
};

HCOrbit hC_orbit(double C, int ns = 64, int nt = 64);

// Residual of orbit(-C)(s, t) = P orbit(C)(t, s) for the signed permutation P
// (delta1 <-> delta2, delta3 -> -delta3), over the raw orbits on a grid.
double pm_C_congruence_residual(double C, int n = 16);
Mat pm_C_permutation();

// Distance from the best-fit axis after principal-axes alignment, as
// (max |dist - radius|, fitted radius).
std::pair<double, double> axis_distance_test(const std::vector<Vec>& pts, double radius = 1.0);

}  // namespace dupin

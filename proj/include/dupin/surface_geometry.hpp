#pragma once

// Parametric surfaces in the space forms: fundamental forms, principal
// curvatures, isoparametric / Dupin classification, the canonical surfaces,
// Euclidean best frames and the Dupin PDE residuals.

#include "dupin/frame_calculus.hpp"
#include "dupin/grid.hpp"
#include "dupin/hyperdual.hpp"
#include "dupin/space_forms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dupin {

using HDVec = std::vector<HyperDual>;
using ExactMap = std::function<HDVec(const HyperDual&, const HyperDual&)>;
using PositionMap = std::function<Vec(double, double)>;
using GridIndex = std::pair<int, int>;

class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UmbilicError : public std::domain_error {
 public:
  UmbilicError(const std::string& msg, std::vector<GridIndex> pts)
      : std::domain_error(msg), points(std::move(pts)) {}
  std::vector<GridIndex> points;
};

struct ParametricSurface {
  std::string name;
  std::map<std::string, double> params;
  Form form = Form::euclidean;
  ParamDomain domain;
  ExactMap exact;          // optional: exact partials by hyper-dual evaluation
  PositionMap position_fn; // always set
  // Global sign applied to the natural normal so that the mean curvature
  // is >= 0 at the base corner (u0, v0).
  double normal_sign = 1.0;

  bool analytic() const { return static_cast<bool>(exact); }
  int ambient_dim() const { return form == Form::euclidean ? 3 : 4; }
  Vec position(double u, double v) const { return position_fn(u, v); }
  // Max over the grid of the space-form constraint residual.
  double constraint_residual() const;
};

// Canonical catalog.  Throw std::invalid_argument for parameters out of range.
ParametricSurface torus(double alpha);          // S^3, 0 < alpha <= pi/4
ParametricSurface hyperboloid(double a);        // H^3, 0 < a < 1
ParametricSurface cylinder(double radius);      // R^3, radius > 0
ParametricSurface sphere_patch(double radius = 1.0);  // R^3, umbilic everywhere
// Stereographic torus(alpha) scaled radially by (1 + amplitude sin u): not Dupin.
ParametricSurface warped_stereo_torus(double alpha, double amplitude);

// A surface known only through its positions (derivatives by finite differences).
ParametricSurface from_positions(std::string name, Form form, ParamDomain domain, PositionMap f);

enum class ProjectionMap { identity, stereo, hyp_stereo };
std::string to_string(ProjectionMap m);
ProjectionMap projection_from_string(const std::string& s);

// Compose with a conformal map into R^3; exact partials are carried through
// the composition when the input has them.
ParametricSurface pushforward(const ParametricSurface& s, ProjectionMap map);

// Resolves normal_sign (mean curvature >= 0 at the base corner).
void orient(ParametricSurface& s);

struct SurfaceJet {
  Vec x, xu, xv, xuu, xuv, xvv;
};

SurfaceJet jet(const ParametricSurface& s, double u, double v);

// Ambient inner product of the surface's space form.
double ambient_inner(Form f, const Vec& a, const Vec& b);

struct FundamentalForms {
  Eigen::Matrix2d I;
  Eigen::Matrix2d II;
  Vec x;
  Vec normal;
  Vec xu, xv;
};

// Throws SingularPointError when det I <= rank_tol * (trace I / 2)^2.
FundamentalForms fundamental_forms(const ParametricSurface& s, double u, double v, double rank_tol = 1e-8);

struct CurvatureData {
  double a = 0.0, c = 0.0;   // a <= c
  Eigen::Vector2d dir_a;     // parameter-space directions, unit in I
  Eigen::Vector2d dir_c;
  bool umbilic = false;
};

CurvatureData curvature(const FundamentalForms& ff, double umbilic_tol = 1e-6);
CurvatureData curvature(const ParametricSurface& s, double u, double v, double umbilic_tol = 1e-6);

enum class Verdict { yes, no, undefined };
std::string to_string(Verdict v);

struct ClassifyOptions {
  // Negative values select the defaults: 1e-6 with exact partials, 1e-3 otherwise.
  double iso_tol = -1.0;
  double dupin_tol = -1.0;
  double rank_tol = 1e-8;
  double umbilic_tol = 1e-6;
  double arc_step = 1e-3;
};

struct ClassifyResult {
  bool isoparametric = false;
  Verdict dupin = Verdict::undefined;
  std::vector<GridIndex> umbilic_points;
  std::vector<GridIndex> singular_points;
  double a_min = 0, a_max = 0, c_min = 0, c_max = 0;
  double max_dupin_derivative = 0.0;  // over both curvatures and all regular points
  double iso_tol = 0.0, dupin_tol = 0.0;
  bool analytic = false;
  std::vector<std::string> warnings;
};

ClassifyResult classify(const ParametricSurface& s, const ClassifyOptions& opt = {});

// Derivative of the chosen principal curvature (0 = a, 1 = c) along its own
// line of curvature, by RK4 steps of arc length h in both directions.
double curvature_line_derivative(const ParametricSurface& s, double u, double v, int which, double h = 1e-3);

struct EuclideanBestFrame {
  FrameField field;  // E(3): [[1, 0], [x, (e1 e2 e3)]]
  Grid<double> a, c;
};

// e1, e2 principal (a <= c), e3 = normal, sign of e1 propagated from the
// base corner.  Throws UmbilicError listing offending points.
EuclideanBestFrame euclidean_best_frame(const ParametricSurface& s, double umbilic_tol = 1e-6);

struct DupinPDEReport {
  // |a_1|, |a_2 - p(a - c)| etc. over interior points.
  double a1 = 0, c2 = 0;
  double eq1 = 0, eq2 = 0, eq3 = 0;
  // Max of the three PDE residuals in 1-form form: max(|a1|, eq1), max(|c2|, eq2), eq3.
  double r1 = 0, r2 = 0, r3 = 0;
  // Frame conditions theta^3 = 0, omega^3_1 = a theta^1, omega^3_2 = c theta^2.
  double theta3 = 0, omega31 = 0, omega32 = 0;
  double max() const { return std::max({r1, r2, r3}); }
};

DupinPDEReport dupin_pde_residual(const EuclideanBestFrame& bf, const PullbackOptions& opt = {DiffMode::sampler, 1e-5});

}  // namespace dupin

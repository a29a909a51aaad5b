#include "dupin/commands.hpp"

#include "dupin/lie_sphere.hpp"
#include "dupin/moebius.hpp"
#include "dupin/space_forms.hpp"
#include "dupin/surface_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

namespace dupin {

namespace {

constexpr double kPi = std::numbers::pi;

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void write_outputs(CommandOutput& out, const CommandContext& ctx, const std::string& name, const Mesh* mesh,
                   const std::string& comment = "") {
  if (mesh) {
    out.mesh_path = join_path(ctx.out_dir, name + ".obj");
    atomic_write(out.mesh_path, to_obj(*mesh, comment));
    out.report.info("mesh_file", name + ".obj");
  }
  out.report_path = join_path(ctx.out_dir, name + ".json");
  atomic_write(out.report_path, out.report.dump());
}

std::string grid_string(std::pair<int, int> g) { return std::to_string(g.first) + "x" + std::to_string(g.second); }

// Points of a surface on its grid, mapped into R^3 by `to_r3`; points the
// map rejects are flagged.
template <class F>
Grid<Vec> sample_points(const ParamDomain& d, F to_r3, Grid<char>& flagged) {
  Grid<Vec> pts(d.nu, d.nv);
  flagged = Grid<char>(d.nu, d.nv, 0);
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      try {
        pts(i, j) = to_r3(i, j);
      } catch (const PoleError&) {
        flagged(i, j) = 1;
      } catch (const ChartError&) {
        flagged(i, j) = 1;
      }
    }
  }
  return pts;
}

ParametricSurface make_canonical(const std::string& surface, double parameter) {
  if (!std::isfinite(parameter)) throw std::invalid_argument("parameter must be finite");
  if (surface == "torus") return torus(parameter);
  if (surface == "hyperboloid") return hyperboloid(parameter);
  if (surface == "cylinder") return cylinder(parameter);
  throw std::invalid_argument("unknown surface '" + surface + "' (expected torus, hyperboloid or cylinder)");
}

Vec to_r3(const Vec& x, Form form) {
  switch (form) {
    case Form::euclidean: return x;
    case Form::sphere: return stereo(x);
    case Form::hyperbolic: return hyp_stereo(x);
  }
  return x;
}

// Residual of the defining equations of the canonical surface of an orbit.
double on_canonical_surface(const Vec& x, const CanonicalForC& can) {
  switch (can.regime) {
    case Regime::torus:
      return std::max(std::abs(x.head(2).norm() - std::cos(can.parameter)),
                      std::abs(x.tail(2).norm() - std::sin(can.parameter)));
    case Regime::cylinder:
      return std::abs(x.head(2).norm() - can.parameter);
    case Regime::hyperboloid: {
      const double a = can.parameter, b = std::sqrt(1.0 - a * a);
      return std::max(std::abs(x.head(2).norm() - a / b), std::abs(x(3) * x(3) - x(2) * x(2) - 1.0 / (b * b)));
    }
  }
  return 0.0;
}

}  // namespace

const std::vector<std::string>& tolerance_names() {
  static const std::vector<std::string> names = {
      "curvature_identity", "curvature_value", "dupin_derivative", "sphere_roundtrip", "chart_roundtrip",
      "order",              "invariant_C",     "closure",          "on_surface",       "axis",
      "congruence",         "structure",       "structure_ratio",  "contact",          "quadric",
      "rank",               "legendre_dupin",  "singular_rank",    "integrate"};
  return names;
}

CommandContext CommandContext::make(const std::string& config_path, const std::string& out_dir) {
  CommandContext c;
  c.config = Config::load(config_path.empty() ? Config::default_path() : config_path);
  c.out_dir = resolve_output_dir(out_dir, c.config);
  c.seed = static_cast<unsigned>(c.config.get_int("seed", 12345));
  return c;
}

double CommandContext::tol(const std::string& name) const {
  if (const auto it = tol_overrides.find(name); it != tol_overrides.end()) return it->second;
  const std::string key = "tol." + name;
  if (!config.has(key)) throw ConfigError("no tolerance '" + name + "' in config or on the command line");
  return config.get_double(key, 0.0);
}

std::pair<int, int> CommandContext::grid_or(const std::string& config_key) const {
  if (grid) return *grid;
  return parse_grid(config.get(config_key, "64x64"));
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("grid must look like NxM, got '" + s + "'");
  try {
    std::size_t p1 = 0, p2 = 0;
    const std::string a = s.substr(0, x), b = s.substr(x + 1);
    const int n = std::stoi(a, &p1), m = std::stoi(b, &p2);
    if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing characters");
    if (n < 5 || m < 5 || n > 4096 || m > 4096) throw std::invalid_argument("out of range");
    return {n, m};
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must look like NxM with 5 <= N, M <= 4096, got '" + s + "'");
  }
}

CommandOutput cmd_gen(const CommandContext& ctx, const std::string& surface, double parameter,
                      const std::string& projection, const std::string& name) {
  CommandOutput out("gen");
  ParametricSurface base = make_canonical(surface, parameter);
  const auto g = ctx.grid_or("grid");
  base.domain = base.domain.with_grid(g.first, g.second);

  ProjectionMap map = ProjectionMap::identity;
  if (projection == "auto") {
    map = base.form == Form::sphere ? ProjectionMap::stereo
          : base.form == Form::hyperbolic ? ProjectionMap::hyp_stereo
                                          : ProjectionMap::identity;
  } else {
    map = projection_from_string(projection);
  }
  if (map == ProjectionMap::identity && base.form != Form::euclidean) {
    throw std::invalid_argument(surface + " lives in " + to_string(base.form) +
                                "; choose --project stereo or hyp_stereo to obtain a mesh in R^3");
  }
  const ParametricSurface surf = pushforward(base, map);

  Report& r = out.report;
  r.param("surface", surface);
  r.param("parameter", parameter);
  r.param("projection", to_string(map));
  r.param("grid", grid_string(g));
  r.info("space_form", to_string(base.form));

  // Curvature identities on the space-form surface.
  const ParamDomain& d = base.domain;
  std::vector<double> av, cv;
  double ident = 0.0, cval = 0.0;
  for (int i = 0; i < d.nu; ++i) {
    for (int j = 0; j < d.nv; ++j) {
      const CurvatureData cd = curvature(base, d.u(i), d.v(j));
      if (surface == "torus") ident = std::max(ident, std::abs(cd.a * cd.c + 1.0));
      if (surface == "hyperboloid") ident = std::max(ident, std::abs(cd.a * cd.c - 1.0));
      if (surface == "cylinder") {
        ident = std::max(ident, std::abs(cd.a * cd.c));
        cval = std::max(cval, std::abs(cd.c - 1.0 / parameter));
      }
    }
  }
  const std::string identity_name = surface == "torus" ? "ac_plus_1" : surface == "hyperboloid" ? "ac_minus_1" : "ac";
  r.residual(identity_name, ident, ctx.tol("curvature_identity"));
  if (surface == "cylinder") r.residual("c_minus_inverse_radius", cval, ctx.tol("curvature_identity"));

  const ClassifyResult cr = classify(surf, {.dupin_tol = ctx.tol("dupin_derivative")});
  r.verdict("isoparametric", cr.isoparametric);
  r.info("dupin", to_string(cr.dupin));
  r.residual("curvature_line_derivative", cr.max_dupin_derivative, cr.dupin_tol);
  r.info("principal_curvature_range", std::vector<double>{cr.a_min, cr.a_max, cr.c_min, cr.c_max});
  for (const auto& w : cr.warnings) r.warn(w);

  Grid<char> flagged;
  const Grid<Vec> pts = sample_points(d, [&](int i, int j) { return surf.position(d.u(i), d.v(j)); }, flagged);
  Mesh mesh = grid_mesh(pts, d, &flagged);
  for (const auto& [i, j] : mesh.grid_index) {
    const CurvatureData cd = curvature(surf, d.u(i), d.v(j));
    av.push_back(cd.a);
    cv.push_back(cd.c);
  }
  mesh.scalars["kappa_a"] = av;
  mesh.scalars["kappa_c"] = cv;
  r.info("vertices", mesh.vertices.size());
  r.info("faces", mesh.faces.size());
  out.exit_code = r.passed() ? 0 : 1;
  write_outputs(out, ctx, name.empty() ? "gen_" + surface : name, &mesh, surf.name);
  return out;
}

CommandOutput cmd_orbit(const CommandContext& ctx, double C, const std::string& name) {
  CommandOutput out("orbit");
  if (!std::isfinite(C)) throw std::invalid_argument("C must be finite");
  const auto g = ctx.grid_or("grid");
  const HCOrbit o = hC_orbit(C, g.first, g.second);
  const CanonicalForC can = canonical_for_C(C);
  Report& r = out.report;
  r.param("C", C);
  r.param("grid", grid_string(g));
  r.info("regime", to_string(o.regime));
  r.info("space_form", to_string(o.form));
  r.info("canonical_surface", can.surface.name);
  r.info("canonical_parameter", can.parameter);
  r.verdict("swapped_frame", can.swapped);

  const SubalgebraBasis b = hC_basis(C);
  r.expect("hC_dimension", b.dim(), 2, 0.0);
  r.residual("hC_closure", b.closure_residual, ctx.tol("closure"));
  r.residual("hC_constraints", b.constraint_residual, ctx.tol("closure"));

  double on = 0.0;
  std::vector<Vec> pts3;
  for (int i = 0; i < o.domain.nu; ++i)
    for (int j = 0; j < o.domain.nv; ++j)
      if (o.chart_ok(i, j)) {
        on = std::max(on, on_canonical_surface(o.space_form(i, j), can));
        pts3.push_back(o.space_form(i, j));
      }
  r.residual("on_canonical_surface", on, ctx.tol("on_surface"));
  if (o.regime == Regime::cylinder) {
    const auto [dev, radius] = axis_distance_test(pts3, 1.0);
    r.residual("axis_distance", dev, ctx.tol("axis"));
    r.info("fitted_radius", radius);
  }
  r.info("excluded_points", o.excluded.size());

  // The orbit frame recovers C through the Moebius order conditions.
  const HCOrbit copy = o;
  FrameSampler sampler = [copy](double s, double t, const Mat&) { return copy.frame(s, t); };
  FrameField field{o.domain, MatrixGroup::orthogonal(moebius_metric()), Grid<Mat>(o.domain.nu, o.domain.nv), sampler};
  for (int i = 0; i < o.domain.nu; ++i)
    for (int j = 0; j < o.domain.nv; ++j) field.frames(i, j) = o.frame(o.domain.u(i), o.domain.v(j));
  const MoebiusCoefficients mc = frame_order_check(field, ctx.tol("order"));
  r.expect("recovered_C", mc.C, C, ctx.tol("invariant_C"));
  r.residual("order_q", mc.max_q, ctx.tol("order"));
  r.residual("order_p2", mc.max_p2, ctx.tol("order"));
  r.residual("p1_plus_p3_plus_1", mc.max_p1p3, ctx.tol("order"));

  Grid<char> flagged;
  const Grid<Vec> pts = sample_points(
      o.domain,
      [&](int i, int j) {
        if (!o.chart_ok(i, j)) throw ChartError("outside chart");
        return to_r3(o.space_form(i, j), o.form);
      },
      flagged);
  const Mesh mesh = grid_mesh(pts, o.domain, &flagged);
  r.info("vertices", mesh.vertices.size());
  r.info("faces", mesh.faces.size());
  out.exit_code = r.passed() ? 0 : 1;
  char buf[64];
  std::snprintf(buf, sizeof buf, "orbit_C%.6g", C);
  write_outputs(out, ctx, name.empty() ? buf : name, &mesh, "h_C orbit, C = " + std::to_string(C));
  return out;
}

CommandOutput cmd_fig7(const CommandContext& ctx, double t, const std::string& name) {
  CommandOutput out("fig7");
  if (!std::isfinite(t)) throw std::invalid_argument("t must be finite");
  const auto g = ctx.grid_or("grid");
  if (g.first % 4 != 0) {
    out.messages.push_back("note: grid sizes not divisible by 4 miss the singular parameter rows");
  }
  const Fig7Result f = fig7_pipeline(t, g.first, g.second, ctx.tol("singular_rank"));
  Report& r = out.report;
  r.param("t", t);
  r.param("grid", grid_string(g));
  const LegendreMap l = coset_orbit(boost(t), default_orbit_domain(g.first, g.second));
  r.residual("contact", contact_residual(l), ctx.tol("contact"));
  r.residual("quadric", line_residual(l), ctx.tol("quadric"));
  const auto [X, Y] = example_slice();
  const SubalgebraBasis h = h_basis();
  r.residual("slice_in_h", std::max(span_residual(h.elements, X), span_residual(h.elements, Y)), ctx.tol("closure"));

  nlohmann::json sing = nlohmann::json::array();
  for (const auto& [i, j] : f.singular_points) sing.push_back({i, j});
  r.json()["singular_points"] = sing;
  r.info("singular_count", f.singular_points.size());
  r.verdict("degenerate", f.degenerate);
  if (f.degenerate) {
    const std::string msg = "degenerate: the spherical projection has rank <= 1 everywhere (a great circle)";
    r.warn(msg);
    out.messages.push_back("warning: " + msg);
  }
  const Mesh mesh = grid_mesh(f.points, f.domain, &f.singular);
  r.info("vertices", mesh.vertices.size());
  r.info("faces", mesh.faces.size());
  char buf[64];
  std::snprintf(buf, sizeof buf, "fig7_t%.6g", t);
  write_outputs(out, ctx, name.empty() ? buf : name, &mesh, "coset surface, t = " + std::to_string(t));
  out.exit_code = r.passed() ? 0 : 1;
  return out;
}

// ---------------------------------------------------------------------------
// verification suites

namespace {

void verify_spaceforms(const CommandContext& ctx, Report& r) {
  std::mt19937 rng(ctx.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  double st = 0.0, hy = 0.0, lift = 0.0;
  for (int k = 0; k < 200; ++k) {
    Vec y(3);
    for (int i = 0; i < 3; ++i) y(i) = n01(rng);
    st = std::max(st, (stereo(stereo_inv(y)) - y).norm() / (1.0 + y.norm()));
    const Vec yb = 0.9 * y / (1.0 + y.norm());  // inside the unit ball
    hy = std::max(hy, (hyp_stereo(hyp_stereo_inv(yb)) - yb).norm());
    for (Form f : {Form::euclidean, Form::sphere, Form::hyperbolic}) {
      SpaceFormPoint p{f, f == Form::euclidean ? y : f == Form::sphere ? stereo_inv(y) : hyp_stereo_inv(yb)};
      const SpaceFormPoint back = moebius_to_form(moebius_lift(p), f);
      lift = std::max(lift, (back.coords - p.coords).norm() / (1.0 + p.coords.norm()));
    }
  }
  const double tol = ctx.tol("chart_roundtrip");
  r.residual("spaceforms.stereo_roundtrip", st, tol);
  r.residual("spaceforms.hyp_stereo_roundtrip", hy, tol);
  r.residual("spaceforms.moebius_chart_roundtrip", lift, tol);
}

void verify_surfaces(const CommandContext& ctx, Report& r) {
  const double tol = ctx.tol("curvature_identity");
  double t = 0.0, h = 0.0, c0 = 0.0, c1 = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double alpha = k * (kPi / 4) / 20.0;
    const double a = k / 21.0;
    const ParametricSurface ts = torus(alpha), hs = hyperboloid(a);
    for (double u : {0.1, 1.3, 2.9})
      for (double v : {0.2, 2.2, 4.1}) {
        const CurvatureData ct = curvature(ts, u, v);
        t = std::max(t, std::abs(ct.a * ct.c + 1.0));
        const CurvatureData ch = curvature(hs, u, v * 0.2);
        h = std::max(h, std::abs(ch.a * ch.c - 1.0));
      }
  }
  for (double R : {0.5, 1.0, 2.5}) {
    const CurvatureData cc = curvature(cylinder(R), 0.7, 0.3);
    c0 = std::max(c0, std::abs(cc.a * cc.c));
    c1 = std::max(c1, std::abs(cc.c - 1.0 / R));
  }
  r.residual("surfaces.torus_ac_plus_1", t, tol);
  r.residual("surfaces.hyperboloid_ac_minus_1", h, tol);
  r.residual("surfaces.cylinder_ac", c0, tol);
  r.residual("surfaces.cylinder_c_minus_inverse_radius", c1, tol);

  const CurvatureData c6 = curvature(torus(kPi / 6), 0.4, 1.1);
  r.expect("surfaces.torus_pi_6_a", c6.a, -std::tan(kPi / 6), ctx.tol("curvature_value"));
  r.expect("surfaces.torus_pi_6_c", c6.c, 1.0 / std::tan(kPi / 6), ctx.tol("curvature_value"));

  ParametricSurface fig1 = pushforward(torus(kPi / 4), ProjectionMap::stereo);
  fig1.domain = fig1.domain.with_grid(128, 128);
  const ClassifyResult cr = classify(fig1, {.dupin_tol = ctx.tol("dupin_derivative")});
  r.verdict("surfaces.figure1_isoparametric", cr.isoparametric);
  r.verdict("surfaces.figure1_dupin", cr.dupin == Verdict::yes);
  r.residual("surfaces.figure1_curvature_line_derivative", cr.max_dupin_derivative, cr.dupin_tol);
  r.expect("surfaces.figure1_not_isoparametric", cr.isoparametric ? 1.0 : 0.0, 0.0, 0.0);

  ParametricSurface warped = warped_stereo_torus(kPi / 4, 0.1);
  warped.domain = warped.domain.with_grid(32, 32);
  const ClassifyResult wr = classify(warped, {.dupin_tol = ctx.tol("dupin_derivative")});
  r.verdict("surfaces.warped_torus_dupin", wr.dupin == Verdict::yes);
  r.expect("surfaces.warped_torus_rejected", wr.dupin == Verdict::no ? 1.0 : 0.0, 1.0, 0.0);
}

void verify_moebius(const CommandContext& ctx, Report& r) {
  std::mt19937 rng(ctx.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> ur(0.01, kPi - 0.01);
  double sph = 0.0, cot = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Vec m(4);
    for (int i = 0; i < 4; ++i) m(i) = n01(rng);
    m.normalize();
    const double rad = ur(rng);
    const Vec S = sphere_to_vec({m, rad});
    const OrientedSphere back = vec_to_sphere(S);
    sph = std::max({sph, (back.m - m).norm(), std::abs(back.r - rad)});
    cot = std::max(cot, std::abs(S(4) - std::cos(rad) / std::sin(rad)));
  }
  r.residual("moebius.sphere_roundtrip", sph, ctx.tol("sphere_roundtrip"));
  r.residual("moebius.cot_r_equals_s4", cot, ctx.tol("sphere_roundtrip"));

  const auto g = ctx.grid_or("verify_grid");
  struct Case {
    std::string name;
    ParametricSurface s;
    double C;
  };
  const std::vector<Case> cases = {{"torus_pi_4", torus(kPi / 4), 0.0},
                                   {"torus_pi_6", torus(kPi / 6), 0.5},
                                   {"cylinder_1", cylinder(1.0), 1.0},
                                   {"hyperboloid_half", hyperboloid(0.5), 5.0 / 3.0}};
  for (Case c : cases) {
    c.s.domain = c.s.domain.with_grid(g.first, g.second);
    const MoebiusFrameBuild b = best_moebius_frame(c.s);
    const MoebiusCoefficients mc = frame_order_check(b.field, ctx.tol("order"));
    const std::string p = "moebius." + c.name + ".";
    r.expect(p + "C", mc.C, c.C, ctx.tol("invariant_C"));
    r.residual(p + "C_spread", mc.C_spread, ctx.tol("invariant_C"));
    r.residual(p + "q", mc.max_q, ctx.tol("order"));
    r.residual(p + "p2", mc.max_p2, ctx.tol("order"));
    r.residual(p + "p1_plus_p3_plus_1", mc.max_p1p3, ctx.tol("order"));
    r.residual(p + "second_order", mc.second_order, ctx.tol("order"));
    r.residual(p + "third_order", mc.third_order, ctx.tol("order"));
  }
  for (double C : {0.0, 0.5, 1.0, 5.0 / 3.0}) {
    char key[64];
    std::snprintf(key, sizeof key, "moebius.hC_%.4g.", C);
    const SubalgebraBasis b = hC_basis(C);
    r.expect(std::string(key) + "dimension", b.dim(), 2, 0.0);
    r.residual(std::string(key) + "closure", b.closure_residual, ctx.tol("closure"));
    const HCOrbit o = hC_orbit(C, 24, 24);
    const CanonicalForC can = canonical_for_C(C);
    double on = 0.0;
    for (int i = 0; i < o.domain.nu; ++i)
      for (int j = 0; j < o.domain.nv; ++j)
        if (o.chart_ok(i, j)) on = std::max(on, on_canonical_surface(o.space_form(i, j), can));
    r.residual(std::string(key) + "orbit_on_canonical_surface", on, ctx.tol("on_surface"));
  }
  r.residual("moebius.plus_minus_C_congruence", pm_C_congruence_residual(0.5), ctx.tol("on_surface"));
}

void verify_liesphere(const CommandContext& ctx, Report& r) {
  const auto g = ctx.grid_or("verify_grid");
  const LegendreMap ex = example_lambda(g.first, g.second);
  r.residual("liesphere.example_contact", contact_residual(ex), ctx.tol("contact"));
  r.residual("liesphere.example_quadric", line_residual(ex), ctx.tol("quadric"));
  r.residual("liesphere.example_sigma_second_singular_value", spherical_projection_rank(ex).first, ctx.tol("rank"));
  const LegendreDupinResult ld = legendre_dupin_test(ex, ctx.tol("legendre_dupin"));
  r.verdict("liesphere.example_dupin", ld.dupin);
  r.residual("liesphere.example_curvature_sphere_derivative", ld.max_derivative, ctx.tol("legendre_dupin"));

  const SubalgebraBasis h = h_basis();
  r.expect("liesphere.h_dimension", h.dim(), 6, 0.0);
  r.residual("liesphere.h_closure", h.closure_residual, ctx.tol("closure"));

  const FrameField T = example_frame_field(default_orbit_domain(g.first, g.second));
  const LieCoefficients lc = best_lie_frame_check(T, ctx.tol("order"));
  r.residual("liesphere.example_frame_order1", lc.order1, ctx.tol("order"));
  r.residual("liesphere.example_frame_order2", lc.order2, ctx.tol("order"));
  r.residual("liesphere.example_frame_order3", lc.order3, ctx.tol("order"));

  ParametricSurface fig1 = pushforward(torus(kPi / 4), ProjectionMap::stereo);
  fig1.domain = fig1.domain.with_grid(g.first, g.second);
  const LegendreMap lift = legendre_lift(surface_lift(fig1), fig1.domain, ctx.tol("contact"));
  r.residual("liesphere.figure1_lift_contact", contact_residual(lift), ctx.tol("contact"));
  const LegendreDupinResult lr = legendre_dupin_test(lift, ctx.tol("legendre_dupin"));
  r.verdict("liesphere.figure1_lift_dupin", lr.dupin);
  r.residual("liesphere.figure1_lift_curvature_sphere_derivative", lr.max_derivative, ctx.tol("legendre_dupin"));

  const Fig7Result f1 = fig7_pipeline(1.0, 32, 32, ctx.tol("singular_rank"));
  const Fig7Result f0 = fig7_pipeline(0.0, 32, 32, ctx.tol("singular_rank"));
  r.info("liesphere.fig7_t1_singular_count", f1.singular_points.size());
  r.expect("liesphere.fig7_t1_singular_nonempty_finite",
           (!f1.singular_points.empty() && !f1.degenerate) ? 1.0 : 0.0, 1.0, 0.0);
  r.expect("liesphere.fig7_t0_degenerate", f0.degenerate ? 1.0 : 0.0, 1.0, 0.0);
}

void verify_framecalc(const CommandContext& ctx, Report& r) {
  double s[2];
  int k = 0;
  for (int n : {64, 128}) {
    ParametricSurface fig1 = pushforward(torus(kPi / 4), ProjectionMap::stereo);
    fig1.domain = fig1.domain.with_grid(n, n);
    const EuclideanBestFrame bf = euclidean_best_frame(fig1);
    s[k++] = structure_residual(pullback_mc(bf.field));
  }
  r.residual("framecalc.structure_64", s[0], ctx.tol("structure"));
  r.info("framecalc.structure_128", s[1]);
  r.residual("framecalc.structure_inverse_ratio", s[1] / s[0], ctx.tol("structure_ratio"));

  // Congruence: one flat form, two base frames.
  ParametricSurface fig1 = pushforward(torus(kPi / 4), ProjectionMap::stereo);
  fig1.domain = fig1.domain.with_grid(48, 48);
  const MCForm w = pullback_mc(euclidean_best_frame(fig1).field);
  Mat base = Mat::Identity(4, 4);
  const double c = std::cos(0.7), sn = std::sin(0.7);
  base.block(1, 0, 3, 1) << 1.0, -2.0, 0.5;
  base.block(1, 1, 3, 3) << c, -sn, 0, sn, c, 0, 0, 0, 1;
  const IntegrationResult e1 = integrate_mc(w, Mat::Identity(4, 4));
  const IntegrationResult e2 = integrate_mc(w, base);
  const CongruenceResult cg = congruence_test(e1.field, e2.field, ctx.tol("congruence"));
  r.residual("framecalc.congruence_deviation", cg.deviation, ctx.tol("congruence"));
  r.residual("framecalc.congruence_g_minus_base", max_abs(cg.g - base), ctx.tol("congruence"));

  // The cylinder distribution: X1 = theta^1 with w^3_1 = 1, X2 = theta^2.
  Mat X1 = Mat::Zero(4, 4), X2 = Mat::Zero(4, 4);
  X1(1, 0) = 1;
  X1(3, 1) = 1;
  X1(1, 3) = -1;
  X2(2, 0) = 1;
  ParamDomain d{0.0, 2 * kPi, -1.0, 1.0, 33, 9, false, false};
  const IntegrationResult cyl = integrate_mc(constant_form(d, MatrixGroup::euclidean(), X1, X2), Mat::Identity(4, 4));
  double on = 0.0;
  for (const Mat& f : cyl.field.frames.data()) {
    const double x = f(1, 0), z = f(3, 0);
    on = std::max(on, std::abs(x * x + (z - 1.0) * (z - 1.0) - 1.0));
  }
  r.residual("framecalc.cylinder_orbit_equation", on, ctx.tol("integrate"));
  r.residual("framecalc.cylinder_path_independence", cyl.path_independence, ctx.tol("integrate"));
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"spaceforms", "surfaces", "moebius", "liesphere", "framecalc", "all"};
  return s;
}

CommandOutput cmd_verify(const CommandContext& ctx, const std::string& suite) {
  CommandOutput out("verify");
  const auto& all = verify_suites();
  if (std::find(all.begin(), all.end(), suite) == all.end()) {
    throw std::invalid_argument("unknown suite '" + suite +
                                "' (expected spaceforms, surfaces, moebius, liesphere, framecalc or all)");
  }
  Report& r = out.report;
  r.param("suite", suite);
  r.param("seed", ctx.seed);
  r.param("verify_grid", grid_string(ctx.grid_or("verify_grid")));
  auto run = [&](const std::string& name, void (*fn)(const CommandContext&, Report&)) {
    if (suite == name || suite == "all") fn(ctx, r);
  };
  run("spaceforms", verify_spaceforms);
  run("surfaces", verify_surfaces);
  run("moebius", verify_moebius);
  run("liesphere", verify_liesphere);
  run("framecalc", verify_framecalc);
  out.exit_code = r.passed() ? 0 : 1;
  write_outputs(out, ctx, "verify_" + suite, nullptr);
  return out;
}

}  // namespace dupin

// Command-line driver: dupin gen | orbit | fig7 | verify.

#include "dupin/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

namespace {

std::string dashed(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dupin surfaces: meshes, orbits, Lie sphere cosets and verification reports"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, grid;
  app.add_option("--config", config_path, "key = value config file (default: checked-in defaults)");
  app.add_option("--out-dir", out_dir, "output directory (overrides $DUPIN_OUTPUT_DIR and the config)");
  app.add_option("--grid", grid, "parameter grid NxM");
  std::map<std::string, double> tols;
  for (const auto& name : dupin::tolerance_names()) {
    app.add_option_function<double>(
        "--tol-" + dashed(name), [&tols, name](double v) { tols[name] = v; }, "override tol." + name);
  }

  std::string surface, projection = "auto", name;
  double alpha = 0.0, a = 0.0, radius = 0.0;
  auto* gen = app.add_subcommand("gen", "mesh of a canonical surface");
  gen->add_option("surface", surface, "torus | hyperboloid | cylinder")->required();
  auto* o_alpha = gen->add_option("--alpha", alpha, "torus parameter (radians)");
  auto* o_a = gen->add_option("--a", a, "hyperboloid parameter in (0, 1)");
  auto* o_radius = gen->add_option("--radius", radius, "cylinder radius");
  gen->add_option("--project", projection, "none | stereo | hyp_stereo | auto");
  gen->add_option("--name", name, "output base name");

  double C = 0.0;
  auto* orbit = app.add_subcommand("orbit", "h_C orbit pulled back to its space form");
  orbit->add_option("--C", C, "Moebius invariant C")->required();
  orbit->add_option("--name", name, "output base name");

  double t = 0.0;
  auto* fig7 = app.add_subcommand("fig7", "spherical projection of a boosted coset of H");
  fig7->add_option("--t", t, "boost parameter")->required();
  fig7->add_option("--name", name, "output base name");

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "spaceforms | surfaces | moebius | liesphere | framecalc | all");

  CLI11_PARSE(app, argc, argv);

  try {
    dupin::CommandContext ctx = dupin::CommandContext::make(config_path, out_dir);
    ctx.tol_overrides = tols;
    if (!grid.empty()) ctx.grid = dupin::parse_grid(grid);

    std::optional<dupin::CommandOutput> out;
    if (gen->parsed()) {
      double p = 0.0;
      if (surface == "torus") {
        if (!*o_alpha) throw std::invalid_argument("gen torus needs --alpha");
        p = alpha;
      } else if (surface == "hyperboloid") {
        if (!*o_a) throw std::invalid_argument("gen hyperboloid needs --a");
        p = a;
      } else if (surface == "cylinder") {
        p = *o_radius ? radius : 1.0;
      } else {
        throw std::invalid_argument("unknown surface '" + surface + "'");
      }
      out = dupin::cmd_gen(ctx, surface, p, projection, name);
    } else if (orbit->parsed()) {
      out = dupin::cmd_orbit(ctx, C, name);
    } else if (fig7->parsed()) {
      out = dupin::cmd_fig7(ctx, t, name);
    } else if (verify->parsed()) {
      out = dupin::cmd_verify(ctx, suite);
    }
    for (const auto& m : out->messages) std::cerr << m << "\n";
    if (!out->mesh_path.empty()) std::cout << "mesh:   " << out->mesh_path << "\n";
    std::cout << "report: " << out->report_path << "\n";
    std::cout << (out->exit_code == 0 ? "all checks passed" : "some checks FAILED") << "\n";
    return out->exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

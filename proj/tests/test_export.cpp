#include "dupin/commands.hpp"
#include "dupin/export.hpp"
#include "dupin/lie_sphere.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dupin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dupin_test_" + name);
  fs::remove_all(p);
  return p;
}

// Minimal reference OBJ reader: v records and 1-based f records only.
struct ObjData {
  std::vector<std::array<double, 3>> v;
  std::vector<std::vector<int>> f;
};

ObjData parse_obj(const std::string& text) {
  ObjData d;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::array<double, 3> p{};
      ls >> p[0] >> p[1] >> p[2];
      REQUIRE_FALSE(ls.fail());
      d.v.push_back(p);
    } else if (tag == "f") {
      std::vector<int> face;
      int k;
      while (ls >> k) face.push_back(k);
      d.f.push_back(face);
    }
  }
  return d;
}

CommandContext context(const fs::path& out) {
  CommandContext ctx = CommandContext::make("", out.string());
  ctx.grid = std::make_pair(16, 16);
  return ctx;
}

}  // namespace

TEST_CASE("config files") {
  const Config c = Config::parse("# comment\n a = 1 \nname=x y # trailing\n\ntol.order = 1e-6\n");
  CHECK(c.get("a", "") == "1");
  CHECK(c.get("name", "") == "x y");
  CHECK(c.get_double("tol.order", 0.0) == 1e-6);
  CHECK(c.get_int("a", 0) == 1);
  CHECK(c.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(c.get_double("name", 0.0), ConfigError);
  CHECK_THROWS_AS(Config::parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse(" = 3\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/dupin.conf"), ConfigError);

  const Config defaults = Config::load(Config::default_path());
  for (const auto& name : tolerance_names()) CHECK(defaults.has("tol." + name));
  CHECK(defaults.has("grid"));
  CHECK(defaults.has("output_dir"));

  CHECK(resolve_output_dir("flag", defaults) == "flag");
  ::setenv("DUPIN_OUTPUT_DIR", "/tmp/from_env", 1);
  CHECK(resolve_output_dir("", defaults) == "/tmp/from_env");
  CHECK(resolve_output_dir("flag", defaults) == "flag");
  ::unsetenv("DUPIN_OUTPUT_DIR");
  CHECK(resolve_output_dir("", defaults) == defaults.get("output_dir", ""));
  CHECK(resolve_output_dir("", Config::parse("")) == ".");
}

TEST_CASE("grid specs and tolerance lookup") {
  CHECK(parse_grid("64x32") == std::pair<int, int>{64, 32});
  CHECK(parse_grid("8X8") == std::pair<int, int>{8, 8});
  CHECK_THROWS_AS(parse_grid("64"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("4x64"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("64x64x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("axb"), std::invalid_argument);

  CommandContext ctx = CommandContext::make();
  CHECK(ctx.tol("order") == 1e-6);
  ctx.tol_overrides["order"] = 0.5;
  CHECK(ctx.tol("order") == 0.5);
  CHECK_THROWS_AS(ctx.tol("no_such_tolerance"), ConfigError);
  CHECK(ctx.grid_or("grid") == std::pair<int, int>{64, 64});
  ctx.grid = std::make_pair(10, 12);
  CHECK(ctx.grid_or("grid") == std::pair<int, int>{10, 12});
}

TEST_CASE("reports") {
  Report r("unit");
  r.param("alpha", 0.5);
  CHECK(r.residual("small", 1e-9, 1e-8));
  CHECK(r.passed());
  CHECK(r.expect("close", 1.0000001, 1.0, 1e-6));
  CHECK(r.passed());
  r.verdict("shape", true);
  r.warn("careful");
  CHECK_FALSE(r.residual("large", 1.0, 1e-8));
  CHECK_FALSE(r.passed());

  const nlohmann::json j = nlohmann::json::parse(r.dump());
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["operation"] == "unit");
  CHECK(j["parameters"]["alpha"] == 0.5);
  CHECK(j["residuals"]["small"]["tolerance"] == 1e-8);
  CHECK(j["residuals"]["small"]["pass"] == true);
  CHECK(j["residuals"]["large"]["pass"] == false);
  CHECK(j["residuals"]["close"]["expected"] == 1.0);
  CHECK(j["verdicts"]["shape"] == true);
  CHECK(j["warnings"][0] == "careful");
  CHECK(j["pass"] == false);
  // Every numeric claim carries its tolerance.
  for (const auto& [k, v] : j["residuals"].items()) CHECK(v.contains("tolerance"));
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch("atomic");
  const fs::path p = dir / "nested" / "file.txt";
  atomic_write(p.string(), "first");
  CHECK(slurp(p) == "first");
  atomic_write(p.string(), "second");
  CHECK(slurp(p) == "second");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  CHECK_THROWS_AS(atomic_write("/proc/definitely/not/writable", "x"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("grid meshes and OBJ output") {
  ParamDomain d;
  d.nu = 4, d.nv = 3;
  Grid<Vec> pts(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) pts(i, j) = (Vec(3) << i, j, 0.5 * i * j).finished();
  const Mesh open = grid_mesh(pts, d);
  CHECK(open.vertices.size() == 12);
  CHECK(open.faces.size() == 3 * 2);
  CHECK_NOTHROW(open.validate());

  d.periodic_u = d.periodic_v = true;
  const Mesh closed = grid_mesh(pts, d);
  CHECK(closed.faces.size() == 12);

  Grid<char> flags(4, 3, 0);
  flags(1, 1) = 1;
  pts(2, 2)(0) = std::nan("");
  const Mesh holes = grid_mesh(pts, d, &flags);
  CHECK(holes.vertices.size() == 10);
  for (const auto& f : holes.faces)
    for (int k : f) CHECK((k >= 0 && k < 10));
  CHECK(holes.faces.size() < 12);

  Mesh m = grid_mesh(pts, d, &flags);
  m.scalars["kappa"] = std::vector<double>(m.vertices.size(), 1.5);
  const std::string obj = to_obj(m, "unit test");
  const ObjData back = parse_obj(obj);
  REQUIRE(back.v.size() == m.vertices.size());
  REQUIRE(back.f.size() == m.faces.size());
  for (std::size_t k = 0; k < back.v.size(); ++k)
    for (int c = 0; c < 3; ++c) CHECK(back.v[k][c] == doctest::Approx(m.vertices[k](c)).epsilon(1e-11));
  for (std::size_t k = 0; k < back.f.size(); ++k) {
    REQUIRE(back.f[k].size() == m.faces[k].size());
    for (std::size_t c = 0; c < back.f[k].size(); ++c) CHECK(back.f[k][c] == m.faces[k][c] + 1);
  }

  Mesh bad = open;
  bad.faces.push_back({0, 1, 99});
  CHECK_THROWS(bad.validate());
}

TEST_CASE("gen command") {
  const fs::path dir = scratch("gen");
  const CommandContext ctx = context(dir);
  const CommandOutput o = cmd_gen(ctx, "torus", M_PI / 4, "stereo");
  CHECK(o.exit_code == 0);
  CHECK(fs::path(o.mesh_path).filename() == "gen_torus.obj");
  const ObjData obj = parse_obj(slurp(o.mesh_path));
  CHECK(obj.v.size() == 256);
  CHECK(obj.f.size() == 256);
  const nlohmann::json j = nlohmann::json::parse(slurp(o.report_path));
  CHECK(j["pass"] == true);
  CHECK(j["verdicts"]["isoparametric"] == false);
  CHECK(j["info"]["vertices"] == 256);

  CHECK(cmd_gen(ctx, "hyperboloid", 0.5, "hyp_stereo", "fig2").exit_code == 0);
  CHECK(fs::exists(dir / "fig2.obj"));
  CHECK(cmd_gen(ctx, "cylinder", 1.0, "none").exit_code == 0);

  CHECK_THROWS_AS(cmd_gen(ctx, "hyperboloid", 1.5), std::invalid_argument);
  CHECK_THROWS_AS(cmd_gen(ctx, "torus", 2.0), std::invalid_argument);
  CHECK_THROWS_AS(cmd_gen(ctx, "cylinder", -1.0), std::invalid_argument);
  CHECK_THROWS_AS(cmd_gen(ctx, "klein", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cmd_gen(ctx, "torus", 0.5, "none"), std::invalid_argument);

  // A tolerance tighter than round-off makes the command fail.
  CommandContext strict = ctx;
  strict.tol_overrides["curvature_identity"] = 0.0;
  strict.tol_overrides["curvature_value"] = 0.0;
  CHECK(cmd_gen(strict, "torus", M_PI / 6, "stereo", "strict").exit_code != 0);
  fs::remove_all(dir);
}

TEST_CASE("orbit command regimes") {
  const fs::path dir = scratch("orbit");
  const CommandContext ctx = context(dir);
  const std::vector<std::pair<double, std::string>> cases = {
      {0.0, "torus"}, {1.0, "cylinder"}, {1.6667, "hyperboloid"}, {-0.5, "torus"}, {-3.0, "hyperboloid"}};
  for (const auto& [C, regime] : cases) {
    const CommandOutput o = cmd_orbit(ctx, C);
    CHECK(o.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(o.report_path));
    CHECK(j["info"]["regime"] == regime);
    CHECK(j["pass"] == true);
    CHECK(parse_obj(slurp(o.mesh_path)).v.size() > 0);
  }
  CHECK_THROWS(cmd_orbit(ctx, std::nan("")));
  fs::remove_all(dir);
}

TEST_CASE("fig7 command") {
  const fs::path dir = scratch("fig7");
  CommandContext ctx = context(dir);
  ctx.grid = std::make_pair(32, 32);
  const CommandOutput o = cmd_fig7(ctx, 1.0);
  CHECK(o.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(o.report_path));
  CHECK(j["verdicts"]["degenerate"] == false);
  const std::size_t ns = j["singular_points"].size();
  CHECK(ns > 0);
  CHECK(parse_obj(slurp(o.mesh_path)).v.size() == 32 * 32 - ns);

  const CommandOutput z = cmd_fig7(ctx, 0.0);
  const nlohmann::json jz = nlohmann::json::parse(slurp(z.report_path));
  CHECK(jz["verdicts"]["degenerate"] == true);
  CHECK(jz["warnings"].size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("verify suites") {
  const fs::path dir = scratch("verify");
  const CommandContext ctx = context(dir);
  for (const std::string& s : {"spaceforms", "surfaces", "liesphere"}) {
    const CommandOutput o = cmd_verify(ctx, s);
    CHECK(o.exit_code == 0);
    CHECK(fs::exists(dir / ("verify_" + s + ".json")));
  }
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "verify_surfaces.json"));
  CHECK(j["residuals"].size() > 5);
  CHECK_THROWS_AS(cmd_verify(ctx, "nonsense"), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const CommandOutput ga = cmd_gen(context(a), "hyperboloid", 0.5);
  const CommandOutput gb = cmd_gen(context(b), "hyperboloid", 0.5);
  CHECK(slurp(ga.mesh_path) == slurp(gb.mesh_path));
  CHECK(slurp(ga.report_path) == slurp(gb.report_path));
  const CommandOutput fa = cmd_fig7(context(a), 1.0);
  const CommandOutput fb = cmd_fig7(context(b), 1.0);
  CHECK(slurp(fa.mesh_path) == slurp(fb.mesh_path));
  CHECK(slurp(fa.report_path) == slurp(fb.report_path));
  fs::remove_all(a);
  fs::remove_all(b);
}

#pragma once

// The command layer behind the CLI: mesh generation, h_C orbits, the
// Figure-7 coset surface, and the verification suites.  Every command
// writes an OBJ mesh and/or a JSON report into the output directory.

#include "dupin/config.hpp"
#include "dupin/export.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dupin {

// Tolerance names accepted as --tol-<name> and as tol.<name> config keys.
const std::vector<std::string>& tolerance_names();

struct CommandContext {
  Config config;
  std::string out_dir;  // resolved (flag > $DUPIN_OUTPUT_DIR > config > ".")
  std::map<std::string, double> tol_overrides;
  std::optional<std::pair<int, int>> grid;  // --grid NxM
  unsigned seed = 12345;

  // Loads the config file and resolves the output directory.
  static CommandContext make(const std::string& config_path = "", const std::string& out_dir = "");

  // Override, else tol.<name> from the config; throws ConfigError if neither.
  double tol(const std::string& name) const;
  std::pair<int, int> grid_or(const std::string& config_key) const;
};

// "NxM" -> (N, M); throws std::invalid_argument.
std::pair<int, int> parse_grid(const std::string& s);

struct CommandOutput {
  int exit_code = 0;
  Report report;
  std::string report_path, mesh_path;
  std::vector<std::string> messages;

  explicit CommandOutput(const std::string& op) : report(op) {}
};

// surface: torus | hyperboloid | cylinder; projection: none | stereo |
// hyp_stereo | auto.  Throws std::invalid_argument on bad parameters.
CommandOutput cmd_gen(const CommandContext& ctx, const std::string& surface, double parameter,
                      const std::string& projection = "auto", const std::string& name = "");
CommandOutput cmd_orbit(const CommandContext& ctx, double C, const std::string& name = "");
CommandOutput cmd_fig7(const CommandContext& ctx, double t, const std::string& name = "");
// suite: spaceforms | surfaces | moebius | liesphere | framecalc | all.
CommandOutput cmd_verify(const CommandContext& ctx, const std::string& suite);

const std::vector<std::string>& verify_suites();

}  // namespace dupin

#pragma once

// Mesh and report emission: grid meshes as ASCII OBJ, reports as JSON with
// every numeric check stored next to its tolerance.  Files are written to a
// temporary name and renamed into place.

#include "dupin/grid.hpp"
#include "dupin/indefinite_linalg.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace dupin {

inline constexpr int kReportSchemaVersion = 1;

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::vector<int>> faces;  // 0-based vertex indices
  // Grid index of every vertex.
  std::vector<std::pair<int, int>> grid_index;
  // Per-vertex scalars written as comments (e.g. principal curvatures).
  std::map<std::string, std::vector<double>> scalars;

  void validate() const;  // throws std::logic_error on out-of-range faces
};

// Vertices for every unflagged grid point; a quad for every grid cell whose
// four corners are unflagged (cells wrap across periodic directions).
Mesh grid_mesh(const Grid<Vec>& points, const ParamDomain& d, const Grid<char>* flagged = nullptr);

std::string to_obj(const Mesh& m, const std::string& comment = "");

// Writes content to path.tmp and renames it over path.  Throws
// std::runtime_error on I/O failure.
void atomic_write(const std::string& path, const std::string& content);

class Report {
 public:
  explicit Report(const std::string& operation);

  template <class T>
  void param(const std::string& key, const T& value) {
    doc_["parameters"][key] = value;
  }
  // Stores {value, tolerance, pass} with pass = value <= tolerance.
  bool residual(const std::string& name, double value, double tolerance);
  // Stores {value, tolerance, pass} with pass = |value - expected| <= tolerance.
  bool expect(const std::string& name, double value, double expected, double tolerance);
  void verdict(const std::string& name, bool value);
  template <class T>
  void info(const std::string& key, const T& value) {
    doc_["info"][key] = value;
  }
  void warn(const std::string& message);

  bool passed() const { return passed_; }
  const nlohmann::json& json() const { return doc_; }
  nlohmann::json& json() { return doc_; }
  std::string dump() const;

 private:
  nlohmann::json doc_;
  bool passed_ = true;
};

}  // namespace dupin

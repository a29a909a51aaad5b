#include "dupin/export.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dupin {

void Mesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& f : faces)
    for (int k : f)
      if (k < 0 || k >= n) throw std::logic_error("mesh face index out of range");
  for (const auto& [name, v] : scalars)
    if (static_cast<int>(v.size()) != n) throw std::logic_error("mesh scalar '" + name + "' has the wrong length");
}

Mesh grid_mesh(const Grid<Vec>& points, const ParamDomain& d, const Grid<char>* flagged) {
  const int nu = points.nu(), nv = points.nv();
  Grid<int> index(nu, nv, -1);
  Mesh m;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (flagged && (*flagged)(i, j)) continue;
      const Vec& p = points(i, j);
      if (p.size() != 3 || !p.allFinite()) continue;
      index(i, j) = static_cast<int>(m.vertices.size());
      m.vertices.emplace_back(p(0), p(1), p(2));
      m.grid_index.emplace_back(i, j);
    }
  }
  const int iu = d.periodic_u ? nu : nu - 1;
  const int iv = d.periodic_v ? nv : nv - 1;
  for (int i = 0; i < iu; ++i) {
    for (int j = 0; j < iv; ++j) {
      const int a = index(i, j), b = index((i + 1) % nu, j), c = index((i + 1) % nu, (j + 1) % nv),
                e = index(i, (j + 1) % nv);
      if (a < 0 || b < 0 || c < 0 || e < 0) continue;
      m.faces.push_back({a, b, c, e});
    }
  }
  return m;
}

std::string to_obj(const Mesh& m, const std::string& comment) {
  m.validate();
  std::ostringstream os;
  if (!comment.empty()) os << "# " << comment << "\n";
  char buf[128];
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    const auto& v = m.vertices[k];
    std::snprintf(buf, sizeof buf, "v %.12g %.12g %.12g\n", v.x(), v.y(), v.z());
    os << buf;
  }
  for (const auto& [name, values] : m.scalars) {
    os << "# scalar " << name;
    for (double x : values) {
      std::snprintf(buf, sizeof buf, " %.12g", x);
      os << buf;
    }
    os << "\n";
  }
  for (const auto& f : m.faces) {
    os << "f";
    for (int k : f) os << ' ' << k + 1;
    os << "\n";
  }
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

Report::Report(const std::string& operation) {
  doc_["schema_version"] = kReportSchemaVersion;
  doc_["operation"] = operation;
  doc_["parameters"] = nlohmann::json::object();
  doc_["residuals"] = nlohmann::json::object();
  doc_["verdicts"] = nlohmann::json::object();
}

bool Report::residual(const std::string& name, double value, double tolerance) {
  const bool ok = std::isfinite(value) && value <= tolerance;
  doc_["residuals"][name] = {{"value", value}, {"tolerance", tolerance}, {"pass", ok}};
  passed_ = passed_ && ok;
  return ok;
}

bool Report::expect(const std::string& name, double value, double expected, double tolerance) {
  const bool ok = std::isfinite(value) && std::abs(value - expected) <= tolerance;
  doc_["residuals"][name] = {{"value", value}, {"expected", expected}, {"tolerance", tolerance}, {"pass", ok}};
  passed_ = passed_ && ok;
  return ok;
}

void Report::verdict(const std::string& name, bool value) { doc_["verdicts"][name] = value; }

void Report::warn(const std::string& message) { doc_["warnings"].push_back(message); }

std::string Report::dump() const {
  nlohmann::json out = doc_;
  out["pass"] = passed_;
  return out.dump(2) + "\n";
}

}  // namespace dupin

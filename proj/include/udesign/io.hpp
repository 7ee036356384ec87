#pragma once

// File output helpers shared by the command-line tools: full-precision CSV,
// JSON descriptors, and run manifests. All writes go through a temp file
// followed by a rename so interrupted runs never leave partial output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "udesign/design.hpp"
#include "udesign/sphere.hpp"
#include "udesign/upath.hpp"

namespace udesign {

using nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

// Shortest round-trippable decimal form.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct csv_table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    rows.push_back(std::move(cells));
  }
};

inline std::string to_csv(const csv_table& table) {
  std::ostringstream out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out << ',';
    out << table.header[j];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::logic_error("csv row width does not match header");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  return out.str();
}

inline void write_text_atomic(const std::string& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline void write_csv(const std::string& path, const csv_table& table) {
  write_text_atomic(path, to_csv(table));
}

inline void write_json(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Serialization of library objects

inline json path_descriptor(const unitary_path& path) {
  json j;
  j["kind"] = path.kind();
  j["dim"] = path.dim();
  switch (path.closure()) {
    case path_closure::closed:
      j["closure"] = "closed";
      break;
    case path_closure::closed_up_to_phase:
      j["closure"] = "closed-up-to-phase";
      break;
    case path_closure::open:
      j["closure"] = "open";
      break;
  }
  j["special"] = path.special();
  return j;
}

inline json report_to_json(const design_report& report) {
  return json{{"frame_potential_t1", report.frame_potential_t1},
              {"twirl_deviation", report.twirl_deviation},
              {"num_samples", report.num_samples},
              {"verdict", report.verdict}};
}

inline csv_table curve_samples_table(const curve_spec& spec, int n) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  int m = curve_ambient_dim(spec);
  csv_table table;
  table.header.push_back("s");
  for (int j = 1; j <= m; ++j) table.header.push_back("x" + std::to_string(j));
  for (int k = 0; k < n; ++k) {
    double s = static_cast<double>(k) / n;
    sphere_point p = eval_curve(spec, s);
    std::vector<double> row = {s};
    for (int j = 0; j < m; ++j) row.push_back(p.vec()(j));
    table.add_row(row);
  }
  return table;
}

// 3-D image of an S^3 curve under either the stereographic chart or the
// circle-fiber quotient map.
inline csv_table projected_curve_table(const curve_spec& spec, int n,
                                       const std::string& map) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  if (curve_ambient_dim(spec) != 4)
    throw std::invalid_argument("projection expects an S^3 curve");
  csv_table table;
  table.header = {"s", "px", "py", "pz"};
  for (int k = 0; k < n; ++k) {
    double s = static_cast<double>(k) / n;
    sphere_point p = eval_curve(spec, s);
    Eigen::Vector3d q;
    if (map == "stereo") {
      q = stereographic_project(p);
    } else if (map == "hopf") {
      q = hopf_map(p).vec();
    } else {
      throw std::invalid_argument("unknown projection: " + map);
    }
    table.add_row({s, q(0), q(1), q(2)});
  }
  return table;
}

inline csv_table path_samples_table(const unitary_path& path, int n) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  const int d = path.dim();
  csv_table table;
  table.header.push_back("s");
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      std::string tag = std::to_string(r) + std::to_string(c);
      table.header.push_back("re" + tag);
      table.header.push_back("im" + tag);
    }
  for (int k = 0; k < n; ++k) {
    double s = static_cast<double>(k) / n;
    cmat u = path.eval(s).mat();
    std::vector<double> row = {s};
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        row.push_back(u(r, c).real());
        row.push_back(u(r, c).imag());
      }
    table.add_row(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Run manifests

struct run_manifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string output;
};

inline json manifest_to_json(const run_manifest& m) {
  json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["output"] = m.output;
  j["tool_version"] = tool_version;
  return j;
}

inline void write_manifest(const run_manifest& m) {
  write_json(m.output + ".manifest.json", manifest_to_json(m));
}

// ---------------------------------------------------------------------------
// Minimal CSV reading (for the project subcommand)

inline csv_table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  csv_table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) throw std::runtime_error("empty csv: " + path);
  return table;
}

}  // namespace udesign

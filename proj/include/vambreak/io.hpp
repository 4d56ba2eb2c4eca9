#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vambreak/analysis.hpp"
#include "vambreak/grid.hpp"

namespace vambreak {

/// 17 significant digits: lossless double round-trip for regression tests.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  return f;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  auto f = open_output(path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("csv row/header size mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_double(row[i]);
    f << "\n";
  }
}

inline nlohmann::json grid_to_json(const Grid& g) {
  nlohmann::json j;
  j["kind"] = to_string(g.kind);
  j["x_min"] = g.x_min();
  j["x_max"] = g.x_max();
  j["boundaries"] = g.boundaries;
  if (g.seed) j["seed"] = *g.seed;
  return j;
}

inline void write_grid_csv(const std::string& path, const Grid& g) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < g.boundaries.size(); ++i)
    rows.push_back({static_cast<double>(i), g.boundaries[i]});
  write_csv(path, {"index", "boundary"}, rows);
}

inline void write_eoc_csv(const std::string& path, const EocReport& rep) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({static_cast<double>(r.cells), r.error_abs, r.error_rel, r.eoc});
  write_csv(path, {"cells", "l1_error", "l1_error_rel", "eoc"}, rows);
}

inline void write_eoc_markdown(const std::string& path, const std::vector<EocReport>& reports) {
  auto f = open_output(path);
  if (reports.empty()) return;
  f << "| Grids |";
  for (const auto& rep : reports) f << " " << rep.family << " L1 error | EOC |";
  f << "\n|---|";
  for (std::size_t i = 0; i < reports.size(); ++i) f << "---|---|";
  f << "\n";
  for (std::size_t r = 0; r < reports.front().rows.size(); ++r) {
    f << "| " << reports.front().rows[r].cells << " |";
    for (const auto& rep : reports) {
      char num[32], ord[32];
      std::snprintf(num, sizeof num, "%.2e", rep.rows[r].error_abs);
      std::snprintf(ord, sizeof ord, "%.2f", rep.rows[r].eoc);
      f << " " << num << " | " << ord << " |";
    }
    f << "\n";
  }
}

}  // namespace vambreak

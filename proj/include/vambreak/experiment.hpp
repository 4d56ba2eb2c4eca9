#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vambreak/analysis.hpp"
#include "vambreak/grid.hpp"
#include "vambreak/integrate.hpp"
#include "vambreak/io.hpp"
#include "vambreak/kernels.hpp"
#include "vambreak/kernels2d.hpp"
#include "vambreak/reference.hpp"
#include "vambreak/scheme.hpp"
#include "vambreak/scheme2d.hpp"
#include "vambreak/tables.hpp"

namespace vambreak {

struct GridConfig {
  std::string family = "geometric";
  double x_min = 1e-9;
  double x_max = 1.0;
  int cells = 30;
  std::uint64_t seed = 42;
  double max_ratio = 4.0;
  std::vector<std::pair<double, int>> segments;  // locally_uniform
  // rescale so the top pivot is exactly x_max; moment experiments need the
  // initial monodisperse particle to sit on a pivot
  bool align_top_pivot = true;
};

struct RunConfig {
  int dimension = 1;
  std::string scheme = "vam";  // vam | midpoint | fpt (1D); vam2d (2D)
  std::string kernel;
  GridConfig grid;   // 1D grid / 2D axis 1
  GridConfig grid2;  // 2D axis 2
  double t_end = 1.0;
  IntegratorConfig integrator;
  std::string initial_condition = "monodisperse_top_cell";
  // eoc command extras
  std::vector<std::string> families = {"geometric", "uniform", "locally_uniform", "random"};
  int doublings = 4;
  int surrogate_extra_doublings = 3;
  bool write_density = true;
};

inline Grid build_grid(const GridConfig& c) {
  Grid g;
  if (c.family == "uniform") {
    g = build_uniform(c.x_min, c.x_max, c.cells);
  } else if (c.family == "geometric" || c.family == "nonuniform") {
    g = build_geometric(c.x_min, c.x_max, c.cells);
  } else if (c.family == "locally_uniform") {
    auto segs = c.segments;
    if (segs.empty()) {
      const int a = c.cells / 3, b = c.cells / 3;
      segs = {{0.5, a}, {0.3, b}, {0.2, c.cells - a - b}};
    }
    g = build_locally_uniform(c.x_min, c.x_max, segs);
  } else if (c.family == "random") {
    g = build_random(c.x_min, c.x_max, c.cells, c.seed, c.max_ratio);
  } else if (c.family == "oscillatory") {
    g = build_oscillatory(c.x_min, c.x_max, c.cells);
  } else {
    throw std::invalid_argument("unknown grid family: " + c.family);
  }
  return c.align_top_pivot ? aligned_top_pivot(g, c.x_max) : g;
}

namespace cfgdetail {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config field '") + key + "': " + e.what());
  }
}

inline GridConfig parse_grid(const nlohmann::json& j, GridConfig base = {}) {
  GridConfig c = base;
  c.family = get_or<std::string>(j, "family", c.family);
  c.x_min = get_or<double>(j, "x_min", c.x_min);
  c.x_max = get_or<double>(j, "x_max", c.x_max);
  c.cells = get_or<int>(j, "cells", c.cells);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.max_ratio = get_or<double>(j, "max_ratio", c.max_ratio);
  c.align_top_pivot = get_or<bool>(j, "align_top_pivot", c.align_top_pivot);
  if (j.contains("segments")) {
    c.segments.clear();
    for (const auto& s : j.at("segments"))
      c.segments.emplace_back(s.at(0).get<double>(), s.at(1).get<int>());
  }
  return c;
}

inline IntegratorConfig parse_integrator(const nlohmann::json& j) {
  IntegratorConfig c;
  const std::string method = get_or<std::string>(j, "method", "rk45_adaptive");
  if (method == "rk45_adaptive") c.method = IntegratorConfig::Method::rk45_adaptive;
  else if (method == "rk4_fixed") c.method = IntegratorConfig::Method::rk4_fixed;
  else throw std::invalid_argument("unknown integrator method: " + method);
  c.dt = get_or<double>(j, "dt", c.dt);
  c.rtol = get_or<double>(j, "rtol", c.rtol);
  c.atol = get_or<double>(j, "atol", c.atol);
  c.observe_every = get_or<double>(j, "observe_every", c.observe_every);
  c.nonneg_clip = get_or<double>(j, "nonneg_clip", c.nonneg_clip);
  return c;
}

}  // namespace cfgdetail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  c.dimension = cfgdetail::get_or<int>(j, "dimension", 1);
  if (c.dimension != 1 && c.dimension != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  c.scheme = cfgdetail::get_or<std::string>(j, "scheme", c.dimension == 1 ? "vam" : "vam2d");
  if (!j.contains("kernel")) throw std::invalid_argument("config is missing 'kernel'");
  c.kernel = j.at("kernel").get<std::string>();
  if (j.contains("grid")) c.grid = cfgdetail::parse_grid(j.at("grid"));
  c.grid2 = j.contains("grid2") ? cfgdetail::parse_grid(j.at("grid2"), c.grid) : c.grid;
  c.t_end = cfgdetail::get_or<double>(j, "t_end", c.t_end);
  if (!(c.t_end >= 0)) throw std::invalid_argument("t_end must be nonnegative");
  if (j.contains("integrator")) c.integrator = cfgdetail::parse_integrator(j.at("integrator"));
  c.initial_condition =
      cfgdetail::get_or<std::string>(j, "initial_condition", c.initial_condition);
  if (c.initial_condition != "monodisperse_top_cell")
    throw std::invalid_argument("unknown initial condition: " + c.initial_condition);
  if (j.contains("families"))
    c.families = j.at("families").get<std::vector<std::string>>();
  c.doublings = cfgdetail::get_or<int>(j, "doublings", c.doublings);
  c.surrogate_extra_doublings =
      cfgdetail::get_or<int>(j, "surrogate_extra_doublings", c.surrogate_extra_doublings);
  c.write_density = cfgdetail::get_or<bool>(j, "write_density", c.write_density);

  const bool is_2d = c.dimension == 2;
  const std::vector<std::string> schemes_1d = {"vam", "midpoint", "fpt"};
  if (is_2d && c.scheme != "vam2d")
    throw std::invalid_argument("2d runs support scheme 'vam2d' only");
  if (!is_2d &&
      std::find(schemes_1d.begin(), schemes_1d.end(), c.scheme) == schemes_1d.end())
    throw std::invalid_argument("unknown 1d scheme: " + c.scheme);
  // resolve the kernel name now so bad configs fail before any work
  if (is_2d) builtin2d(c.kernel);
  else builtin(c.kernel);
  return c;
}

struct Run1DResult {
  Grid grid;
  ObservationSeries series;
  double clamp_number_error = 0;
  double max_mass_drift = 0;  // max_t |M1(t) - M1(0)| / M1(0)
};

inline double suggested_rk4_dt(const Grid& g, const KernelSpec& kernel, const State& n0) {
  const auto w = collision_weights(g, kernel, n0);
  const double wmax = *std::max_element(w.begin(), w.end());
  return wmax > 0 ? 0.5 / wmax : 0.1;
}

inline Run1DResult run_1d(const RunConfig& cfg) {
  Run1DResult out;
  out.grid = build_grid(cfg.grid);
  const Grid& g = out.grid;
  const KernelSpec kernel = builtin(cfg.kernel);
  State n0(g.cells(), 0.0);
  n0.back() = 1.0;

  IntegratorConfig integ = cfg.integrator;
  integ.t_end = cfg.t_end;
  if (integ.method == IntegratorConfig::Method::rk4_fixed && !(integ.dt > 0))
    integ.dt = suggested_rk4_dt(g, kernel, n0);

  RhsDiagnostics diag;
  detail::RhsFn rhs;
  BetaTable table;
  FptTable fpt;
  if (cfg.scheme == "fpt") {
    fpt = precompute_fpt(g, kernel);
    rhs = [&g, kernel, fpt](const State& n) { return rhs_fpt(g, kernel, fpt, n); };
  } else {
    table = precompute_tables(g, kernel);
    if (cfg.scheme == "vam")
      rhs = [&g, kernel, table, &diag](const State& n) {
        return rhs_vam(g, kernel, table, n, &diag);
      };
    else
      rhs = [&g, kernel, table](const State& n) { return rhs_midpoint(g, kernel, table, n); };
  }
  out.series = integrate(rhs, n0, integ);
  out.clamp_number_error = diag.clamp_number_error;

  const double m1_0 = moment(g, out.series.states.front(), 1);
  for (const auto& s : out.series.states)
    out.max_mass_drift =
        std::max(out.max_mass_drift, std::abs(moment(g, s, 1) - m1_0) / m1_0);
  return out;
}

struct Run2DResult {
  Grid2D grid;
  ObservationSeries series;  // states flattened row-major
  double clamp_number_error = 0;
};

inline Run2DResult run_2d(const RunConfig& cfg) {
  Run2DResult out;
  out.grid = Grid2D{build_grid(cfg.grid), build_grid(cfg.grid2)};
  const Grid2D& g = out.grid;
  const KernelSpec2D kernel = builtin2d(cfg.kernel);
  const BetaTable2D table = precompute_tables2d(g, kernel);

  State2D n0(g.cells1(), g.cells2());
  n0.at(g.cells1() - 1, g.cells2() - 1) = 1.0;

  IntegratorConfig integ = cfg.integrator;
  integ.t_end = cfg.t_end;
  if (integ.method == IntegratorConfig::Method::rk4_fixed && !(integ.dt > 0)) {
    const auto w = collision_weights2d(g, kernel, n0);
    const double wmax = *std::max_element(w.counts.begin(), w.counts.end());
    integ.dt = wmax > 0 ? 0.5 / wmax : 0.1;
  }

  Rhs2DDiagnostics diag;
  auto rhs = [&g, kernel, table, &diag](const std::vector<double>& flat) {
    State2D n(g.cells1(), g.cells2());
    n.counts = flat;
    return rhs_vam2d(g, kernel, table, n, &diag).counts;
  };
  out.series = integrate(rhs, n0.counts, integ);
  out.clamp_number_error = diag.clamp_number_error;
  return out;
}

inline void write_run_outputs(const RunConfig& cfg, const Run1DResult& r,
                              const std::string& out_dir) {
  std::optional<ReferenceSolution> ref;
  try {
    ref = reference_for_kernel(cfg.kernel, cfg.grid.x_max);
  } catch (const std::invalid_argument&) {
  }

  std::vector<std::string> header = {"t", "m0", "m1", "m2", "m3"};
  const bool with_ref = ref && cfg.t_end < ref->t_max;
  if (with_ref) {
    header.push_back("m0_exact");
    header.push_back("m0_rel_error");
    header.push_back("m1_rel_error");
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.series.times.size(); ++k) {
    const double t = r.series.times[k];
    const auto m = moments(r.grid, r.series.states[k], {0, 1, 2, 3});
    std::vector<double> row = {t, m[0], m[1], m[2], m[3]};
    if (with_ref) {
      row.push_back(ref->m0(t));
      row.push_back(relative_moment_error(ref->m0(t), m[0]));
      row.push_back(relative_moment_error(ref->m1(t), m[1]));
    }
    rows.push_back(row);
  }
  write_csv(out_dir + "/moments.csv", header, rows);

  if (cfg.write_density) {
    const State& nf = r.series.states.back();
    State proj;
    if (with_ref && ref->has_density) proj = project_reference(r.grid, *ref, cfg.t_end);
    std::vector<std::string> dh = {"cell", "pivot", "width", "count", "density"};
    if (!proj.empty()) dh.push_back("reference_count");
    std::vector<std::vector<double>> drows;
    for (int i = 0; i < r.grid.cells(); ++i) {
      std::vector<double> row = {static_cast<double>(i), r.grid.pivots[i], r.grid.widths[i],
                                 nf[i], nf[i] / r.grid.widths[i]};
      if (!proj.empty()) row.push_back(proj[i]);
      drows.push_back(row);
    }
    write_csv(out_dir + "/density.csv", dh, drows);
  }

  nlohmann::json diag;
  diag["scheme"] = cfg.scheme;
  diag["kernel"] = cfg.kernel;
  diag["grid"] = grid_to_json(r.grid);
  diag["max_relative_mass_drift"] = r.max_mass_drift;
  diag["clamp_number_error"] = r.clamp_number_error;
  diag["clipped_negativity"] = r.series.clipped_negativity;
  diag["accepted_steps"] = r.series.accepted_steps;
  diag["rejected_steps"] = r.series.rejected_steps;
  open_output(out_dir + "/diagnostics.json") << diag.dump(2) << "\n";
}

inline void write_run_outputs2d(const RunConfig& cfg, const Run2DResult& r,
                                const std::string& out_dir) {
  std::optional<ReferenceSolution2D> ref;
  try {
    ref = reference_for_kernel2d(cfg.kernel);
  } catch (const std::invalid_argument&) {
  }

  std::vector<std::string> header = {"t", "m00", "m10", "m01", "m11"};
  if (ref) {
    if (ref->m00) header.push_back("m00_rel_error");
    if (ref->m11) header.push_back("m11_rel_error");
    if (ref->m10) header.push_back("m10_rel_error");
    if (ref->m01) header.push_back("m01_rel_error");
  }
  const int I1 = r.grid.cells1(), I2 = r.grid.cells2();
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.series.times.size(); ++k) {
    const double t = r.series.times[k];
    State2D s(I1, I2);
    s.counts = r.series.states[k];
    const double m00 = moment2d(r.grid, s, 0, 0), m10 = moment2d(r.grid, s, 1, 0);
    const double m01 = moment2d(r.grid, s, 0, 1), m11 = moment2d(r.grid, s, 1, 1);
    std::vector<double> row = {t, m00, m10, m01, m11};
    if (ref) {
      if (ref->m00) row.push_back(relative_moment_error(ref->m00(t), m00));
      if (ref->m11) row.push_back(relative_moment_error(ref->m11(t), m11));
      if (ref->m10) row.push_back(relative_moment_error(ref->m10(t), m10));
      if (ref->m01) row.push_back(relative_moment_error(ref->m01(t), m01));
    }
    rows.push_back(row);
  }
  write_csv(out_dir + "/moments.csv", header, rows);

  if (cfg.write_density) {
    std::vector<std::vector<double>> drows;
    const auto& nf = r.series.states.back();
    for (int i = 0; i < I1; ++i)
      for (int j = 0; j < I2; ++j)
        drows.push_back({static_cast<double>(i), static_cast<double>(j),
                         r.grid.axis1.pivots[i], r.grid.axis2.pivots[j],
                         nf[static_cast<std::size_t>(i) * I2 + j]});
    write_csv(out_dir + "/density.csv", {"i", "j", "x1", "x2", "count"}, drows);
  }

  nlohmann::json diag;
  diag["scheme"] = cfg.scheme;
  diag["kernel"] = cfg.kernel;
  diag["grid_axis1"] = grid_to_json(r.grid.axis1);
  diag["grid_axis2"] = grid_to_json(r.grid.axis2);
  diag["clamp_number_error"] = r.clamp_number_error;
  diag["clipped_negativity"] = r.series.clipped_negativity;
  diag["accepted_steps"] = r.series.accepted_steps;
  diag["rejected_steps"] = r.series.rejected_steps;
  open_output(out_dir + "/diagnostics.json") << diag.dump(2) << "\n";
}

/// One EOC report per configured family, written as eoc.csv (family-tagged
/// rows) and eoc.md (Markdown table).
inline std::vector<EocReport> run_eoc(const RunConfig& cfg, const std::string& out_dir) {
  std::vector<EocReport> reports;
  for (const auto& family : cfg.families) {
    EocConfig ec;
    ec.scheme = cfg.scheme;
    ec.kernel = cfg.kernel;
    ec.family = family;
    ec.x_min = cfg.grid.x_min;
    ec.x_max = cfg.grid.x_max;
    ec.base_cells = cfg.grid.cells;
    ec.doublings = cfg.doublings;
    ec.t_end = cfg.t_end;
    ec.seed = cfg.grid.seed;
    ec.max_ratio = cfg.grid.max_ratio;
    ec.segments = cfg.grid.segments;
    ec.surrogate_extra_doublings = cfg.surrogate_extra_doublings;
    ec.integrator = cfg.integrator;
    reports.push_back(eoc_study(ec));
  }
  auto f = open_output(out_dir + "/eoc.csv");
  f << "family,cells,l1_error,l1_error_rel,eoc\n";
  for (const auto& rep : reports)
    for (const auto& row : rep.rows)
      f << rep.family << "," << row.cells << "," << format_double(row.error_abs) << ","
        << format_double(row.error_rel) << "," << format_double(row.eoc) << "\n";
  write_eoc_markdown(out_dir + "/eoc.md", reports);
  return reports;
}

}  // namespace vambreak

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vambreak/experiment.hpp"
#include "vambreak/io.hpp"
#include "vambreak/kernels.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config_path, "JSON run configuration");
  if (config_required) c->required();
  cmd->add_option("--out", f.out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", f.seed, "override the configured random-grid seed");
  cmd->add_flag("--quiet", f.quiet, "suppress progress output");
}

vambreak::RunConfig load_config(const CommonFlags& f) {
  std::ifstream in(f.config_path);
  if (!in) throw std::invalid_argument("cannot read config: " + f.config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
  vambreak::RunConfig cfg = vambreak::parse_run_config(j);
  if (f.seed) {
    cfg.grid.seed = *f.seed;
    cfg.grid2.seed = *f.seed;
  }
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::invalid_argument("cannot create output directory " + dir);
}

int cmd_run(const CommonFlags& f) {
  const vambreak::RunConfig cfg = load_config(f);
  ensure_out_dir(f.out_dir);
  if (cfg.dimension == 1) {
    const auto r = vambreak::run_1d(cfg);
    vambreak::write_run_outputs(cfg, r, f.out_dir);
    if (!f.quiet)
      std::cout << "run: " << cfg.scheme << " " << cfg.kernel << " to t=" << cfg.t_end
                << ", max relative mass drift " << vambreak::format_double(r.max_mass_drift)
                << "\n";
  } else {
    const auto r = vambreak::run_2d(cfg);
    vambreak::write_run_outputs2d(cfg, r, f.out_dir);
    if (!f.quiet)
      std::cout << "run: " << cfg.scheme << " " << cfg.kernel << " to t=" << cfg.t_end << "\n";
  }
  return 0;
}

int cmd_eoc(const CommonFlags& f, int doublings_override) {
  vambreak::RunConfig cfg = load_config(f);
  if (cfg.dimension != 1) throw std::invalid_argument("eoc supports 1d configs only");
  if (doublings_override > 0) cfg.doublings = doublings_override;
  ensure_out_dir(f.out_dir);
  const auto reports = vambreak::run_eoc(cfg, f.out_dir);
  if (!f.quiet)
    for (const auto& rep : reports)
      std::cout << "eoc " << rep.family << ": final " << rep.rows.back().eoc
                << (rep.surrogate_reference ? " (surrogate reference)" : "") << "\n";
  return 0;
}

int cmd_grid(const CommonFlags& f) {
  const vambreak::RunConfig cfg = load_config(f);
  ensure_out_dir(f.out_dir);
  const vambreak::Grid g = vambreak::build_grid(cfg.grid);
  vambreak::open_output(f.out_dir + "/grid.json") << vambreak::grid_to_json(g).dump(2) << "\n";
  vambreak::write_grid_csv(f.out_dir + "/grid.csv", g);
  if (!f.quiet)
    std::cout << "grid: " << vambreak::to_string(g.kind) << ", " << g.cells()
              << " cells, width ratio " << g.width_ratio() << "\n";
  return 0;
}

int cmd_validate_kernel(const CommonFlags& f, const std::string& name) {
  const vambreak::KernelSpec spec = vambreak::builtin(name);
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 10; ++i) {
    const double y = std::pow(10.0, -4.0 + 4.0 * i / 9.0);
    samples.emplace_back(y, 0.5 * y);
  }
  const auto report = vambreak::validate(spec, samples);
  nlohmann::json j;
  j["kernel"] = name;
  j["all_pass"] = report.all_pass();
  for (const auto& e : report.entries) {
    j["properties"][e.property]["pass"] = e.pass;
    j["properties"][e.property]["max_residual"] = e.max_residual;
    if (!f.quiet)
      std::cout << e.property << ": " << (e.pass ? "pass" : "FAIL")
                << " (max residual " << vambreak::format_double(e.max_residual) << ")\n";
  }
  ensure_out_dir(f.out_dir);
  vambreak::open_output(f.out_dir + "/validation.json") << j.dump(2) << "\n";
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sectional solver for collision-induced nonlinear breakage"};
  app.require_subcommand(1);

  CommonFlags run_flags, eoc_flags, grid_flags, vk_flags;
  int doublings = 0;
  std::string kernel_name;

  auto* run = app.add_subcommand("run", "integrate one configured experiment");
  add_common(run, run_flags, true);

  auto* eoc = app.add_subcommand("eoc", "grid-refinement convergence study");
  add_common(eoc, eoc_flags, true);
  eoc->add_option("--doublings", doublings, "override the number of grid doublings");

  auto* grid = app.add_subcommand("grid", "emit the configured grid as JSON/CSV");
  add_common(grid, grid_flags, true);

  auto* vk = app.add_subcommand("validate-kernel", "check kernel invariants");
  add_common(vk, vk_flags, false);
  vk->add_option("--name", kernel_name, "builtin kernel <collision>:<breakage>")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (eoc->parsed()) return cmd_eoc(eoc_flags, doublings);
    if (grid->parsed()) return cmd_grid(grid_flags);
    if (vk->parsed()) return cmd_validate_kernel(vk_flags, kernel_name);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return 0;
}

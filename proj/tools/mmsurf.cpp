// Command-line front end: surface, compare and bench subcommands.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmsurf/error.hpp"
#include "mmsurf/pipeline.hpp"

namespace {

void add_common(CLI::App* cmd, mmsurf::RunConfig& cfg, std::string& format, std::string& solver,
                std::string& kind, std::vector<std::string>& slices, std::optional<double>& level,
                std::optional<double>& epsilon, std::optional<int>& stencil,
                std::optional<double>& spacing, std::optional<double>& margin) {
  cmd->add_option("--input", cfg.input, "molecule file (xyzr or pqr)");
  cmd->add_option("--format", format, "input format: xyzr|pqr")->capture_default_str();
  auto* grid = cmd->add_option("--grid", cfg.grid, "points per axis")->capture_default_str();
  cmd->add_option("--spacing", spacing, "target grid spacing (A)")->excludes(grid);
  cmd->add_option("--margin", margin, "box margin beyond the atoms (A)");
  cmd->add_option("--rho0", cfg.rho0, "bulk solvent density")->capture_default_str();
  cmd->add_option("--probe", cfg.probe_radius, "probe radius (A)")->capture_default_str();
  cmd->add_option("--time", cfg.time, "evolution time (A^2 at D=1)")->capture_default_str();
  cmd->add_option("--diffusion", cfg.diffusion, "bulk diffusion rate")->capture_default_str();
  cmd->add_option("--solver", solver, "lsek|fd")->capture_default_str();
  cmd->add_option("--mh", cfg.hermite_degree, "highest Hermite degree")->capture_default_str();
  cmd->add_option("--stencil", stencil, "stencil half-width (default: cover 8 window widths, >= 32)");
  cmd->add_option("--sigma-ratio", cfg.sigma_ratio, "window width in grid spacings")->capture_default_str();
  cmd->add_option("--surface", kind, "vdw|sas|ses|midway|custom")->capture_default_str();
  cmd->add_option("--level", level, "isovalue (custom, or ses override)");
  cmd->add_option("--epsilon", epsilon, "vdw/sas isovalue (default 1e-3 rho0)");
  cmd->add_option("--atom-radius", cfg.atom_radius, "midway calibration radius (default: most common)");
  cmd->add_option("--out-mesh", cfg.out_mesh, "OBJ output path");
  cmd->add_option("--slice", slices, "slice contour, axis=coord (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmd->add_option("--out-contours", cfg.out_contours, "contour CSV path prefix")->capture_default_str();
  cmd->add_option("--out-grid", cfg.out_grid, "raw density dump path");
  cmd->add_option("--workers", cfg.workers, "worker threads (0 = hardware)")->capture_default_str();
}

// Entries of a --config file become flags placed right after the subcommand,
// so anything given on the command line overrides them.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty() || args.empty()) return args;
  std::vector<std::string> injected;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    for (const auto& value : item.inputs) {
      injected.push_back("--" + item.name);
      injected.push_back(value);
    }
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Molecular multiresolution surfaces from a diffused solvent density"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  mmsurf::RunConfig cfg;
  std::string format = "xyzr", solver = "lsek", kind = "ses";
  std::vector<std::string> slices;
  std::optional<double> level, epsilon, spacing, margin, fd_time;
  std::optional<int> stencil;

  auto* surface = app.add_subcommand("surface", "generate a surface mesh and slice contours");
  auto* compare = app.add_subcommand("compare", "cross-check the single-step kernel against finite differences");
  auto* bench = app.add_subcommand("bench", "time the single-step kernel sweep");
  for (auto* cmd : {surface, compare, bench}) {
    cmd->add_option("--config", "key=value configuration file; flags override it");
    add_common(cmd, cfg, format, solver, kind, slices, level, epsilon, stencil, spacing, margin);
  }
  compare->add_option("--bound", cfg.bound_factor, "mesh distance bound in grid spacings")->capture_default_str();
  compare->add_option("--fd-time", fd_time, "evolution time for the FD solver (negative controls)");
  bench->add_option("--n", cfg.bench_n, "base points per axis (also runs 2n)")->capture_default_str();
  bench->add_option("--reps", cfg.bench_reps, "repetitions, best time kept")->capture_default_str();

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.format = format;
    if (solver == "lsek")
      cfg.solver = mmsurf::Solver::lsek;
    else if (solver == "fd")
      cfg.solver = mmsurf::Solver::fd;
    else
      throw mmsurf::ConfigError("unknown solver '" + solver + "'");
    cfg.surface.kind = mmsurf::parse_surface_kind(kind);
    cfg.surface.level = level;
    cfg.surface.epsilon = epsilon;
    cfg.stencil = stencil;
    cfg.spacing = spacing;
    cfg.margin = margin;
    cfg.fd_time = fd_time;
    for (const auto& s : slices) cfg.slices.push_back(mmsurf::parse_slice(s));
  } catch (const mmsurf::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (bench->parsed()) return mmsurf::cmd_bench(cfg, std::cout, std::cerr);
  if (cfg.input.empty()) {
    std::cerr << "error: --input is required\n";
    return 2;
  }
  if (compare->parsed()) return mmsurf::cmd_compare(cfg, std::cout, std::cerr);
  return mmsurf::cmd_surface(cfg, std::cout, std::cerr);
}

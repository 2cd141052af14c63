#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmsurf/fd_oracle.hpp"
#include "mmsurf/grid.hpp"
#include "mmsurf/lsek.hpp"
#include "mmsurf/molecule_io.hpp"
#include "mmsurf/surface.hpp"

namespace mmsurf {

enum class Solver { lsek, fd };

struct SliceSpec {
  Axis axis = Axis::x;
  double coordinate = 0.0;
};

/// Parses "x=0.6".
SliceSpec parse_slice(const std::string& text);

struct RunConfig {
  std::string input;
  std::string format = "xyzr";
  double probe_radius = 1.5;
  double rho0 = 100.0;
  double time = 12.0;
  double diffusion = 1.0;
  std::size_t grid = 200;
  std::optional<double> spacing;  // overrides grid when set
  std::optional<double> margin;   // default: see default_margin
  Solver solver = Solver::lsek;
  int hermite_degree = 88;
  std::optional<int> stencil;  // unset: widen to cover the broadened window
  double sigma_ratio = 3.05;
  SurfaceRequest surface;
  std::optional<double> atom_radius;  // midway calibration radius
  std::string out_mesh;
  std::vector<SliceSpec> slices;
  std::string out_contours = "contours";
  std::string out_grid;
  int workers = 0;

  // compare
  double bound_factor = 1.5;
  std::optional<double> fd_time;  // FD solver time; differs from `time` only in negative controls
  // bench
  std::size_t bench_n = 100;
  int bench_reps = 3;

  /// Throws ConfigError.
  void validate() const;
};

/// probe + 4 sigma_t + 2 Angstrom, with sigma_t the broadened window width.
double default_margin(const RunConfig& cfg, double spacing_hint);

/// Domain grid for a molecule. An empty molecule gets a cube of half-width
/// margin around the origin.
GridSpec domain_grid(const Molecule& mol, const RunConfig& cfg);

std::array<KernelParams, 3> pipeline_kernels(const GridSpec& spec, const RunConfig& cfg);

struct StageTimes {
  double rasterize = 0, evolve = 0, extract = 0;
};

struct DensityResult {
  ScalarGrid3 density;
  VoxelMask vdw_mask;
  VoxelMask sas_mask;
  double kernel_l1 = 1.0;
  double kernel_sum = 1.0;
  int half_width = 0;
  StageTimes times;
};

/// SAS initialization, then one evolution: a single LSEK step with atom
/// interiors clamped to zero, or the FD oracle, whose insulating interiors
/// stay zero unaided.
DensityResult compute_density(const Molecule& mol, const GridSpec& spec, const RunConfig& cfg,
                              Solver solver);

LevelContext level_context(const Molecule& mol, const RunConfig& cfg);

/// Exit codes: 0 ok, 1 compare failed, 2 config error, 3 parse error, 4 numeric error.
int cmd_surface(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Writes through a temporary file and renames on success; nothing is left
/// behind when `writer` throws.
void write_file_atomically(const std::string& path, const std::function<void(std::ostream&)>& writer,
                           bool binary = false);

}  // namespace mmsurf

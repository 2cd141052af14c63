#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mmsurf/grid.hpp"

namespace mmsurf {

/// Per-node diffusion rate D(r).
class DiffusionField {
 public:
  DiffusionField() = default;
  DiffusionField(const GridSpec& spec, double fill) : spec_(spec), values_(spec.node_count(), fill) {}

  /// D = 0 inside the mask, d_bulk elsewhere.
  static DiffusionField from_mask(const VoxelMask& excluded, double d_bulk);

  const GridSpec& spec() const { return spec_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double max_value() const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Outer-wall treatment per axis. Dirichlet walls hold their nodes at a fixed
/// value; insulating walls pass no flux.
struct FdBoundary {
  enum class Wall { dirichlet, insulating };
  std::array<Wall, 3> walls{Wall::dirichlet, Wall::dirichlet, Wall::dirichlet};
  double value = 0.0;

  static FdBoundary dirichlet(double v) { return {{Wall::dirichlet, Wall::dirichlet, Wall::dirichlet}, v}; }
  static FdBoundary insulating() { return {{Wall::insulating, Wall::insulating, Wall::insulating}, 0.0}; }
};

struct FdParams {
  double dt = 0.0;
  std::size_t steps = 0;
};

/// dt <= min(h)^2 / (6 max D).
double fd_cfl_bound(const GridSpec& spec, double max_diffusion);

/// 0.9 x the CFL bound, shortened so a whole number of steps lands on t.
FdParams default_fd_params(const GridSpec& spec, double max_diffusion, double t);

/// One forward-Euler step of d(rho)/dt = div(D grad rho). A face carries flux
/// only when both adjacent nodes have D > 0; its rate is the harmonic mean.
ScalarGrid3 fd_step(const ScalarGrid3& density, const DiffusionField& dfield, double dt,
                    const FdBoundary& boundary, int workers = 0);
inline ScalarGrid3 fd_step(const ScalarGrid3& density, const DiffusionField& dfield, double dt,
                           double boundary_value, int workers = 0) {
  return fd_step(density, dfield, dt, FdBoundary::dirichlet(boundary_value), workers);
}

/// Integrates to time t in params.steps steps; the last step is shortened so
/// the steps sum to t exactly.
ScalarGrid3 fd_solve(const ScalarGrid3& density0, const DiffusionField& dfield, double t,
                     const FdParams& params, const FdBoundary& boundary, int workers = 0);
inline ScalarGrid3 fd_solve(const ScalarGrid3& density0, const DiffusionField& dfield, double t,
                            const FdParams& params, double boundary_value, int workers = 0) {
  return fd_solve(density0, dfield, t, params, FdBoundary::dirichlet(boundary_value), workers);
}

/// Radial density around one insulating atom.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> rho;

  /// Linear interpolation; r must lie inside the profile.
  double at(double radius) const;
};

/// Spherically symmetric diffusion on [atom_radius, r_max]: zero flux at the
/// atom, rho0 at r_max, initially 0 up to atom_radius + probe_radius.
/// dt defaults to 0.4 dr^2.
RadialProfile radial_solve(double atom_radius, double probe_radius, double rho0, double t,
                           double dr, double r_max, std::optional<double> dt = std::nullopt);

}  // namespace mmsurf

#include "mmsurf/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "mmsurf/error.hpp"
#include "mmsurf/parallel.hpp"

namespace mmsurf {

DiffusionField DiffusionField::from_mask(const VoxelMask& excluded, double d_bulk) {
  DiffusionField f(excluded.spec(), d_bulk);
  for (std::size_t n = 0; n < f.values_.size(); ++n)
    if (excluded.inside(n)) f.values_[n] = 0.0;
  return f;
}

double DiffusionField::max_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

double fd_cfl_bound(const GridSpec& spec, double max_diffusion) {
  const double h = spec.min_spacing();
  if (max_diffusion <= 0.0) return std::numeric_limits<double>::infinity();
  return h * h / (6.0 * max_diffusion);
}

FdParams default_fd_params(const GridSpec& spec, double max_diffusion, double t) {
  if (!(t >= 0.0)) throw DomainError("evolution time must be non-negative");
  FdParams p;
  if (t == 0.0) return p;
  const double dt0 = 0.9 * fd_cfl_bound(spec, max_diffusion);
  p.steps = std::isfinite(dt0) ? static_cast<std::size_t>(std::ceil(t / dt0)) : 1;
  p.dt = t / static_cast<double>(p.steps);
  return p;
}

namespace {

// Face conductances D_face / h^2 for the +x, +y, +z face of every node.
struct FdOperator {
  GridSpec spec;
  std::array<std::vector<double>, 3> forward;

  explicit FdOperator(const DiffusionField& d) : spec(d.spec()) {
    const auto& dv = d.values();
    const std::size_t n = spec.node_count();
    const std::array<std::size_t, 3> stride{1, spec.counts[0], spec.counts[0] * spec.counts[1]};
    for (int ax = 0; ax < 3; ++ax) {
      forward[ax].assign(n, 0.0);
      const double inv_h2 = 1.0 / (spec.spacing[ax] * spec.spacing[ax]);
      for (std::size_t k = 0; k < spec.counts[2]; ++k)
        for (std::size_t j = 0; j < spec.counts[1]; ++j)
          for (std::size_t i = 0; i < spec.counts[0]; ++i) {
            const std::array<std::size_t, 3> ijk{i, j, k};
            if (ijk[ax] + 1 >= spec.counts[ax]) continue;
            const std::size_t a = spec.index(i, j, k);
            const double da = dv[a], db = dv[a + stride[ax]];
            const double face = (da > 0.0 && db > 0.0) ? 2.0 * da * db / (da + db) : 0.0;
            forward[ax][a] = face * inv_h2;
          }
    }
  }

  void step(const std::vector<double>& in, std::vector<double>& out, double dt,
            const FdBoundary& boundary, int workers) const {
    const std::size_t nx = spec.counts[0], ny = spec.counts[1], nz = spec.counts[2];
    const std::array<std::size_t, 3> stride{1, nx, nx * ny};
    const bool dir[3] = {boundary.walls[0] == FdBoundary::Wall::dirichlet,
                         boundary.walls[1] == FdBoundary::Wall::dirichlet,
                         boundary.walls[2] == FdBoundary::Wall::dirichlet};
    parallel_for(nz, workers, [&](std::size_t k0, std::size_t k1) {
      for (std::size_t k = k0; k < k1; ++k)
        for (std::size_t j = 0; j < ny; ++j)
          for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t n = i + nx * (j + ny * k);
            const std::array<std::size_t, 3> ijk{i, j, k};
            bool held = false;
            for (int ax = 0; ax < 3; ++ax)
              if (dir[ax] && (ijk[ax] == 0 || ijk[ax] + 1 == spec.counts[ax])) held = true;
            if (held) {
              out[n] = boundary.value;
              continue;
            }
            const double c = in[n];
            double lap = 0.0;
            for (int ax = 0; ax < 3; ++ax) {
              if (ijk[ax] > 0) lap += forward[ax][n - stride[ax]] * (in[n - stride[ax]] - c);
              if (ijk[ax] + 1 < spec.counts[ax]) lap += forward[ax][n] * (in[n + stride[ax]] - c);
            }
            out[n] = c + dt * lap;
          }
    });
  }
};

void check_inputs(const ScalarGrid3& density, const DiffusionField& dfield, double dt) {
  if (!(density.spec() == dfield.spec())) throw ShapeError("diffusion field grid differs from density grid");
  const double bound = fd_cfl_bound(density.spec(), dfield.max_value());
  if (!(dt > 0.0)) throw NumericError("time step must be positive");
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " exceeds the stability bound " << bound;
    throw NumericError(msg.str());
  }
}

}  // namespace

ScalarGrid3 fd_step(const ScalarGrid3& density, const DiffusionField& dfield, double dt,
                    const FdBoundary& boundary, int workers) {
  check_inputs(density, dfield, dt);
  FdOperator op(dfield);
  ScalarGrid3 out(density.spec());
  op.step(density.values(), out.values(), dt, boundary, workers);
  return out;
}

ScalarGrid3 fd_solve(const ScalarGrid3& density0, const DiffusionField& dfield, double t,
                     const FdParams& params, const FdBoundary& boundary, int workers) {
  if (!(t >= 0.0)) throw DomainError("evolution time must be non-negative");
  if (t == 0.0 || params.steps == 0) {
    if (t != 0.0) throw ConfigError("zero steps cannot reach a positive time");
    return density0;
  }
  check_inputs(density0, dfield, params.dt);
  const double last = t - static_cast<double>(params.steps - 1) * params.dt;
  if (!(last > 0.0) || last > params.dt * (1.0 + 1e-9))
    throw ConfigError("steps * dt does not cover the evolution time");
  FdOperator op(dfield);
  std::vector<double> a = density0.values();
  std::vector<double> b(a.size());
  for (std::size_t s = 0; s < params.steps; ++s) {
    const double dt = s + 1 == params.steps ? std::min(last, params.dt) : params.dt;
    op.step(a, b, dt, boundary, workers);
    std::swap(a, b);
  }
  ScalarGrid3 out(density0.spec());
  out.values() = std::move(a);
  return out;
}

double RadialProfile::at(double radius) const {
  if (r.empty() || radius < r.front() || radius > r.back())
    throw DomainError("radius outside the radial profile");
  auto it = std::upper_bound(r.begin(), r.end(), radius);
  if (it == r.end()) return rho.back();
  const std::size_t i = static_cast<std::size_t>(it - r.begin());
  const double f = (radius - r[i - 1]) / (r[i] - r[i - 1]);
  return rho[i - 1] + f * (rho[i] - rho[i - 1]);
}

RadialProfile radial_solve(double atom_radius, double probe_radius, double rho0, double t,
                           double dr, double r_max, std::optional<double> dt) {
  if (!(atom_radius > 0.0) || !(probe_radius >= 0.0)) throw DomainError("bad atom or probe radius");
  if (!(dr > 0.0)) throw DomainError("radial spacing must be positive");
  if (!(t >= 0.0)) throw DomainError("evolution time must be non-negative");
  const double sas = atom_radius + probe_radius;
  if (!(r_max > sas + 4.0 * std::sqrt(2.0 * t)))
    throw DomainError("r_max must exceed atom + probe + 4 sqrt(2t)");

  const auto cells = static_cast<std::size_t>(std::ceil((r_max - atom_radius) / dr - 1e-9));
  const double h = (r_max - atom_radius) / static_cast<double>(cells);
  const std::size_t n = cells + 1;
  RadialProfile prof;
  prof.r.resize(n);
  prof.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    prof.r[i] = atom_radius + static_cast<double>(i) * h;
    prof.rho[i] = prof.r[i] <= sas + 1e-12 ? 0.0 : rho0;
  }
  prof.rho[n - 1] = rho0;
  if (t == 0.0) return prof;

  // Finite volumes around each node; the first one is a half cell against the atom.
  std::vector<double> area(n - 1), vol(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rf = prof.r[i] + 0.5 * h;
    area[i] = rf * rf;
  }
  double max_rate = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lo = i == 0 ? atom_radius : prof.r[i] - 0.5 * h;
    const double hi = prof.r[i] + 0.5 * h;
    vol[i] = (hi * hi * hi - lo * lo * lo) / 3.0;
    const double out_area = area[i] + (i > 0 ? area[i - 1] : 0.0);
    max_rate = std::max(max_rate, out_area / (h * vol[i]));
  }
  const double bound = 1.0 / max_rate;
  double step = dt.value_or(0.9 * bound);
  if (step > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "radial time step " << step << " exceeds the stability bound " << bound;
    throw NumericError(msg.str());
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t / step));
  step = t / static_cast<double>(steps);

  std::vector<double> flux(n - 1);
  auto& rho = prof.rho;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i + 1 < n; ++i) flux[i] = area[i] * (rho[i + 1] - rho[i]) / h;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double net = flux[i] - (i > 0 ? flux[i - 1] : 0.0);
      rho[i] += step * net / vol[i];
    }
  }
  return prof;
}

}  // namespace mmsurf

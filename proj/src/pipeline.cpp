#include "mmsurf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "mmsurf/error.hpp"

namespace mmsurf {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* axis_name(Axis a) { return a == Axis::x ? "x" : (a == Axis::y ? "y" : "z"); }

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

// Maps library exceptions onto the documented exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const LookupError& e) {
    err << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace

SliceSpec parse_slice(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("slice must look like axis=coordinate: '" + text + "'");
  const std::string axis = text.substr(0, eq);
  SliceSpec s;
  if (axis == "x")
    s.axis = Axis::x;
  else if (axis == "y")
    s.axis = Axis::y;
  else if (axis == "z")
    s.axis = Axis::z;
  else
    throw ConfigError("slice axis must be x, y or z: '" + text + "'");
  try {
    std::size_t used = 0;
    s.coordinate = std::stod(text.substr(eq + 1), &used);
    if (used != text.size() - eq - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("bad slice coordinate in '" + text + "'");
  }
  return s;
}

void RunConfig::validate() const {
  if (!(probe_radius >= 0.0)) throw ConfigError("probe radius must be >= 0");
  if (!(rho0 > 0.0)) throw ConfigError("rho0 must be > 0");
  if (!(time >= 0.0)) throw ConfigError("time must be >= 0");
  if (!(diffusion >= 0.0)) throw ConfigError("diffusion must be >= 0");
  if (!spacing && grid < 2) throw ConfigError("grid needs at least 2 points per axis");
  if (spacing && !(*spacing > 0.0)) throw ConfigError("spacing must be > 0");
  if (margin && !(*margin >= 0.0)) throw ConfigError("margin must be >= 0");
  if (hermite_degree < 0 || hermite_degree % 2 != 0) throw ConfigError("--mh must be even");
  if (stencil && *stencil < 1) throw ConfigError("--stencil must be >= 1");
  if (!(sigma_ratio > 0.0)) throw ConfigError("--sigma-ratio must be > 0");
  if (workers < 0) throw ConfigError("--workers must be >= 0");
  if (surface.kind == SurfaceKind::custom && !surface.level)
    throw ConfigError("--surface custom needs --level");
  if (surface.epsilon && !(*surface.epsilon > 0.0)) throw ConfigError("--epsilon must be > 0");
  if (fd_time && !(*fd_time >= 0.0)) throw ConfigError("--fd-time must be >= 0");
  if (!(bound_factor > 0.0)) throw ConfigError("--bound must be > 0");
}

double default_margin(const RunConfig& cfg, double spacing_hint) {
  const double sigma = cfg.sigma_ratio * spacing_hint;
  const double st = std::sqrt(sigma * sigma + 2.0 * cfg.diffusion * cfg.time);
  return cfg.probe_radius + 4.0 * st + 2.0;
}

GridSpec domain_grid(const Molecule& mol, const RunConfig& cfg) {
  Resolution res = cfg.spacing ? Resolution{TargetSpacing{*cfg.spacing}}
                               : Resolution{Counts{{cfg.grid, cfg.grid, cfg.grid}}};
  auto box_for = [&](double margin) {
    if (mol.empty()) return Box{{-margin, -margin, -margin}, {margin, margin, margin}};
    return bounding_box(mol, margin);
  };
  if (cfg.margin) return build_grid(box_for(*cfg.margin), res);
  // The window width depends on the spacing, which depends on the margin.
  GridSpec first = build_grid(box_for(default_margin(cfg, 0.0)), res);
  return build_grid(box_for(default_margin(cfg, first.max_spacing())), res);
}

std::array<KernelParams, 3> pipeline_kernels(const GridSpec& spec, const RunConfig& cfg) {
  std::array<KernelParams, 3> out;
  for (int ax = 0; ax < 3; ++ax) {
    KernelParams p;
    p.hermite_degree = cfg.hermite_degree;
    p.half_width = 32;
    p.sigma = cfg.sigma_ratio * spec.spacing[ax];
    p.spacing = spec.spacing[ax];
    p.diffusion = cfg.diffusion;
    p.time = cfg.time;
    p.half_width = cfg.stencil ? *cfg.stencil : covering_half_width(p);
    out[ax] = p;
  }
  return out;
}

DensityResult compute_density(const Molecule& mol, const GridSpec& spec, const RunConfig& cfg,
                              Solver solver) {
  DensityResult r;
  auto t0 = std::chrono::steady_clock::now();
  r.sas_mask = rasterize_spheres(mol, cfg.probe_radius, spec, cfg.workers);
  r.vdw_mask = rasterize_spheres(mol, 0.0, spec, cfg.workers);
  ScalarGrid3 rho = init_density(spec, r.sas_mask, cfg.rho0);
  r.times.rasterize = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  if (solver == Solver::lsek) {
    const auto params = pipeline_kernels(spec, cfg);
    std::array<KernelWeights, 3> w;
    r.kernel_l1 = 1.0;
    r.kernel_sum = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
      w[ax] = kernel_weights(params[ax]);
      r.kernel_l1 *= w[ax].l1_norm();
      r.kernel_sum *= w[ax].sum();
      r.half_width = std::max(r.half_width, params[ax].half_width);
    }
    rho = evolve_3d(rho, w, cfg.rho0, cfg.workers);
  } else {
    const double t = cfg.fd_time.value_or(cfg.time);
    const auto dfield = DiffusionField::from_mask(r.vdw_mask, cfg.diffusion);
    const auto fp = default_fd_params(spec, cfg.diffusion, t);
    rho = fd_solve(rho, dfield, t, fp, cfg.rho0, cfg.workers);
  }
  // FD keeps D = 0 interiors at zero by itself; only the kernel sweep leaks into atoms.
  r.density = solver == Solver::lsek ? clamp_excluded(std::move(rho), r.vdw_mask) : std::move(rho);
  r.times.evolve = seconds_since(t0);
  return r;
}

LevelContext level_context(const Molecule& mol, const RunConfig& cfg) {
  LevelContext c;
  c.rho0 = cfg.rho0;
  c.probe_radius = cfg.probe_radius;
  c.time = cfg.time;
  c.diffusion = cfg.diffusion;
  if (cfg.atom_radius)
    c.atom_radius = cfg.atom_radius;
  else if (!mol.empty())
    c.atom_radius = most_common_radius(mol);
  return c;
}

void write_file_atomically(const std::string& path, const std::function<void(std::ostream&)>& writer,
                           bool binary) {
  const std::string tmp = path + ".tmp";
  try {
    {
      std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
      if (!out) throw ConfigError("cannot write '" + path + "'");
      writer(out);
      out.flush();
      if (!out) throw ConfigError("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

namespace {

std::string contour_path(const RunConfig& cfg, const SliceSpec& s) {
  std::ostringstream p;
  p << cfg.out_contours << '_' << axis_name(s.axis) << s.coordinate << ".csv";
  return p.str();
}

}  // namespace

int cmd_surface(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const Molecule mol = read_molecule(cfg.input, cfg.format);
    const GridSpec spec = domain_grid(mol, cfg);

    DensityResult dens;
    if (cfg.surface.kind == SurfaceKind::sas) {
      // The solvent accessible surface is marked by the initial density.
      auto t0 = std::chrono::steady_clock::now();
      dens.sas_mask = rasterize_spheres(mol, cfg.probe_radius, spec, cfg.workers);
      dens.density = init_density(spec, dens.sas_mask, cfg.rho0);
      dens.times.rasterize = seconds_since(t0);
    } else {
      dens = compute_density(mol, spec, cfg, cfg.solver);
    }
    const double level = resolve_level(cfg.surface, level_context(mol, cfg));

    auto t0 = std::chrono::steady_clock::now();
    const TriangleMesh mesh = marching_cubes(dens.density, level);
    std::vector<std::pair<SliceSpec, ContourSet>> contours;
    for (const auto& s : cfg.slices)
      contours.emplace_back(s, slice_contours(dens.density, s.axis, s.coordinate, level));
    dens.times.extract = seconds_since(t0);

    if (!cfg.out_mesh.empty())
      write_file_atomically(cfg.out_mesh, [&](std::ostream& o) { write_obj(o, mesh); });
    for (const auto& [s, c] : contours)
      write_file_atomically(contour_path(cfg, s), [&](std::ostream& o) { write_contours_csv(o, c); });
    if (!cfg.out_grid.empty())
      write_file_atomically(cfg.out_grid, [&](std::ostream& o) { write_grid(o, dens.density); }, true);

    out << "surface kind=" << to_string(cfg.surface.kind)
        << " solver=" << (cfg.solver == Solver::lsek ? "lsek" : "fd") << " atoms=" << mol.size()
        << " nodes=" << spec.node_count() << " spacing=" << number(spec.max_spacing())
        << " stencil=" << dens.half_width << " kernel_l1=" << number(dens.kernel_l1)
        << " kernel_sum=" << number(dens.kernel_sum) << " level=" << number(level)
        << " vertices=" << mesh.vertices.size() << " triangles=" << mesh.triangles.size()
        << " closed=" << (is_closed(mesh) ? 1 : 0) << " area=" << number(mesh_area(mesh))
        << " t_rasterize=" << number(dens.times.rasterize) << " t_evolve=" << number(dens.times.evolve)
        << " t_extract=" << number(dens.times.extract) << '\n';
    return 0;
  });
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const Molecule mol = read_molecule(cfg.input, cfg.format);
    const GridSpec spec = domain_grid(mol, cfg);
    const double h = spec.max_spacing();

    const DensityResult lsek = compute_density(mol, spec, cfg, Solver::lsek);
    const DensityResult fd = compute_density(mol, spec, cfg, Solver::fd);

    // Nodes 0.5h..3h outside the solvent accessible surface.
    const VoxelMask outer = rasterize_spheres(mol, cfg.probe_radius + 3.0 * h, spec, cfg.workers);
    const VoxelMask inner = rasterize_spheres(mol, cfg.probe_radius + 0.5 * h, spec, cfg.workers);
    double band_diff = 0.0;
    std::size_t band_nodes = 0;
    for (std::size_t n = 0; n < spec.node_count(); ++n) {
      if (!outer.inside(n) || inner.inside(n)) continue;
      ++band_nodes;
      band_diff = std::max(band_diff, std::abs(lsek.density.values()[n] - fd.density.values()[n]));
    }

    const double level = resolve_level(cfg.surface, level_context(mol, cfg));
    const TriangleMesh ma = marching_cubes(lsek.density, level);
    const TriangleMesh mb = marching_cubes(fd.density, level);
    double dist = 0.0;
    if (ma.empty() != mb.empty())
      dist = std::numeric_limits<double>::infinity();
    else if (!ma.empty())
      dist = mesh_distance(ma, mb);
    const double bound = cfg.bound_factor * h;
    const bool pass = dist <= bound;

    out << "compare atoms=" << mol.size() << " nodes=" << spec.node_count() << " spacing=" << number(h)
        << " level=" << number(level) << " band_nodes=" << band_nodes
        << " max_band_diff=" << number(band_diff) << " lsek_triangles=" << ma.triangles.size()
        << " fd_triangles=" << mb.triangles.size() << " mesh_distance=" << number(dist)
        << " bound=" << number(bound) << " result=" << (pass ? "pass" : "fail") << '\n';
    if (cfg.surface.kind != SurfaceKind::custom)
      out << "note: agreement is checked against the finite-difference solver, not an external "
             "surface program\n";
    return pass ? 0 : 1;
  });
}

namespace {

struct BenchSample {
  EvolveTiming axes;
  double total = 0.0;
};

BenchSample bench_once(std::size_t n, int half_width, const RunConfig& cfg, int reps) {
  const double h = 0.1;
  GridSpec spec;
  spec.origin = {0, 0, 0};
  spec.spacing = {h, h, h};
  spec.counts = {n, n, n};
  ScalarGrid3 rho(spec, cfg.rho0);
  const double c = 0.5 * h * static_cast<double>(n - 1), r = 0.3 * h * static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p = spec.node(i, j, k);
        if (distance(p, Vec3{c, c, c}) <= r) rho.at(i, j, k) = 0.0;
      }
  KernelParams p = KernelParams::standard(h, cfg.diffusion, cfg.time);
  p.hermite_degree = cfg.hermite_degree;
  p.sigma = cfg.sigma_ratio * h;
  p.half_width = half_width;
  const KernelWeights w = kernel_weights(p);
  BenchSample best;
  best.total = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < std::max(1, reps); ++rep) {
    BenchSample s;
    const auto t0 = std::chrono::steady_clock::now();
    const ScalarGrid3 out = evolve_3d(rho, {w, w, w}, cfg.rho0, cfg.workers, kXYZ, &s.axes);
    s.total = seconds_since(t0);
    if (out.values().empty()) throw NumericError("empty benchmark output");
    if (s.total < best.total) best = s;
  }
  return best;
}

}  // namespace

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    if (cfg.bench_n < 2) throw ConfigError("benchmark grid needs at least 2 points per axis");
    const int m = cfg.stencil.value_or(32);
    if (m < 2) throw ConfigError("benchmark stencil must be >= 2");
    const std::size_t n = cfg.bench_n;
    const BenchSample small = bench_once(n, m, cfg, cfg.bench_reps);
    const BenchSample large = bench_once(2 * n, m, cfg, cfg.bench_reps);
    const BenchSample half = bench_once(n, m / 2, cfg, cfg.bench_reps);
    auto line = [&](const char* tag, std::size_t size, int stencil, const BenchSample& s) {
      const double nodes = static_cast<double>(size * size * size);
      out << "bench run=" << tag << " n=" << size << " stencil=" << stencil
          << " t_x=" << number(s.axes.axis_seconds[0]) << " t_y=" << number(s.axes.axis_seconds[1])
          << " t_z=" << number(s.axes.axis_seconds[2]) << " total=" << number(s.total)
          << " nodes_per_s=" << number(nodes / s.total) << '\n';
    };
    line("base", n, m, small);
    line("double_n", 2 * n, m, large);
    line("half_stencil", n, m / 2, half);
    out << "bench size_ratio=" << number(large.total / small.total)
        << " stencil_ratio=" << number(small.total / half.total) << '\n';
    return 0;
  });
}

}  // namespace mmsurf

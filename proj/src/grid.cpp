#include "mmsurf/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <string>

#include "mmsurf/error.hpp"
#include "mmsurf/parallel.hpp"

namespace mmsurf {

double GridSpec::min_spacing() const { return std::min({spacing[0], spacing[1], spacing[2]}); }
double GridSpec::max_spacing() const { return std::max({spacing[0], spacing[1], spacing[2]}); }

GridSpec build_grid(const Box& box, const Resolution& resolution) {
  GridSpec spec;
  spec.origin = box.lo;
  for (int ax = 0; ax < 3; ++ax) {
    const double ext = box.extent(ax);
    if (!(ext > 0.0) || !std::isfinite(ext)) throw DomainError("grid box has no extent on an axis");
    if (const auto* c = std::get_if<Counts>(&resolution)) {
      if (c->n[ax] < 2) throw DomainError("grid needs at least 2 points per axis");
      spec.counts[ax] = c->n[ax];
    } else {
      const double h = std::get<TargetSpacing>(resolution).h;
      if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
      // Tolerate round-off in extents that are exact multiples of h.
      const double cells = std::ceil(ext / h - 1e-9);
      spec.counts[ax] = static_cast<std::size_t>(std::max(1.0, cells)) + 1;
    }
    spec.spacing[ax] = ext / static_cast<double>(spec.counts[ax] - 1);
  }
  return spec;
}

double ScalarGrid3::sample(const Vec3& p) const {
  std::array<std::size_t, 3> i0{};
  std::array<double, 3> f{};
  for (int ax = 0; ax < 3; ++ax) {
    const std::size_t n = spec_.counts[ax];
    double u = (p[ax] - spec_.origin[ax]) / spec_.spacing[ax];
    u = std::clamp(u, 0.0, static_cast<double>(n - 1));
    auto base = static_cast<std::size_t>(std::floor(u));
    if (base >= n - 1) base = n - 2;
    i0[ax] = base;
    f[ax] = u - static_cast<double>(base);
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
    acc += w * at(i0[0] + dx, i0[1] + dy, i0[2] + dz);
  }
  return acc;
}

std::size_t VoxelMask::inside_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// Atoms bucketed into a uniform cell grid whose cell side is at least the
// largest inflated radius, so any sphere touching a point lies in one of the
// 27 cells around it.
class AtomBuckets {
 public:
  AtomBuckets(const Molecule& mol, double offset) : mol_(mol), offset_(offset) {
    double rmax = 0.0;
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto& a : mol.atoms) {
      rmax = std::max(rmax, a.radius + offset);
      for (int ax = 0; ax < 3; ++ax) {
        lo[ax] = std::min(lo[ax], a.center[ax]);
        hi[ax] = std::max(hi[ax], a.center[ax]);
      }
    }
    cell_ = std::max(rmax, 1e-6);
    lo_ = lo;
    for (int ax = 0; ax < 3; ++ax)
      n_[ax] = static_cast<long>(std::floor((hi[ax] - lo[ax]) / cell_)) + 1;
    buckets_.resize(static_cast<std::size_t>(n_[0] * n_[1] * n_[2]));
    for (std::uint32_t i = 0; i < mol.atoms.size(); ++i) {
      std::array<long, 3> c{};
      for (int ax = 0; ax < 3; ++ax) c[ax] = cell_of(mol.atoms[i].center[ax], ax);
      buckets_[flat(c)].push_back(i);
    }
  }

  bool covers(const Vec3& p) const {
    std::array<long, 3> c{};
    for (int ax = 0; ax < 3; ++ax) c[ax] = static_cast<long>(std::floor((p[ax] - lo_[ax]) / cell_));
    for (long dz = -1; dz <= 1; ++dz) {
      const long cz = c[2] + dz;
      if (cz < 0 || cz >= n_[2]) continue;
      for (long dy = -1; dy <= 1; ++dy) {
        const long cy = c[1] + dy;
        if (cy < 0 || cy >= n_[1]) continue;
        for (long dx = -1; dx <= 1; ++dx) {
          const long cx = c[0] + dx;
          if (cx < 0 || cx >= n_[0]) continue;
          for (std::uint32_t i : buckets_[flat({cx, cy, cz})]) {
            if (sphere_contains(mol_.atoms[i], offset_, p)) return true;
          }
        }
      }
    }
    return false;
  }

  static bool sphere_contains(const Atom& a, double offset, const Vec3& p) {
    const Vec3 d = p - a.center;
    const double r = a.radius + offset;
    return dot(d, d) <= r * r;
  }

 private:
  long cell_of(double v, int ax) const {
    return std::clamp(static_cast<long>(std::floor((v - lo_[ax]) / cell_)), 0L, n_[ax] - 1);
  }
  std::size_t flat(const std::array<long, 3>& c) const {
    return static_cast<std::size_t>(c[0] + n_[0] * (c[1] + n_[1] * c[2]));
  }

  const Molecule& mol_;
  double offset_;
  double cell_ = 1.0;
  Vec3 lo_;
  std::array<long, 3> n_{1, 1, 1};
  std::vector<std::vector<std::uint32_t>> buckets_;
};

void check_offset(const Molecule& mol, double offset) {
  if (!(offset >= 0.0)) throw DomainError("radius offset must be non-negative");
  for (const auto& a : mol.atoms)
    if (!(a.radius + offset > 0.0)) throw DomainError("inflated radius must be positive");
}

}  // namespace

VoxelMask rasterize_spheres(const Molecule& mol, double radius_offset, const GridSpec& spec,
                            int workers) {
  check_offset(mol, radius_offset);
  VoxelMask mask(spec);
  if (mol.empty()) return mask;
  AtomBuckets buckets(mol, radius_offset);
  const std::size_t planes = spec.counts[2];
  parallel_for(planes, workers, [&](std::size_t k0, std::size_t k1) {
    for (std::size_t k = k0; k < k1; ++k)
      for (std::size_t j = 0; j < spec.counts[1]; ++j)
        for (std::size_t i = 0; i < spec.counts[0]; ++i)
          if (buckets.covers(spec.node(i, j, k))) mask.set(spec.index(i, j, k), true);
  });
  return mask;
}

VoxelMask rasterize_spheres_naive(const Molecule& mol, double radius_offset, const GridSpec& spec) {
  check_offset(mol, radius_offset);
  VoxelMask mask(spec);
  for (std::size_t k = 0; k < spec.counts[2]; ++k)
    for (std::size_t j = 0; j < spec.counts[1]; ++j)
      for (std::size_t i = 0; i < spec.counts[0]; ++i) {
        const Vec3 p = spec.node(i, j, k);
        for (const auto& a : mol.atoms) {
          const Vec3 d = p - a.center;
          const double r = a.radius + radius_offset;
          if (dot(d, d) <= r * r) {
            mask.set(spec.index(i, j, k), true);
            break;
          }
        }
      }
  return mask;
}

ScalarGrid3 init_density(const GridSpec& spec, const VoxelMask& sas_mask, double rho0) {
  if (!(rho0 > 0.0)) throw DomainError("rho0 must be positive");
  if (!(sas_mask.spec() == spec)) throw ShapeError("mask grid differs from density grid");
  ScalarGrid3 g(spec, rho0);
  auto& v = g.values();
  for (std::size_t n = 0; n < v.size(); ++n)
    if (sas_mask.inside(n)) v[n] = 0.0;
  return g;
}

ScalarGrid3 clamp_excluded(ScalarGrid3 density, const VoxelMask& vdw_mask) {
  if (!(vdw_mask.spec() == density.spec())) throw ShapeError("mask grid differs from density grid");
  auto& v = density.values();
  for (std::size_t n = 0; n < v.size(); ++n)
    if (vdw_mask.inside(n)) v[n] = 0.0;
  return density;
}

void write_grid(std::ostream& out, const ScalarGrid3& grid) {
  const auto& s = grid.spec();
  std::ostringstream hdr;
  hdr << std::setprecision(17) << "MMSGRID1 " << s.counts[0] << ' ' << s.counts[1] << ' '
      << s.counts[2] << ' ' << s.origin.x << ' ' << s.origin.y << ' ' << s.origin.z << ' '
      << s.spacing[0] << ' ' << s.spacing[1] << ' ' << s.spacing[2] << '\n';
  out << hdr.str();
  std::vector<char> buf(grid.values().size() * 8);
  for (std::size_t n = 0; n < grid.values().size(); ++n) {
    auto bits = std::bit_cast<std::uint64_t>(grid.values()[n]);
    for (int b = 0; b < 8; ++b) buf[n * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ScalarGrid3 read_grid(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing grid header");
  std::istringstream hs(header);
  std::string magic;
  GridSpec s;
  hs >> magic >> s.counts[0] >> s.counts[1] >> s.counts[2] >> s.origin.x >> s.origin.y >>
      s.origin.z >> s.spacing[0] >> s.spacing[1] >> s.spacing[2];
  if (magic != "MMSGRID1" || !hs) throw ParseError("bad grid header");
  ScalarGrid3 g(s);
  std::vector<unsigned char> buf(g.values().size() * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw ParseError("truncated grid data");
  for (std::size_t n = 0; n < g.values().size(); ++n) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[n * 8 + b]) << (8 * b);
    g.values()[n] = std::bit_cast<double>(bits);
  }
  return g;
}

}  // namespace mmsurf

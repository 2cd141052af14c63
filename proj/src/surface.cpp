#include "mmsurf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <unordered_map>

#include "mmsurf/error.hpp"

namespace mmsurf {

namespace {

// Cube corner c sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
// Each face lists its corners counter-clockwise seen from outside the cube.
constexpr int kFaces[6][4] = {
    {0, 4, 6, 2},  // -x
    {1, 3, 7, 5},  // +x
    {0, 1, 5, 4},  // -y
    {2, 6, 7, 3},  // +y
    {0, 2, 3, 1},  // -z
    {4, 5, 7, 6},  // +z
};

int edge_axis(int a, int b) {
  const int diff = a ^ b;
  return diff == 1 ? 0 : (diff == 2 ? 1 : 2);
}

// Saddle of the bilinear interpolant on a face, evaluated with corners in a
// canonical order (by global node index) so that both cells sharing the face
// reach the same decision.
bool above_connected(const std::array<std::size_t, 4>& ids, const std::array<double, 4>& vals,
                     double level) {
  // ids/vals are in cyclic order; diagonals are (0,2) and (1,3).
  std::size_t first = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (ids[i] < ids[first]) first = i;
  const std::size_t opp = (first + 2) % 4;
  std::size_t b = (first + 1) % 4, d = (first + 3) % 4;
  if (ids[d] < ids[b]) std::swap(b, d);
  const double va = vals[first], vc = vals[opp], vb = vals[b], vd = vals[d];
  const double den = (va + vc) - (vb + vd);
  const double saddle = den != 0.0 ? (va * vc - vb * vd) / den : 0.25 * ((va + vc) + (vb + vd));
  return saddle >= level;
}

// Oriented segments (exit -> entry) on one cyclic square face whose corners
// are classified above/below. Slots index the face edges 0..3, edge i running
// from corner i to corner i+1.
template <typename Emit>
void face_segments(const std::array<bool, 4>& above, const std::array<std::size_t, 4>& ids,
                   const std::array<double, 4>& vals, double level, Emit&& emit) {
  int crossings = 0;
  for (int i = 0; i < 4; ++i) crossings += above[i] != above[(i + 1) % 4];
  if (crossings == 0) return;
  if (crossings == 2) {
    int exit_edge = -1, entry_edge = -1;
    for (int i = 0; i < 4; ++i) {
      if (above[i] && !above[(i + 1) % 4]) exit_edge = i;
      if (!above[i] && above[(i + 1) % 4]) entry_edge = i;
    }
    emit(exit_edge, entry_edge);
    return;
  }
  const bool connected = above_connected(ids, vals, level);
  if (above[0]) {
    // exits on edges 0 and 2, entries on 1 and 3
    if (connected) {
      emit(0, 1);
      emit(2, 3);
    } else {
      emit(0, 3);
      emit(2, 1);
    }
  } else {
    // exits on edges 1 and 3, entries on 2 and 0
    if (connected) {
      emit(1, 2);
      emit(3, 0);
    } else {
      emit(1, 0);
      emit(3, 2);
    }
  }
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

constexpr double kMinTriangleArea = 1e-12;
// Vertices stay this fraction of an edge away from its nodes. A node sitting
// exactly on the level would otherwise merge vertices of several edges and
// pinch the mesh or leave zero-area triangles behind.
constexpr double kEdgeInset = 1e-3;

}  // namespace

TriangleMesh marching_cubes(const ScalarGrid3& density, double level) {
  TriangleMesh mesh;
  const GridSpec& s = density.spec();
  const auto& v = density.values();
  const std::size_t nx = s.counts[0], ny = s.counts[1], nz = s.counts[2];
  const std::size_t n_nodes = s.node_count();
  const std::array<std::size_t, 3> stride{1, nx, nx * ny};

  std::unordered_map<std::uint64_t, std::uint32_t> vertex_of;
  auto vertex = [&](std::size_t node_a, std::size_t node_b, int axis) -> std::uint32_t {
    // node_a is the lower endpoint along `axis`.
    const double va = v[node_a], vb = v[node_b];
    const double t = (level - va) / (vb - va);
    const std::uint64_t key = 3 * static_cast<std::uint64_t>(node_a) + static_cast<std::uint64_t>(axis);
    auto [it, inserted] = vertex_of.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) {
      const std::size_t i = node_a % nx, j = (node_a / nx) % ny, k = node_a / (nx * ny);
      Vec3 p = s.node(i, j, k);
      const double tc = std::clamp(t, kEdgeInset, 1.0 - kEdgeInset);
      p[axis] = s.coord(axis, axis == 0 ? i : (axis == 1 ? j : k)) + tc * s.spacing[axis];
      mesh.vertices.push_back(p);
    }
    return it->second;
  };

  auto emit_triangle = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (a == b || b == c || a == c) return;
    if (triangle_area(mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]) <= kMinTriangleArea) return;
    mesh.triangles.push_back({a, b, c});
  };

  std::array<std::size_t, 8> node{};
  std::array<double, 8> val{};
  std::array<bool, 8> above{};
  std::array<int, 12 * 2> next{};  // indexed by local edge slot
  std::vector<std::uint32_t> polygon;

  for (std::size_t k = 0; k + 1 < nz; ++k)
    for (std::size_t j = 0; j + 1 < ny; ++j)
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const std::size_t base = s.index(i, j, k);
        int n_above = 0;
        for (int c = 0; c < 8; ++c) {
          node[c] = base + (c & 1) * stride[0] + ((c >> 1) & 1) * stride[1] + ((c >> 2) & 1) * stride[2];
          val[c] = v[node[c]];
          above[c] = val[c] >= level;
          n_above += above[c];
        }
        if (n_above == 0 || n_above == 8) continue;

        // Local edge slot: lower corner * 3 + axis (sparse, 24 entries).
        next.fill(-1);
        std::array<int, 24> edge_lo{}, edge_axis_of{};
        for (const auto& face : kFaces) {
          std::array<bool, 4> fa{};
          std::array<std::size_t, 4> fid{};
          std::array<double, 4> fv{};
          for (int q = 0; q < 4; ++q) {
            fa[q] = above[face[q]];
            fid[q] = node[face[q]];
            fv[q] = val[face[q]];
          }
          auto slot = [&](int e) {
            const int a = face[e], b = face[(e + 1) % 4];
            const int lo = std::min(a, b);
            const int axis = edge_axis(a, b);
            edge_lo[lo * 3 + axis] = lo;
            edge_axis_of[lo * 3 + axis] = axis;
            return lo * 3 + axis;
          };
          face_segments(fa, fid, fv, level, [&](int from, int to) { next[slot(from)] = slot(to); });
        }

        for (int start = 0; start < 24; ++start) {
          if (next[start] < 0) continue;
          polygon.clear();
          int e = start;
          while (next[e] >= 0) {
            const int lo = edge_lo[e], axis = edge_axis_of[e];
            const std::uint32_t id = vertex(node[lo], node[lo | (1 << axis)], axis);
            if (polygon.empty() || polygon.back() != id) polygon.push_back(id);
            const int nxt = next[e];
            next[e] = -1;
            e = nxt;
          }
          while (polygon.size() > 1 && polygon.front() == polygon.back()) polygon.pop_back();
          if (polygon.size() < 3) continue;
          if (polygon.size() == 3) {
            emit_triangle(polygon[0], polygon[1], polygon[2]);
            continue;
          }
          // Fan around a private centre vertex. A fan from a polygon corner can
          // lay a diagonal along a cube face, where the neighboring cell may
          // place a triangle of its own.
          Vec3 centre{};
          for (std::uint32_t id : polygon) centre = centre + mesh.vertices[id];
          centre = (1.0 / static_cast<double>(polygon.size())) * centre;
          const auto c = static_cast<std::uint32_t>(mesh.vertices.size());
          mesh.vertices.push_back(centre);
          for (std::size_t p = 0; p < polygon.size(); ++p)
            emit_triangle(c, polygon[p], polygon[(p + 1) % polygon.size()]);
        }
      }
  return mesh;
}

ContourSet slice_contours(const ScalarGrid3& density, Axis axis, double coordinate, double level) {
  const GridSpec& s = density.spec();
  const int a = static_cast<int>(axis);
  const int ua = a == 0 ? 1 : 0;
  const int va = a == 2 ? 1 : 2;
  const double lo = s.origin[a], hi = s.upper(a);
  const double tol = 1e-9 * s.spacing[a];
  if (!(coordinate >= lo - tol && coordinate <= hi + tol))
    throw DomainError("slice coordinate outside the grid");

  double u = (coordinate - lo) / s.spacing[a];
  u = std::clamp(u, 0.0, static_cast<double>(s.counts[a] - 1));
  auto i0 = static_cast<std::size_t>(std::floor(u));
  if (i0 >= s.counts[a] - 1) i0 = s.counts[a] - 2;
  const double f = u - static_cast<double>(i0);

  const std::size_t nu = s.counts[ua], nv = s.counts[va];
  std::vector<double> plane(nu * nv);
  for (std::size_t jv = 0; jv < nv; ++jv)
    for (std::size_t ju = 0; ju < nu; ++ju) {
      std::array<std::size_t, 3> ijk{};
      ijk[ua] = ju;
      ijk[va] = jv;
      ijk[a] = i0;
      const double v0 = density.at(ijk[0], ijk[1], ijk[2]);
      ijk[a] = i0 + 1;
      const double v1 = density.at(ijk[0], ijk[1], ijk[2]);
      plane[ju + nu * jv] = (1.0 - f) * v0 + f * v1;
    }

  // Edge key: lower node * 2 + direction (0 = along u, 1 = along v).
  auto point_of = [&](std::uint64_t key) -> std::array<double, 2> {
    const std::size_t n = key / 2;
    const int dir = static_cast<int>(key % 2);
    const std::size_t ju = n % nu, jv = n / nu;
    const std::size_t m = dir == 0 ? n + 1 : n + nu;
    const double t = std::clamp((level - plane[n]) / (plane[m] - plane[n]), 0.0, 1.0);
    std::array<double, 2> p{s.coord(ua, ju), s.coord(va, jv)};
    p[dir] += t * s.spacing[dir == 0 ? ua : va];
    return p;
  };

  std::map<std::uint64_t, std::uint64_t> next;
  std::map<std::uint64_t, std::uint64_t> prev;
  std::vector<std::uint64_t> order;
  for (std::size_t jv = 0; jv + 1 < nv; ++jv)
    for (std::size_t ju = 0; ju + 1 < nu; ++ju) {
      const std::size_t n00 = ju + nu * jv;
      const std::array<std::size_t, 4> ids{n00, n00 + 1, n00 + 1 + nu, n00 + nu};
      // Square edges in cyclic order.
      const std::array<std::uint64_t, 4> keys{2 * ids[0], 2 * ids[1] + 1, 2 * ids[3], 2 * ids[0] + 1};
      std::array<bool, 4> ab{};
      std::array<double, 4> vals{};
      for (int q = 0; q < 4; ++q) {
        vals[q] = plane[ids[q]];
        ab[q] = vals[q] >= level;
      }
      face_segments(ab, ids, vals, level, [&](int from, int to) {
        next[keys[from]] = keys[to];
        prev[keys[to]] = keys[from];
        order.push_back(keys[from]);
      });
    }

  ContourSet out;
  out.axis = axis;
  out.coordinate = coordinate;
  std::map<std::uint64_t, bool> used;
  auto trace = [&](std::uint64_t start) {
    Polyline pl;
    std::uint64_t e = start;
    pl.points.push_back(point_of(e));
    used[e] = true;
    while (true) {
      auto it = next.find(e);
      if (it == next.end()) break;
      e = it->second;
      if (e == start) {
        pl.closed = true;
        break;
      }
      pl.points.push_back(point_of(e));
      if (used[e]) break;
      used[e] = true;
    }
    if (pl.points.size() >= 2) out.polylines.push_back(std::move(pl));
  };
  // Open chains start where the contour enters through the slice border.
  for (std::uint64_t key : order)
    if (!used[key] && prev.find(key) == prev.end()) trace(key);
  for (std::uint64_t key : order)
    if (!used[key]) trace(key);
  return out;
}

SurfaceKind parse_surface_kind(const std::string& name) {
  if (name == "vdw") return SurfaceKind::vdw;
  if (name == "sas") return SurfaceKind::sas;
  if (name == "ses") return SurfaceKind::ses;
  if (name == "midway") return SurfaceKind::midway;
  if (name == "custom") return SurfaceKind::custom;
  throw ConfigError("unknown surface kind '" + name + "'");
}

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::vdw: return "vdw";
    case SurfaceKind::sas: return "sas";
    case SurfaceKind::ses: return "ses";
    case SurfaceKind::midway: return "midway";
    case SurfaceKind::custom: return "custom";
  }
  return "?";
}

double resolve_level(const SurfaceRequest& request, const LevelContext& ctx) {
  switch (request.kind) {
    case SurfaceKind::vdw:
    case SurfaceKind::sas: {
      const double eps = request.epsilon.value_or(kVdwEpsilonFraction * ctx.rho0);
      if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
      return eps;
    }
    case SurfaceKind::ses:
      return request.level.value_or(kSesLevelFraction * ctx.rho0);
    case SurfaceKind::midway: {
      if (!ctx.atom_radius) throw DomainError("midway level needs at least one atom");
      const double a = *ctx.atom_radius;
      const double dt_eff = ctx.time * ctx.diffusion;
      const double r_max = a + ctx.probe_radius + 4.0 * std::sqrt(2.0 * dt_eff) + 2.0;
      const auto prof = radial_solve(a, ctx.probe_radius, ctx.rho0, dt_eff, ctx.radial_dr, r_max);
      return prof.at(a + 0.5 * ctx.probe_radius);
    }
    case SurfaceKind::custom:
      if (!request.level) throw ConfigError("custom surface needs an explicit level");
      return *request.level;
  }
  throw ConfigError("unknown surface kind");
}

double mesh_area(const TriangleMesh& mesh) {
  double a = 0.0;
  for (const auto& t : mesh.triangles)
    a += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return a;
}

bool is_closed(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  auto key = [](std::uint32_t a, std::uint32_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; };
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      if (++directed[key(t[e], t[(e + 1) % 3])] > 1) return false;
  for (const auto& [k, count] : directed) {
    const auto a = static_cast<std::uint32_t>(k >> 32), b = static_cast<std::uint32_t>(k & 0xffffffffu);
    if (directed.find(key(b, a)) == directed.end()) return false;
  }
  return true;
}

double mesh_volume(const TriangleMesh& mesh) {
  if (!is_closed(mesh)) throw DomainError("volume requires a closed, consistently oriented mesh");
  Vec3 c{};
  for (const auto& p : mesh.vertices) c = c + p;
  c = (1.0 / static_cast<double>(mesh.vertices.size())) * c;
  double vol = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - c, b = mesh.vertices[t[1]] - c, d = mesh.vertices[t[2]] - c;
    vol += dot(a, cross(b, d)) / 6.0;
  }
  return std::abs(vol);
}

long euler_characteristic(const TriangleMesh& mesh) {
  std::vector<char> used(mesh.vertices.size(), 0);
  std::unordered_map<std::uint64_t, char> edges;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      used[t[e]] = 1;
      auto a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges[(static_cast<std::uint64_t>(a) << 32) | b] = 1;
    }
  const long v = static_cast<long>(std::count(used.begin(), used.end(), 1));
  return v - static_cast<long>(edges.size()) + static_cast<long>(mesh.triangles.size());
}

namespace {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + (vb * denom) * ab + (vc * denom) * ac;
}

class TriangleGrid {
 public:
  explicit TriangleGrid(const TriangleMesh& mesh) : mesh_(mesh) {
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    double edge_sum = 0.0;
    for (const auto& t : mesh.triangles) {
      for (int e = 0; e < 3; ++e) {
        const Vec3& p = mesh.vertices[t[e]];
        for (int ax = 0; ax < 3; ++ax) {
          lo[ax] = std::min(lo[ax], p[ax]);
          hi[ax] = std::max(hi[ax], p[ax]);
        }
        edge_sum += distance(p, mesh.vertices[t[(e + 1) % 3]]);
      }
    }
    const double mean_edge = edge_sum / (3.0 * static_cast<double>(mesh.triangles.size()));
    double diag = norm(hi - lo);
    cell_ = std::max({2.0 * mean_edge, diag / 128.0, 1e-9});
    lo_ = lo;
    for (int ax = 0; ax < 3; ++ax)
      n_[ax] = static_cast<long>(std::floor((hi[ax] - lo[ax]) / cell_)) + 1;
    bins_.resize(static_cast<std::size_t>(n_[0] * n_[1] * n_[2]));
    for (std::uint32_t ti = 0; ti < mesh.triangles.size(); ++ti) {
      const auto& t = mesh.triangles[ti];
      std::array<long, 3> c0{}, c1{};
      for (int ax = 0; ax < 3; ++ax) {
        double mn = 1e300, mx = -1e300;
        for (int e = 0; e < 3; ++e) {
          mn = std::min(mn, mesh.vertices[t[e]][ax]);
          mx = std::max(mx, mesh.vertices[t[e]][ax]);
        }
        c0[ax] = cell_of(mn, ax);
        c1[ax] = cell_of(mx, ax);
      }
      for (long z = c0[2]; z <= c1[2]; ++z)
        for (long y = c0[1]; y <= c1[1]; ++y)
          for (long x = c0[0]; x <= c1[0]; ++x) bins_[flat(x, y, z)].push_back(ti);
    }
  }

  double distance_to(const Vec3& p) const {
    std::array<long, 3> c{};
    for (int ax = 0; ax < 3; ++ax) c[ax] = cell_of(p[ax], ax);
    const long max_ring = std::max({n_[0], n_[1], n_[2]});
    double best2 = std::numeric_limits<double>::infinity();
    for (long r = 0; r <= max_ring; ++r) {
      const double bound = static_cast<double>(r - 1) * cell_;
      if (r > 0 && bound > 0 && bound * bound > best2) break;
      for (long z = c[2] - r; z <= c[2] + r; ++z) {
        if (z < 0 || z >= n_[2]) continue;
        for (long y = c[1] - r; y <= c[1] + r; ++y) {
          if (y < 0 || y >= n_[1]) continue;
          for (long x = c[0] - r; x <= c[0] + r; ++x) {
            if (x < 0 || x >= n_[0]) continue;
            if (std::max({std::abs(x - c[0]), std::abs(y - c[1]), std::abs(z - c[2])}) != r) continue;
            for (std::uint32_t ti : bins_[flat(x, y, z)]) {
              const auto& t = mesh_.triangles[ti];
              const Vec3 q = closest_on_triangle(p, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                                                 mesh_.vertices[t[2]]);
              best2 = std::min(best2, dot(p - q, p - q));
            }
          }
        }
      }
    }
    return std::sqrt(best2);
  }

 private:
  long cell_of(double v, int ax) const {
    return std::clamp(static_cast<long>(std::floor((v - lo_[ax]) / cell_)), 0L, n_[ax] - 1);
  }
  std::size_t flat(long x, long y, long z) const {
    return static_cast<std::size_t>(x + n_[0] * (y + n_[1] * z));
  }

  const TriangleMesh& mesh_;
  double cell_ = 1.0;
  Vec3 lo_;
  std::array<long, 3> n_{1, 1, 1};
  std::vector<std::vector<std::uint32_t>> bins_;
};

double directed_distance(const TriangleMesh& from, const TriangleGrid& to) {
  double worst = 0.0;
  for (const auto& p : from.vertices) worst = std::max(worst, to.distance_to(p));
  for (const auto& t : from.triangles) {
    const Vec3 c = (1.0 / 3.0) * (from.vertices[t[0]] + from.vertices[t[1]] + from.vertices[t[2]]);
    worst = std::max(worst, to.distance_to(c));
  }
  return worst;
}

}  // namespace

double mesh_distance(const TriangleMesh& a, const TriangleMesh& b) {
  if (a.empty() || b.empty()) throw DomainError("mesh distance needs two non-empty meshes");
  TriangleGrid ga(a), gb(b);
  return std::max(directed_distance(a, gb), directed_distance(b, ga));
}

namespace {

// Orientation of p against the directed 2D edge a->b, with exact zeros
// resolved by a symbolic shift of p by (e, e^2). Endpoints are evaluated in a
// canonical order so the two triangles sharing an edge see opposite signs.
int edge_side(double ax, double ay, double bx, double by, double px, double py) {
  bool flip = false;
  if (bx < ax || (bx == ax && by < ay)) {
    std::swap(ax, bx);
    std::swap(ay, by);
    flip = true;
  }
  const double o = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  int sign;
  if (o != 0.0)
    sign = o > 0 ? 1 : -1;
  else if (by != ay)
    sign = (by - ay) > 0 ? -1 : 1;
  else
    sign = (bx - ax) > 0 ? 1 : -1;
  return flip ? -sign : sign;
}

}  // namespace

InsideTester::InsideTester(const TriangleMesh& mesh) : mesh_(&mesh) {
  if (mesh.triangles.empty()) return;
  double y1 = -1e300, z1 = -1e300, span = 0.0;
  y0_ = z0_ = 1e300;
  for (const auto& p : mesh.vertices) {
    y0_ = std::min(y0_, p.y);
    z0_ = std::min(z0_, p.z);
    y1 = std::max(y1, p.y);
    z1 = std::max(z1, p.z);
  }
  for (const auto& t : mesh.triangles)
    span += std::max(std::abs(mesh.vertices[t[0]].y - mesh.vertices[t[1]].y),
                     std::abs(mesh.vertices[t[0]].z - mesh.vertices[t[2]].z));
  span /= static_cast<double>(mesh.triangles.size());
  cell_ = std::max({2.0 * span, (y1 - y0_) / 256.0, (z1 - z0_) / 256.0, 1e-9});
  ny_ = static_cast<std::size_t>((y1 - y0_) / cell_) + 1;
  nz_ = static_cast<std::size_t>((z1 - z0_) / cell_) + 1;
  bins_.resize(ny_ * nz_);
  for (std::uint32_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    double ylo = 1e300, yhi = -1e300, zlo = 1e300, zhi = -1e300;
    for (int e = 0; e < 3; ++e) {
      ylo = std::min(ylo, mesh.vertices[t[e]].y);
      yhi = std::max(yhi, mesh.vertices[t[e]].y);
      zlo = std::min(zlo, mesh.vertices[t[e]].z);
      zhi = std::max(zhi, mesh.vertices[t[e]].z);
    }
    const auto a0 = static_cast<std::size_t>((ylo - y0_) / cell_), a1 = static_cast<std::size_t>((yhi - y0_) / cell_);
    const auto b0 = static_cast<std::size_t>((zlo - z0_) / cell_), b1 = static_cast<std::size_t>((zhi - z0_) / cell_);
    for (std::size_t b = b0; b <= std::min(b1, nz_ - 1); ++b)
      for (std::size_t a = a0; a <= std::min(a1, ny_ - 1); ++a) bins_[a + ny_ * b].push_back(ti);
  }
}

bool InsideTester::inside(const Vec3& p) const {
  if (bins_.empty()) return false;
  const double fy = (p.y - y0_) / cell_, fz = (p.z - z0_) / cell_;
  if (fy < 0 || fz < 0) return false;
  const auto a = static_cast<std::size_t>(fy), b = static_cast<std::size_t>(fz);
  if (a >= ny_ || b >= nz_) return false;
  const auto& mesh = *mesh_;
  int crossings = 0;
  for (std::uint32_t ti : bins_[a + ny_ * b]) {
    const auto& t = mesh.triangles[ti];
    const Vec3 &v0 = mesh.vertices[t[0]], &v1 = mesh.vertices[t[1]], &v2 = mesh.vertices[t[2]];
    const int s0 = edge_side(v0.y, v0.z, v1.y, v1.z, p.y, p.z);
    const int s1 = edge_side(v1.y, v1.z, v2.y, v2.z, p.y, p.z);
    const int s2 = edge_side(v2.y, v2.z, v0.y, v0.z, p.y, p.z);
    if (!(s0 == s1 && s1 == s2)) continue;
    // Height of the triangle's plane above (p.y, p.z).
    const Vec3 n = cross(v1 - v0, v2 - v0);
    if (n.x == 0.0) continue;
    const double x = v0.x - (n.y * (p.y - v0.y) + n.z * (p.z - v0.z)) / n.x;
    if (x > p.x) ++crossings;
  }
  return (crossings & 1) != 0;
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(10);
  for (const auto& p : mesh.vertices) out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_contours_csv(std::ostream& out, const ContourSet& contours) {
  out << "polyline_id,u,v\n" << std::setprecision(10);
  for (std::size_t id = 0; id < contours.polylines.size(); ++id) {
    const auto& pl = contours.polylines[id];
    for (const auto& p : pl.points) out << id << ',' << p[0] << ',' << p[1] << '\n';
    if (pl.closed && !pl.points.empty())
      out << id << ',' << pl.points.front()[0] << ',' << pl.points.front()[1] << '\n';
  }
}

}  // namespace mmsurf

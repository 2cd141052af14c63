#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mmsurf/fd_oracle.hpp"
#include "mmsurf/grid.hpp"

namespace mmsurf {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

/// Isosurface {density = level}. Cells are visited x fastest; edge vertices
/// are shared between cells and ambiguous faces are resolved with the
/// asymptotic decider, so neighboring cells agree on every face. Triangles
/// are oriented with normals pointing toward higher values.
TriangleMesh marching_cubes(const ScalarGrid3& density, double level);

struct Polyline {
  std::vector<std::array<double, 2>> points;
  bool closed = false;
};

/// Slice-plane coordinates (u, v): x -> (y, z), y -> (x, z), z -> (x, y).
struct ContourSet {
  Axis axis = Axis::x;
  double coordinate = 0.0;
  std::vector<Polyline> polylines;
};

ContourSet slice_contours(const ScalarGrid3& density, Axis axis, double coordinate, double level);

enum class SurfaceKind { vdw, sas, ses, midway, custom };

SurfaceKind parse_surface_kind(const std::string& name);
std::string to_string(SurfaceKind kind);

struct SurfaceRequest {
  SurfaceKind kind = SurfaceKind::ses;
  std::optional<double> level;    // custom level, or override for ses
  std::optional<double> epsilon;  // vdw/sas level; default 1e-3 rho0
};

struct LevelContext {
  double rho0 = 100.0;
  double probe_radius = 1.5;
  double time = 12.0;
  double diffusion = 1.0;
  std::optional<double> atom_radius;  // representative radius for midway
  double radial_dr = 0.02;
};

/// SES level used when none is configured: 0.04 at rho0 = 100, scaled with rho0.
inline constexpr double kSesLevelFraction = 0.04 / 100.0;
inline constexpr double kVdwEpsilonFraction = 1e-3;

/// Isovalue for a requested surface kind. Midway runs the radial oracle and
/// reads it at atom_radius + probe_radius / 2.
double resolve_level(const SurfaceRequest& request, const LevelContext& context);

double mesh_area(const TriangleMesh& mesh);
/// Every undirected edge shared by exactly two triangles with opposite directions.
bool is_closed(const TriangleMesh& mesh);
/// Throws DomainError when the mesh is not closed.
double mesh_volume(const TriangleMesh& mesh);
long euler_characteristic(const TriangleMesh& mesh);

/// Symmetric Hausdorff estimate: each mesh is sampled at its vertices and
/// triangle centroids, and the largest sample-to-surface distance wins.
double mesh_distance(const TriangleMesh& a, const TriangleMesh& b);

/// Point-in-closed-mesh test by ray parity along +x.
class InsideTester {
 public:
  explicit InsideTester(const TriangleMesh& mesh);
  bool inside(const Vec3& p) const;

 private:
  const TriangleMesh* mesh_;
  double y0_ = 0, z0_ = 0, cell_ = 1;
  std::size_t ny_ = 1, nz_ = 1;
  std::vector<std::vector<std::uint32_t>> bins_;
};

void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_contours_csv(std::ostream& out, const ContourSet& contours);

}  // namespace mmsurf

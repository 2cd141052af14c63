#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <variant>
#include <vector>

#include "mmsurf/molecule_io.hpp"
#include "mmsurf/vec3.hpp"

namespace mmsurf {

struct GridSpec {
  Vec3 origin;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> counts{2, 2, 2};

  std::size_t node_count() const { return counts[0] * counts[1] * counts[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + counts[0] * (j + counts[1] * k);
  }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin.x + static_cast<double>(i) * spacing[0],
            origin.y + static_cast<double>(j) * spacing[1],
            origin.z + static_cast<double>(k) * spacing[2]};
  }
  double coord(int axis, std::size_t i) const {
    return origin[axis] + static_cast<double>(i) * spacing[axis];
  }
  double upper(int axis) const { return coord(axis, counts[axis] - 1); }
  double min_spacing() const;
  double max_spacing() const;
  double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Node counts per axis, or a target spacing applied to every axis.
struct Counts {
  std::array<std::size_t, 3> n;
};
struct TargetSpacing {
  double h;
};
using Resolution = std::variant<Counts, TargetSpacing>;

/// Nodes cover the box inclusively. With counts, spacing = extent / (count - 1);
/// with a target spacing, count = ceil(extent / h) + 1 and the spacing is
/// shrunk to fit the box exactly.
GridSpec build_grid(const Box& box, const Resolution& resolution);

/// Dense node values, x fastest.
class ScalarGrid3 {
 public:
  ScalarGrid3() = default;
  explicit ScalarGrid3(const GridSpec& spec, double fill = 0.0)
      : spec_(spec), values_(spec.node_count(), fill) {}

  const GridSpec& spec() const { return spec_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& at(std::size_t i, std::size_t j, std::size_t k) { return values_[spec_.index(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[spec_.index(i, j, k)];
  }

  /// Trilinear interpolation; points outside the grid are clamped to it.
  double sample(const Vec3& p) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// true = inside the sphere union.
class VoxelMask {
 public:
  VoxelMask() = default;
  explicit VoxelMask(const GridSpec& spec) : spec_(spec), bits_(spec.node_count(), 0) {}

  const GridSpec& spec() const { return spec_; }
  bool inside(std::size_t idx) const { return bits_[idx] != 0; }
  void set(std::size_t idx, bool v) { bits_[idx] = v ? 1 : 0; }
  std::size_t inside_count() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const VoxelMask&, const VoxelMask&) = default;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
};

/// Node inside iff some atom has |node - c| <= r + radius_offset. Atoms are
/// bucketed into cells so every node tests only the 27 neighboring buckets.
VoxelMask rasterize_spheres(const Molecule& mol, double radius_offset, const GridSpec& spec,
                            int workers = 0);

/// O(atoms x nodes) reference for rasterize_spheres.
VoxelMask rasterize_spheres_naive(const Molecule& mol, double radius_offset, const GridSpec& spec);

/// 0 inside the mask, rho0 elsewhere.
ScalarGrid3 init_density(const GridSpec& spec, const VoxelMask& sas_mask, double rho0);

/// Zeroes the density inside the mask.
ScalarGrid3 clamp_excluded(ScalarGrid3 density, const VoxelMask& vdw_mask);

/// Raw dump: "MMSGRID1 nx ny nz ox oy oz hx hy hz\n" then little-endian f64 values.
void write_grid(std::ostream& out, const ScalarGrid3& grid);
ScalarGrid3 read_grid(std::istream& in);

}  // namespace mmsurf

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mmsurf/grid.hpp"
#include "mmsurf/molecule_io.hpp"
#include "mmsurf/surface.hpp"

namespace mmsurf::testing {

/// Cubic grid [-half, half]^3 with n points per axis.
GridSpec cube_grid(double half, std::size_t n);

/// f(p) = |p - center|.
ScalarGrid3 radial_field(const GridSpec& spec, const Vec3& center = {});

/// Random molecule of `count` atoms in [-extent, extent]^3 with radii in [rmin, rmax].
Molecule random_molecule(std::mt19937_64& rng, std::size_t count, double extent, double rmin = 1.0,
                         double rmax = 2.0);

/// Deterministic protein-like PQR text: `chains` compact self-avoiding chains
/// of heavy atoms and hydrogens, `atoms` records in total.
std::string synthetic_protein_pqr(std::size_t atoms, int chains, std::uint64_t seed);

struct NestingReport {
  std::size_t samples = 0;
  std::size_t vdw_inside = 0, ses_inside = 0, sas_inside = 0;
  std::size_t violations = 0;
};

/// Samples points uniformly in the SAS bounding box and checks
/// inside(vdW mesh) => inside(SES mesh) => inside(SAS sphere union).
NestingReport check_nesting(const Molecule& mol, double probe, const TriangleMesh& vdw,
                            const TriangleMesh& ses, std::size_t samples, std::uint64_t seed);

}  // namespace mmsurf::testing

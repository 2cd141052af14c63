#include "support.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace mmsurf::testing {

GridSpec cube_grid(double half, std::size_t n) {
  return build_grid(Box{{-half, -half, -half}, {half, half, half}}, Counts{{n, n, n}});
}

ScalarGrid3 radial_field(const GridSpec& spec, const Vec3& center) {
  ScalarGrid3 g(spec);
  for (std::size_t k = 0; k < spec.counts[2]; ++k)
    for (std::size_t j = 0; j < spec.counts[1]; ++j)
      for (std::size_t i = 0; i < spec.counts[0]; ++i) g.at(i, j, k) = distance(spec.node(i, j, k), center);
  return g;
}

Molecule random_molecule(std::mt19937_64& rng, std::size_t count, double extent, double rmin, double rmax) {
  std::uniform_real_distribution<double> pos(-extent, extent), rad(rmin, rmax);
  Molecule m;
  m.name = "random";
  for (std::size_t i = 0; i < count; ++i) {
    Atom a;
    a.center = {pos(rng), pos(rng), pos(rng)};
    a.radius = rad(rng);
    m.atoms.push_back(a);
  }
  return m;
}

std::string synthetic_protein_pqr(std::size_t atoms, int chains, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  // Heavy-atom pattern of a residue-like repeat and matching radii.
  const char* names[] = {"N", "CA", "C", "O", "CB", "H", "HA", "HB"};
  const double radii[] = {1.55, 1.7, 1.7, 1.52, 1.7, 1.2, 1.2, 1.2};

  std::vector<Vec3> placed;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells;
  const double cell = 2.0, min_dist = 1.3;
  auto key = [&](const Vec3& p) {
    auto c = [&](double v) { return static_cast<std::int64_t>(std::floor(v / cell)) + 100000; };
    return (c(p.x) * 200003 + c(p.y)) * 200003 + c(p.z);
  };
  auto clear = [&](const Vec3& p) {
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          auto it = cells.find(key(p + Vec3{dx * cell, dy * cell, dz * cell}));
          if (it == cells.end()) continue;
          for (auto i : it->second)
            if (distance(placed[i], p) < min_dist) return false;
        }
    return true;
  };

  std::ostringstream out;
  out << "REMARK synthetic protein-like test structure\n" << std::fixed << std::setprecision(3);
  std::size_t serial = 0;
  const std::size_t per_chain = (atoms + static_cast<std::size_t>(chains) - 1) / static_cast<std::size_t>(chains);
  for (int c = 0; c < chains && serial < atoms; ++c) {
    // Chains sit on a 2 x 4 layout, each confined to a ball around its anchor.
    const Vec3 anchor{(c % 2) * 26.0 - 13.0, ((c / 2) % 4) * 22.0 - 33.0, 0.0};
    const double confine = 13.0;
    Vec3 p = anchor;
    std::size_t in_chain = 0;
    int residue = 1;
    while (in_chain < per_chain && serial < atoms) {
      Vec3 q;
      bool ok = false;
      for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
        Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
        d = (1.5 / norm(d)) * d;
        q = p + d;
        if (distance(q, anchor) > confine) q = p + (-1.0) * d;
        ok = distance(q, anchor) <= confine && clear(q);
      }
      if (!ok) {
        // Restart from a random free spot inside the chain's ball.
        for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
          Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
          q = anchor + (confine * std::cbrt(uni(rng)) / norm(d)) * d;
          ok = clear(q);
        }
      }
      placed.push_back(q);
      cells[key(q)].push_back(static_cast<std::uint32_t>(placed.size() - 1));
      const int kind = static_cast<int>(in_chain % 8);
      out << "ATOM " << ++serial << ' ' << names[kind] << " ALA " << static_cast<char>('A' + c) << ' '
          << residue << ' ' << q.x << ' ' << q.y << ' ' << q.z << " 0.000 " << radii[kind] << '\n';
      if (kind == 7) ++residue;
      p = q;
      ++in_chain;
    }
  }
  out << "END\n";
  return out.str();
}

NestingReport check_nesting(const Molecule& mol, double probe, const TriangleMesh& vdw,
                            const TriangleMesh& ses, std::size_t samples, std::uint64_t seed) {
  const Box box = bounding_box(mol, probe);
  std::mt19937_64 rng(seed);
  std::array<std::uniform_real_distribution<double>, 3> d{
      std::uniform_real_distribution<double>(box.lo.x, box.hi.x),
      std::uniform_real_distribution<double>(box.lo.y, box.hi.y),
      std::uniform_real_distribution<double>(box.lo.z, box.hi.z)};
  const InsideTester in_vdw(vdw), in_ses(ses);
  NestingReport r;
  r.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec3 p{d[0](rng), d[1](rng), d[2](rng)};
    const bool v = in_vdw.inside(p), e = in_ses.inside(p);
    bool a = false;
    for (const auto& atom : mol.atoms) {
      const double rr = atom.radius + probe;
      const Vec3 q = p - atom.center;
      if (dot(q, q) <= rr * rr) {
        a = true;
        break;
      }
    }
    r.vdw_inside += v;
    r.ses_inside += e;
    r.sas_inside += a;
    if ((v && !e) || (e && !a)) ++r.violations;
  }
  return r;
}

}  // namespace mmsurf::testing

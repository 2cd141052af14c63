#include <random>
#include <sstream>

#include "doctest.h"
#include "mmsurf/error.hpp"
#include "mmsurf/grid.hpp"
#include "support.hpp"

using namespace mmsurf;

namespace {
Molecule single(double r) {
  Molecule m;
  m.atoms.push_back({{0, 0, 0}, r, "C"});
  return m;
}
}  // namespace

TEST_CASE("build_grid from counts and from spacing") {
  auto g = build_grid(Box{{0, 0, 0}, {10, 10, 10}}, Counts{{200, 200, 200}});
  CHECK(g.spacing[0] == doctest::Approx(10.0 / 199.0));
  CHECK(g.spacing[0] == doctest::Approx(0.050251).epsilon(1e-5));

  auto tiny = build_grid(Box{{0, 0, 0}, {1, 1, 1}}, Counts{{2, 2, 2}});
  CHECK(tiny.spacing[1] == 1.0);
  CHECK(tiny.node_count() == 8);

  auto sp = build_grid(Box{{0, 0, 0}, {1, 2, 4}}, TargetSpacing{1.0});
  CHECK(sp.counts == std::array<std::size_t, 3>{2, 3, 5});
  CHECK(sp.spacing == std::array<double, 3>{1.0, 1.0, 1.0});
  CHECK(sp.upper(2) == 4.0);

  CHECK_THROWS_AS(build_grid(Box{{0, 0, 0}, {0, 1, 1}}, Counts{{4, 4, 4}}), DomainError);
  CHECK_THROWS_AS(build_grid(Box{{0, 0, 0}, {1, 1, 1}}, Counts{{1, 4, 4}}), DomainError);
  CHECK_THROWS_AS(build_grid(Box{{0, 0, 0}, {1, 1, 1}}, TargetSpacing{0.0}), DomainError);
}

TEST_CASE("rasterize_spheres distance test with closed balls") {
  GridSpec line;
  line.origin = {1.6, 0, 0};
  line.spacing = {0.2, 1, 1};
  line.counts = {2, 2, 2};  // x = 1.6 and 1.8
  auto m = rasterize_spheres(single(1.7), 0.0, line);
  CHECK(m.inside(line.index(0, 0, 0)));
  CHECK_FALSE(m.inside(line.index(1, 0, 0)));

  GridSpec sas = line;
  sas.origin = {3.1, 0, 0};
  auto s = rasterize_spheres(single(1.7), 1.5, sas);
  CHECK(s.inside(sas.index(0, 0, 0)));  // 3.1 < 3.2
  CHECK_FALSE(s.inside(sas.index(1, 0, 0)));

  // A node exactly on the sphere counts as inside.
  GridSpec edge = line;
  edge.origin = {2.0, 0, 0};
  edge.spacing = {1.0, 1, 1};
  auto e = rasterize_spheres(single(2.0), 0.0, edge);
  CHECK(e.inside(edge.index(0, 0, 0)));

  auto empty = rasterize_spheres(Molecule{}, 1.5, testing::cube_grid(2, 5));
  CHECK(empty.inside_count() == 0);
  CHECK_THROWS_AS(rasterize_spheres(single(1.0), -0.5, line), DomainError);
}

TEST_CASE("binned rasterization is bit-identical to the naive loop") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    auto mol = testing::random_molecule(rng, 1 + static_cast<std::size_t>(trial) * 3, 6.0, 0.8, 2.2);
    std::uniform_real_distribution<double> off(0.0, 1.6);
    const double offset = trial % 5 == 0 ? 0.0 : off(rng);
    GridSpec spec = build_grid(bounding_box(mol, 1.0 + offset), Counts{{23, 19, 17}});
    auto fast = rasterize_spheres(mol, offset, spec, 1 + trial % 4);
    auto slow = rasterize_spheres_naive(mol, offset, spec);
    CHECK(fast == slow);
  }
}

TEST_CASE("grid nodes lying exactly on a sphere agree between binned and naive tests") {
  Molecule m;
  m.atoms.push_back({{0, 0, 0}, 1.0, ""});
  m.atoms.push_back({{2, 0, 0}, 1.0, ""});
  GridSpec spec = build_grid(Box{{-3, -3, -3}, {3, 3, 3}}, TargetSpacing{0.5});
  CHECK(rasterize_spheres(m, 0.5, spec) == rasterize_spheres_naive(m, 0.5, spec));
}

TEST_CASE("masks grow with the radius offset") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto mol = testing::random_molecule(rng, 6, 5.0);
    GridSpec spec = build_grid(bounding_box(mol, 2.0), Counts{{21, 21, 21}});
    auto vdw = rasterize_spheres(mol, 0.0, spec);
    auto mid = rasterize_spheres(mol, 0.7, spec);
    auto sas = rasterize_spheres(mol, 1.5, spec);
    for (std::size_t n = 0; n < spec.node_count(); ++n) {
      if (vdw.inside(n)) CHECK(mid.inside(n));
      if (mid.inside(n)) CHECK(sas.inside(n));
    }
  }
}

TEST_CASE("rasterization does not depend on the worker count") {
  std::mt19937_64 rng(8);
  auto mol = testing::random_molecule(rng, 40, 8.0);
  GridSpec spec = build_grid(bounding_box(mol, 2.0), Counts{{40, 37, 33}});
  auto one = rasterize_spheres(mol, 1.5, spec, 1);
  CHECK(one == rasterize_spheres(mol, 1.5, spec, 2));
  CHECK(one == rasterize_spheres(mol, 1.5, spec, 8));
}

TEST_CASE("init_density is two-valued") {
  GridSpec spec = testing::cube_grid(4.0, 21);
  auto empty = init_density(spec, VoxelMask(spec), 100.0);
  for (double v : empty.values()) CHECK(v == 100.0);

  VoxelMask all(spec);
  for (std::size_t n = 0; n < spec.node_count(); ++n) all.set(n, true);
  const auto none = init_density(spec, all, 100.0);
  for (double v : none.values()) CHECK(v == 0.0);

  auto mask = rasterize_spheres(single(1.7), 1.5, spec);
  auto rho = init_density(spec, mask, 100.0);
  std::size_t zeros = 0, bulk = 0;
  for (double v : rho.values()) {
    zeros += v == 0.0;
    bulk += v == 100.0;
  }
  CHECK(zeros == mask.inside_count());
  CHECK(zeros + bulk == spec.node_count());

  CHECK_THROWS_AS(init_density(testing::cube_grid(4.0, 11), mask, 100.0), ShapeError);
  CHECK_THROWS_AS(init_density(spec, mask, 0.0), DomainError);
}

TEST_CASE("clamp_excluded zeroes the mask interior and is idempotent") {
  GridSpec spec = testing::cube_grid(3.0, 15);
  ScalarGrid3 f(spec, 100.0);
  auto unchanged = clamp_excluded(f, VoxelMask(spec));
  CHECK(unchanged.values() == f.values());

  VoxelMask all(spec);
  for (std::size_t n = 0; n < spec.node_count(); ++n) all.set(n, true);
  const auto cleared = clamp_excluded(f, all);
  for (double v : cleared.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 100);
  for (auto& v : f.values()) v = u(rng);
  auto mask = rasterize_spheres(single(2.0), 0.0, spec);
  auto once = clamp_excluded(f, mask);
  double inside_sum = 0.0;
  for (std::size_t n = 0; n < spec.node_count(); ++n) {
    if (mask.inside(n))
      inside_sum += once.values()[n];
    else
      CHECK(once.values()[n] == f.values()[n]);
  }
  CHECK(inside_sum == 0.0);
  CHECK(clamp_excluded(once, mask).values() == once.values());
  CHECK_THROWS_AS(clamp_excluded(ScalarGrid3(testing::cube_grid(3.0, 5)), mask), ShapeError);
}

TEST_CASE("raw grid dump round-trips bit-exactly") {
  GridSpec spec = build_grid(Box{{-1.25, 0.5, 2}, {3, 4, 5}}, Counts{{5, 4, 3}});
  ScalarGrid3 g(spec);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1e3);
  for (auto& v : g.values()) v = n(rng);
  std::stringstream s;
  write_grid(s, g);
  const std::string text = s.str();
  CHECK(text.rfind("MMSGRID1 5 4 3 ", 0) == 0);
  CHECK(text.size() == text.find('\n') + 1 + 8 * spec.node_count());
  auto back = read_grid(s);
  CHECK(back.spec() == spec);
  CHECK(back.values() == g.values());

  std::stringstream bad("NOTAGRID 1 1 1 0 0 0 1 1 1\n");
  CHECK_THROWS_AS(read_grid(bad), ParseError);
}

TEST_CASE("trilinear sample is exact for linear fields") {
  GridSpec spec = testing::cube_grid(2.0, 9);
  ScalarGrid3 g(spec);
  for (std::size_t k = 0; k < 9; ++k)
    for (std::size_t j = 0; j < 9; ++j)
      for (std::size_t i = 0; i < 9; ++i) {
        const Vec3 p = spec.node(i, j, k);
        g.at(i, j, k) = 2 * p.x - p.y + 0.5 * p.z;
      }
  const Vec3 q{0.37, -1.21, 1.9};
  CHECK(g.sample(q) == doctest::Approx(2 * q.x - q.y + 0.5 * q.z).epsilon(1e-12));
}

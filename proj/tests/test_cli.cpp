#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "mmsurf/error.hpp"
#include "mmsurf/pipeline.hpp"

using namespace mmsurf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mmsurf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small, fast configuration around a two-atom molecule.
RunConfig small_config(const fs::path& dir) {
  RunConfig cfg;
  cfg.input = write_text(dir / "pair.xyzr", "0 0 0 1.7\n1.5 0.3 0 1.2\n");
  cfg.spacing = 0.3;
  cfg.time = 1.0;
  return cfg;
}

std::map<std::string, std::string> key_values(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  std::string tok;
  in >> tok;  // command name
  while (in >> tok) {
    const auto eq = tok.find('=');
    REQUIRE(eq != std::string::npos);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(MMSURF_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("slice specifications parse as axis=coordinate") {
  auto s = parse_slice("x=0.6");
  CHECK(s.axis == Axis::x);
  CHECK(s.coordinate == 0.6);
  CHECK(parse_slice("z=-1.25").axis == Axis::z);
  CHECK_THROWS_AS(parse_slice("w=1"), ConfigError);
  CHECK_THROWS_AS(parse_slice("x"), ConfigError);
  CHECK_THROWS_AS(parse_slice("y=abc"), ConfigError);
}

TEST_CASE("configuration validation") {
  RunConfig cfg;
  cfg.input = "x";
  CHECK_NOTHROW(cfg.validate());
  RunConfig bad = cfg;
  bad.rho0 = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.grid = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.probe_radius = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.time = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("surface prints one key=value summary and writes its outputs") {
  auto dir = scratch("surface");
  RunConfig cfg = small_config(dir);
  cfg.out_mesh = (dir / "m.obj").string();
  cfg.out_grid = (dir / "g.bin").string();
  cfg.out_contours = (dir / "c").string();
  cfg.slices = {parse_slice("x=0.6"), parse_slice("z=0")};
  std::ostringstream out, err;
  REQUIRE(cmd_surface(cfg, out, err) == 0);
  auto kv = key_values(out.str());
  CHECK(kv["kind"] == "ses");
  CHECK(kv["closed"] == "1");
  CHECK(kv.count("area") == 1);
  CHECK(fs::exists(dir / "m.obj"));
  CHECK(fs::exists(dir / "c_x0.6.csv"));
  CHECK(fs::exists(dir / "c_z0.csv"));
  std::ifstream grid(dir / "g.bin", std::ios::binary);
  CHECK(read_grid(grid).spec().spacing[0] <= 0.3);
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("every surface kind runs") {
  auto dir = scratch("kinds");
  for (auto kind : {SurfaceKind::vdw, SurfaceKind::sas, SurfaceKind::ses, SurfaceKind::midway}) {
    RunConfig cfg = small_config(dir);
    cfg.surface.kind = kind;
    std::ostringstream out, err;
    CHECK(cmd_surface(cfg, out, err) == 0);
    CHECK(err.str().empty());
  }
  RunConfig custom = small_config(dir);
  custom.surface.kind = SurfaceKind::custom;
  std::ostringstream out, err;
  CHECK(cmd_surface(custom, out, err) == 2);
  custom.surface.level = 50.0;
  CHECK(cmd_surface(custom, out, err) == 0);
}

TEST_CASE("exit codes follow the error class") {
  auto dir = scratch("codes");
  std::ostringstream out, err;

  RunConfig missing = small_config(dir);
  missing.input = (dir / "nope.xyzr").string();
  CHECK(cmd_surface(missing, out, err) == 3);

  RunConfig bad_parse = small_config(dir);
  bad_parse.input = write_text(dir / "bad.xyzr", "0 0 0 -1\n");
  CHECK(cmd_surface(bad_parse, out, err) == 3);

  RunConfig bad_cfg = small_config(dir);
  bad_cfg.rho0 = -5;
  CHECK(cmd_surface(bad_cfg, out, err) == 2);

  RunConfig bench;
  bench.bench_n = 0;
  CHECK(cmd_bench(bench, out, err) == 2);
  bench.bench_n = 10;
  bench.stencil = 1;
  CHECK(cmd_bench(bench, out, err) == 2);
}

TEST_CASE("empty molecules give an empty mesh") {
  auto dir = scratch("empty");
  RunConfig cfg = small_config(dir);
  cfg.input = write_text(dir / "empty.xyzr", "# nothing\n");
  cfg.margin = 3.0;
  cfg.out_mesh = (dir / "e.obj").string();
  std::ostringstream out, err;
  CHECK(cmd_surface(cfg, out, err) == 0);
  CHECK(key_values(out.str())["triangles"] == "0");
  CHECK(slurp(dir / "e.obj").empty());
}

TEST_CASE("outputs are bit-identical across worker counts") {
  auto dir = scratch("workers");
  std::string first_mesh, first_grid;
  for (int w : {1, 2, 8}) {
    RunConfig cfg = small_config(dir);
    cfg.workers = w;
    cfg.out_mesh = (dir / ("m" + std::to_string(w) + ".obj")).string();
    cfg.out_grid = (dir / ("g" + std::to_string(w) + ".bin")).string();
    std::ostringstream out, err;
    REQUIRE(cmd_surface(cfg, out, err) == 0);
    const std::string mesh = slurp(cfg.out_mesh), grid = slurp(cfg.out_grid);
    if (first_mesh.empty()) {
      first_mesh = mesh;
      first_grid = grid;
    } else {
      CHECK(mesh == first_mesh);
      CHECK(grid == first_grid);
    }
  }
}

TEST_CASE("compare passes for matching solvers and fails a negative control") {
  auto dir = scratch("compare");
  RunConfig cfg = small_config(dir);
  cfg.spacing = 0.25;
  std::ostringstream out, err;
  CHECK(cmd_compare(cfg, out, err) == 0);
  CHECK(out.str().find("result=pass") != std::string::npos);

  cfg.fd_time = 0.0;  // FD field left at its initial state
  std::ostringstream out2, err2;
  CHECK(cmd_compare(cfg, out2, err2) == 1);
  CHECK(out2.str().find("result=fail") != std::string::npos);
}

TEST_CASE("bench reports both ratios") {
  RunConfig cfg;
  cfg.bench_n = 12;
  cfg.bench_reps = 1;
  cfg.stencil = 4;
  std::ostringstream out, err;
  REQUIRE(cmd_bench(cfg, out, err) == 0);
  const std::string text = out.str();
  const auto last = text.substr(text.rfind("bench size_ratio"));
  auto kv = key_values(last);
  CHECK(std::stod(kv["size_ratio"]) > 0.0);
  CHECK(std::stod(kv["stencil_ratio"]) > 0.0);
}

TEST_CASE("atomic writes leave nothing behind on failure") {
  auto dir = scratch("atomic");
  const auto target = (dir / "out.txt").string();
  write_file_atomically(target, [](std::ostream& o) { o << "first"; });
  CHECK(slurp(target) == "first");
  CHECK_THROWS(write_file_atomically(target, [](std::ostream& o) {
    o << "partial";
    throw NumericError("boom");
  }));
  CHECK(slurp(target) == "first");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
}

TEST_CASE("command-line front end exit codes") {
  auto dir = scratch("binary");
  const std::string mol = write_text(dir / "one.xyzr", "0 0 0 1.7\n");
  CHECK(run_cli("surface --input " + mol + " --spacing 0.4 --time 1") == 0);
  CHECK(run_cli("surface --input " + (dir / "missing.xyzr").string()) == 3);
  CHECK(run_cli("surface --input " + mol + " --grid 50 --spacing 0.4") == 2);
  CHECK(run_cli("surface --bogus-flag") == 2);
  CHECK(run_cli("surface") == 2);
  CHECK(run_cli("bench --n 0") == 2);
  CHECK(run_cli("") == 2);

  const std::string conf = write_text(dir / "run.conf", "input=" + mol + "\nspacing=0.4\ntime=1\nprobe=-2\n");
  CHECK(run_cli("surface --config " + conf) == 2);
  CHECK(run_cli("surface --config " + conf + " --probe 1.5") == 0);
}

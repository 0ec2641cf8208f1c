#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "exball/cli_runner.hpp"
#include "exball/nls_solver.hpp"
#include "exball/run_config.hpp"
#include "exball/spectral_transform.hpp"

using namespace exball;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("exball_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string small_config(const fs::path& out, double amplitude = 0.5, double t_end = 0.2, double extent = 16.0,
                         bool linear = false) {
  std::ostringstream s;
  s << R"({"spec_version": 1, "grid": {"L": )" << extent << R"(, "M": 256},
  "evolution": {"p": 4, "dt": 0.01, "t_end": )" << t_end << R"(, "snapshot_stride": 1, "linear": )"
    << (linear ? "true" : "false") << R"(},
  "etas": {"eta0": 0.25, "eta1": 0.05, "eta2": 0.01, "eta3": 0.002},
  "initial_condition": {"family": "gaussian", "amplitude": )" << amplitude << R"(},
  "diagnostics": {"R": [2, 4], "A": [2, 4], "morawetz_windows": [[0, 0.2]]},
  "output_dir": ")" << out.string() << R"("})";
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config_in.json";
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Captured {
  int code;
  std::string out, err;
};

template <class Fn>
Captured run(Fn&& fn) {
  std::ostringstream out, err;
  const int code = fn(out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("run config parsing") {
  const auto cfg = parse_run_config(R"({"spec_version": 1, "evolution": {"p": 6}})");
  CHECK(cfg.evolution.p == 6.0);
  CHECK(cfg.evolution.dealias_factor == 4);
  CHECK(cfg.extent == 64.0);
  CHECK(cfg.intervals == 8192);
  CHECK_THROWS_AS(parse_run_config(R"({"spec_version": 2})"), ParameterError);
  CHECK_THROWS_AS(parse_run_config(R"({"spec_version": 1, "grid": {"L": 8, "M": 64, "h": 1}})"), ParameterError);
  CHECK_THROWS_AS(parse_run_config(R"({"spec_version": 1, "evolution": {"dt": "fast"}})"), ParameterError);
  CHECK_THROWS_AS(parse_run_config(R"({"spec_version": 1, "grid": {"M": 15}})"), ParameterError);
  CHECK_THROWS_AS(parse_run_config(R"({"spec_version": 1, "initial_condition": {"family": "square"}})"), ParameterError);
  CHECK_THROWS_AS(parse_run_config("{ nope"), ParameterError);
  const auto round = parse_run_config(dump_run_config(cfg));
  CHECK(round.evolution.p == cfg.evolution.p);
  CHECK(round.evolution.dealias_factor == cfg.evolution.dealias_factor);
  CHECK(round.initial.family == cfg.initial.family);
  CHECK(round.diagnostics.radii == cfg.diagnostics.radii);
}

TEST_CASE("initial condition families") {
  const RadialGrid grid(16.0, 256);
  InitialCondition ic;
  ic.family = "sine_mode";
  ic.mode = 3;
  ic.amplitude = 2.0;
  const auto g = forward_transform(make_initial_condition(grid, ic, 1));
  for (std::size_t k = 0; k < g.size(); ++k)
    if (k != 2) CHECK(std::abs(g[k]) < 1e-12 * std::abs(g[2]));

  ic.family = "random";
  ic.modes = 16;
  const auto a = make_initial_condition(grid, ic, 7), b = make_initial_condition(grid, ic, 7);
  const auto c = make_initial_condition(grid, ic, 8);
  CHECK(spectral_l2_norm(forward_transform(a)) == doctest::Approx(2.0).epsilon(1e-12));
  for (std::size_t j = 0; j < grid.size(); ++j) CHECK(a[j] == b[j]);
  CHECK(norm(a - c, NormSpec::lp(2.0)) > 0.1);

  ic.family = "bump";
  ic.center = 1.0;
  CHECK_THROWS_AS(make_initial_condition(grid, ic, 1), DataError);
}

TEST_CASE("check suites") {
  cli::Options opts;
  auto transform = run([&](auto& o, auto& e) { return cli::cmd_check("transform", opts, o, e); });
  CHECK(transform.code == cli::kOk);
  CHECK(transform.out.find("PASS plancherel") != std::string::npos);
  CHECK(transform.out.find("FAIL") == std::string::npos);
  for (const char* suite : {"bernstein", "sobolev"})
    CHECK(run([&](auto& o, auto& e) { return cli::cmd_check(suite, opts, o, e); }).code == cli::kOk);
  auto unknown = run([&](auto& o, auto& e) { return cli::cmd_check("nonsense", opts, o, e); });
  CHECK(unknown.code == cli::kConfigError);
  CHECK(unknown.err.find("usage") != std::string::npos);

  TempDir dir("dispersive");
  opts.out = dir.path;
  opts.quiet = true;
  auto dispersive = run([&](auto& o, auto& e) { return cli::cmd_check("dispersive", opts, o, e); });
  CHECK(dispersive.code == cli::kOk);
  CHECK(dispersive.out.empty());
  CHECK(slurp(dir.path / "dispersive_scan.csv").rfind("t,r,s,abs_K,scaled\n", 0) == 0);
}

TEST_CASE("evolve and analyze a small run") {
  TempDir dir("evolve");
  const fs::path run_dir = dir.path / "run";
  const auto config = write_config(dir.path, small_config(run_dir));
  cli::Options opts;
  auto evolved = run([&](auto& o, auto& e) { return cli::cmd_evolve(config, opts, o, e); });
  REQUIRE(evolved.code == cli::kOk);
  CHECK(evolved.out.find("mass drift") != std::string::npos);
  CHECK(evolved.out.find("energy drift") != std::string::npos);
  for (const char* f : {"manifest.json", "config.json", "diagnostics.csv", "snapshot_000000.bin", "snapshot_000020.bin"})
    CHECK(fs::exists(run_dir / f));
  CHECK(slurp(run_dir / "diagnostics.csv").rfind("t,mass,energy,boundary_mass,M_R=", 0) == 0);

  auto intervals = run([&](auto& o, auto& e) { return cli::cmd_analyze(run_dir, "intervals", opts, o, e); });
  CHECK(intervals.code == cli::kOk);
  CHECK(intervals.out.find("exceptional") != std::string::npos);
  CHECK(fs::exists(run_dir / "intervals.csv"));
  CHECK(fs::exists(run_dir / "report_intervals.json"));

  auto morawetz = run([&](auto& o, auto& e) { return cli::cmd_analyze(run_dir, "morawetz", opts, o, e); });
  CHECK(morawetz.code == cli::kOk);
  CHECK(slurp(run_dir / "morawetz.csv").rfind("t_a,t_b,A,value,ratio\n", 0) == 0);

  auto scatter = run([&](auto& o, auto& e) { return cli::cmd_analyze(run_dir, "scatter", opts, o, e); });
  CHECK(scatter.code == cli::kOk);
  CHECK(fs::exists(run_dir / "cauchy_defect.csv"));
  CHECK(load_trajectory(run_dir / "v_plus").snapshots.size() == 1);

  auto unknown = run([&](auto& o, auto& e) { return cli::cmd_analyze(run_dir, "spectrum", opts, o, e); });
  CHECK(unknown.code == cli::kConfigError);

  {
    std::fstream f(run_dir / "snapshot_000003.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(64);
    f.put('\x55');
  }
  auto corrupt = run([&](auto& o, auto& e) { return cli::cmd_analyze(run_dir, "intervals", opts, o, e); });
  CHECK(corrupt.code == cli::kIntegrityError);
  CHECK(corrupt.err.find("integrity") != std::string::npos);
}

TEST_CASE("evolve is deterministic and honours --out") {
  TempDir dir("determinism");
  const auto config = write_config(dir.path, small_config(dir.path / "ignored"));
  cli::Options first{dir.path / "a", true}, second{dir.path / "b", true};
  CHECK(run([&](auto& o, auto& e) { return cli::cmd_evolve(config, first, o, e); }).code == cli::kOk);
  CHECK(run([&](auto& o, auto& e) { return cli::cmd_evolve(config, second, o, e); }).code == cli::kOk);
  CHECK_FALSE(fs::exists(dir.path / "ignored"));
  CHECK(slurp(dir.path / "a" / "manifest.json") == slurp(dir.path / "b" / "manifest.json"));
  CHECK(slurp(dir.path / "a" / "snapshot_000020.bin") == slurp(dir.path / "b" / "snapshot_000020.bin"));
}

TEST_CASE("evolve exit codes") {
  TempDir dir("codes");
  cli::Options opts{{}, true};
  auto code_for = [&](const std::string& text) {
    const auto path = write_config(dir.path, text);
    return run([&](auto& o, auto& e) { return cli::cmd_evolve(path, opts, o, e); });
  };
  auto missing = run([&](auto& o, auto& e) { return cli::cmd_evolve(dir.path / "none.json", opts, o, e); });
  CHECK(missing.code == cli::kConfigError);

  std::string bad_dt = small_config(dir.path / "r");
  bad_dt.replace(bad_dt.find("\"dt\": 0.01"), 10, "\"dt\": 0.03");
  const auto dt = code_for(bad_dt);
  CHECK(dt.code == cli::kConfigError);
  CHECK(dt.err.find("dt") != std::string::npos);

  const auto wall = code_for(R"({"spec_version": 1, "grid": {"L": 16, "M": 256},
    "initial_condition": {"family": "bump", "center": 1.5}, "output_dir": "x"})");
  CHECK(wall.code == cli::kConfigError);

  // Linear flow of data near the wall reaches r = 1 + 0.9 L well before t = 20 on L = 8.
  const auto truncated = code_for(small_config(dir.path / "t", 0.5, 20.0, 8.0, true));
  CHECK(truncated.code == cli::kNumericalAbort);
  CHECK(truncated.err.find("boundary") != std::string::npos);
  CHECK(fs::exists(dir.path / "t" / "manifest.json"));
  auto scatter = run([&](auto& o, auto& e) { return cli::cmd_analyze(dir.path / "t", "scatter", opts, o, e); });
  CHECK(scatter.code == cli::kNumericalAbort);
  CHECK(scatter.err.find("last trusted time") != std::string::npos);

  const auto blowup = code_for(small_config(dir.path / "n", 1e80));
  CHECK(blowup.code == cli::kNumericalAbort);

  auto absent = run([&](auto& o, auto& e) { return cli::cmd_analyze(dir.path / "nothing", "intervals", opts, o, e); });
  CHECK(absent.code == cli::kIntegrityError);
}

TEST_CASE("thread count resolution") {
  unsetenv("EXBALL_NLS_THREADS");
  CHECK(cli::resolve_thread_count(0) == 0);
  CHECK(cli::resolve_thread_count(3) == 3);
  setenv("EXBALL_NLS_THREADS", "5", 1);
  CHECK(cli::resolve_thread_count(0) == 5);
  CHECK(cli::resolve_thread_count(2) == 2);
  setenv("EXBALL_NLS_THREADS", "lots", 1);
  CHECK(cli::resolve_thread_count(0) == 0);
  unsetenv("EXBALL_NLS_THREADS");
}

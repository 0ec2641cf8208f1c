#include <iostream>

#include "CLI11.hpp"
#include "exball/cli_runner.hpp"
#include "exball/parallel.hpp"

int main(int argc, char** argv) {
  namespace cli = exball::cli;
  CLI::App app{"Radial NLS on the exterior of the unit ball: verification suites, evolution and analysis"};
  app.require_subcommand(1);

  int threads = 0;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--threads", threads, "worker threads (default: EXBALL_NLS_THREADS or hardware)");
  app.add_option("--out", out_dir, "output directory override");
  app.add_flag("--quiet", quiet, "print failures and errors only");

  std::string suite;
  auto* check = app.add_subcommand("check", "run a verification suite");
  check->add_option("suite", suite, "transform | kernels | bernstein | sobolev | dispersive")->required();

  std::string config;
  auto* evolve = app.add_subcommand("evolve", "evolve the configured initial data");
  evolve->add_option("config", config, "run configuration (JSON)")->required();

  std::string run_dir, analysis;
  auto* analyze = app.add_subcommand("analyze", "diagnose a stored run");
  analyze->add_option("run_dir", run_dir, "run directory")->required();
  analyze->add_option("analysis", analysis, "intervals | morawetz | scatter")->required();

  app.fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kConfigError;
  }

  exball::parallel::set_thread_count(cli::resolve_thread_count(threads));
  const cli::Options opts{out_dir, quiet};
  if (check->parsed()) return cli::cmd_check(suite, opts, std::cout, std::cerr);
  if (evolve->parsed()) return cli::cmd_evolve(config, opts, std::cout, std::cerr);
  return cli::cmd_analyze(run_dir, analysis, opts, std::cout, std::cerr);
}

#pragma once

// Command implementations behind the exball-nls executable.
//
//   check <transform|kernels|bernstein|sobolev|dispersive>
//   evolve <config.json>
//   analyze <run_dir> <intervals|morawetz|scatter>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace exball::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalAbort = 3,
  kIntegrityError = 4,
};

struct Options {
  std::filesystem::path out;  // overrides the output directory when non-empty
  bool quiet = false;
};

int cmd_check(const std::string& suite, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_evolve(const std::filesystem::path& config_path, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_analyze(const std::filesystem::path& run_dir, const std::string& analysis, const Options& opts,
                std::ostream& out, std::ostream& err);

// Thread count from --threads, else EXBALL_NLS_THREADS, else 0 (hardware).
unsigned resolve_thread_count(int flag_value);

}  // namespace exball::cli

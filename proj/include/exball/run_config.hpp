#pragma once

// JSON run configuration. Every section is optional; unknown keys at any level
// are rejected with a ParameterError naming the key.
//
// {
//   "spec_version": 1,
//   "grid": {"L": 64, "M": 8192},
//   "evolution": {"p": 4, "dt": 0.001, "t_start": 0, "t_end": 1,
//                 "snapshot_stride": 10, "dealias_factor": 3,
//                 "linear": false, "boundary_budget": 1e-8},
//   "etas": {"eta0": 0.1, "eta1": 0.01, "eta2": 0.001, "eta3": 0.0001},
//   "initial_condition": {"family": "gaussian", "amplitude": 2, "center": 1, "width": 1},
//   "diagnostics": {"R": [2, 8, 32], "A": [1, 2, 4, 8], "morawetz_windows": [[0, 1]]},
//   "output_dir": "runs/default",
//   "seed": 1
// }
//
// Initial-condition families (r >= 1):
//   gaussian   amplitude (r-1) exp(-((r-center)/width)^2) / r
//   bump       amplitude exp(-((r-center)/width)^2)            (must vanish at both ends)
//   sine_mode  amplitude sin(lambda_mode (r-1)) / r
//   random     random coefficients on modes 1..modes, scaled to spectral L^2 norm `amplitude`

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exball/diagnostics.hpp"
#include "exball/nls_solver.hpp"

namespace exball {

inline constexpr int kConfigVersion = 1;

struct InitialCondition {
  std::string family = "gaussian";
  double amplitude = 2.0;
  double center = 1.0;
  double width = 1.0;
  std::size_t mode = 1;
  std::size_t modes = 32;
};

struct DiagnosticsConfig {
  std::vector<double> radii{2.0, 8.0, 32.0};
  std::vector<double> morawetz_scales{1.0, 2.0, 4.0, 8.0};
  std::vector<std::array<double, 2>> morawetz_windows;  // empty: the whole run
};

struct RunConfig {
  double extent = 64.0;
  std::size_t intervals = 8192;
  EvolutionConfig evolution;
  EtaConstants etas;
  InitialCondition initial;
  DiagnosticsConfig diagnostics;
  std::filesystem::path output_dir = "runs/default";
  std::uint64_t seed = 1;

  RadialGrid grid() const { return RadialGrid(extent, intervals); }
  // ParameterError on any invalid field.
  void validate() const;
};

// ParameterError for malformed JSON, schema violations or unknown keys.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string dump_run_config(const RunConfig& cfg);

// Samples the configured family; DataError if it violates the Dirichlet ends.
RadialField make_initial_condition(const RadialGrid& grid, const InitialCondition& ic, std::uint64_t seed);

}  // namespace exball

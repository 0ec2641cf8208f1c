#pragma once

// Defocusing NLS  i u_t + Delta_D u = |u|^p u  on radial fields, advanced by
// Strang splitting in the sine-transform frame:
//
//   u <- e^{-i |u|^p dt/2} u,   g <- e^{-i lambda^2 dt} g,   u <- e^{-i |u|^p dt/2} u.
//
// The nonlinear phase is applied on a zero-padded grid (dealias_factor times
// more intervals) and truncated back to the working modes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "exball/radial_core.hpp"
#include "exball/spectral_transform.hpp"

namespace exball {

struct EvolutionConfig {
  double p = 4.0;
  double dt = 1e-3;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t snapshot_stride = 10;
  std::size_t dealias_factor = 3;
  bool linear = false;                // drop the nonlinearity (free flow)
  double boundary_budget = 1e-8;      // allowed mass fraction beyond 0.9 L

  // ParameterError naming the offending field: p >= 4, dt > 0, t_end > t_start,
  // (t_end - t_start)/dt an integer to 1e-9, stride >= 1,
  // dealias_factor >= max(3, ceil((p+2)/2)), budget in (0, 1).
  void validate() const;
  std::size_t steps() const;
  static std::size_t minimum_dealias_factor(double p);
};

struct SnapshotDiagnostics {
  double mass;               // ||u||^2_{L^2(r^2 dr)}
  double energy;
  double boundary_fraction;  // mass fraction beyond 0.9 L
};

struct Trajectory {
  EvolutionConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<SnapshotDiagnostics> diagnostics;
  bool truncated = false;  // stopped early: boundary budget exceeded

  const RadialGrid& grid() const { return snapshots.front().field.grid(); }
  double last_time() const { return snapshots.back().time; }
  // Index of the snapshot at time t (relative tolerance 1e-12); ParameterError otherwise.
  std::size_t index_of(double t) const;
};

// Snapshots at every snapshot_stride steps and at the final step. Throws
// NumericalAbort naming the step if a value turns non-finite, and
// ParameterError if u0 already violates the boundary budget.
Trajectory evolve(const RadialField& u0, const EvolutionConfig& cfg);

// 1/2 ||u'||^2 + 1/(p+2) ||u||_{p+2}^{p+2}, norms in L^2(r^2 dr).
double energy(const RadialField& u, double p);
double mass(const RadialField& u);

// |u|^p u on the grid refined by `dealias_factor`, returned in the working modes.
SpectralField nonlinearity(const SpectralField& g, double p, std::size_t dealias_factor);

// v(t) = e^{-it Delta_D} u(t) for snapshot k, in spectral form.
SpectralField free_profile(const Trajectory& traj, std::size_t k);

// Relative spectral H^1 size of
//   u(t1) - e^{i(t1-t0)Delta} u(t0) + i int_{t0}^{t1} e^{i(t1-s)Delta} F(u(s)) ds,
// u(s) rebuilt from a cubic-in-time interpolation of the free profile, the
// s-integral by composite Simpson on n_quad intervals (rounded up to even).
// ParameterError if t0, t1 are not snapshot times or n_quad < 8.
double duhamel_residual(const Trajectory& traj, double t0, double t1, std::size_t n_quad);

// Run directory: manifest.json plus snapshot_NNNNNN.bin (little-endian
// float64 re/im pairs, 2(M+1) values), FNV-1a 64 hashes in the manifest.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir);
// IntegrityError on a missing file, malformed manifest or hash mismatch.
Trajectory load_trajectory(const std::filesystem::path& dir);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

}  // namespace exball

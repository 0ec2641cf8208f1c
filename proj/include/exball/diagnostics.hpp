#pragma once

// Functionals of trajectories: local mass, Morawetz and weighted L^6
// integrals, spacetime norms, the L^10 interval decomposition with its
// exceptional/unexceptional classification, mass concentration, and the
// scattering profile v(t) = e^{-it Delta_D} u(t).
//
// Integrals over the physical domain (local mass, Morawetz, weighted L^6,
// mass concentration, gradient bound) carry the 4 pi of the sphere. Spacetime
// Lebesgue norms follow the library convention (measure r^2 dr).

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exball/nls_solver.hpp"

namespace exball {

struct EtaConstants {
  double eta0 = 0.1;
  double eta1 = 1e-2;
  double eta2 = 1e-3;
  double eta3 = 1e-4;

  // ParameterError unless 1 > eta0 > eta1 > eta2 > eta3 > 0.
  void validate() const;
};

enum class IntervalClass { Exceptional, Unexceptional, Unclassified };

std::string to_string(IntervalClass c);

struct IntervalRecord {
  double a = 0.0;
  double b = 0.0;
  double l10_norm = 0.0;
  IntervalClass classification = IntervalClass::Unclassified;
  bool partial = false;           // trailing interval with norm <= eta0
  std::size_t first = 0;          // snapshot index of a
  std::size_t last = 0;           // snapshot index of b
  double minus_norm = 0.0;        // ||e^{i(t-t_-)Delta} u(t_-)||_{L^10(I)} after classification
  double plus_norm = 0.0;         // ||e^{i(t-t_+)Delta} u(t_+)||_{L^10(I)} after classification

  double length() const { return b - a; }
};

// phi(r / R) with the library's cutoff profile.
struct CutoffSpec {
  double R = 1.0;
  double operator()(double r) const;
};

// 4 pi int |u|^2 phi(r/R)^2 r^2 dr. ParameterError for R < 1.
double local_mass(const RadialField& u, double R);

// max over snapshot pairs of R |M_R(t2)^{1/2} - M_R(t1)^{1/2}| / |t2 - t1|.
// ParameterError for fewer than two snapshots.
double mass_lipschitz_check(const Trajectory& traj, double R);

// sup over snapshots of ||grad u||_{L^2(Omega)} = sqrt(4 pi) ||u'||_{L^2(r^2 dr)}.
double gradient_sup(const Trajectory& traj);

// 4 pi int_{t_a}^{t_b} int_1^{min(A |I|^{1/2}, 1+L)} |u|^6 r dr dt with
// |I| = t_b - t_a; t_a, t_b must be snapshot times. ParameterError for A < 1.
double morawetz_integral(const Trajectory& traj, double t_a, double t_b, double A);

// 4 pi int int |u|^6 r dr dt over the whole run.
double weighted_l6_integral(const Trajectory& traj);

// L^q_t L^r_x over the snapshots in [t_a, t_b] (snapshot times).
// ParameterError if t_a >= t_b.
double spacetime_norm(const Trajectory& traj, double q, double r, double t_a, double t_b);

// Greedy left-to-right decomposition into windows whose L^10_{t,x} norm first
// exceeds eta0; a window whose norm would exceed 2 eta0 within one snapshot
// step raises ResolutionError naming it. The trailing remainder is kept as a
// partial record. A trajectory of total norm <= eta0 yields one unclassified
// whole-run record.
std::vector<IntervalRecord> partition_intervals(const Trajectory& traj, const EtaConstants& etas);

struct Classification {
  std::vector<IntervalRecord> records;
  std::size_t exceptional = 0;
  std::size_t unexceptional = 0;
  std::optional<double> min_unexceptional_length;  // over complete records
};

// u_-(t), u_+(t): free evolutions of the first and last snapshot. A record is
// exceptional iff either ||u_pm||_{L^10(I)} > eta0^10. Unclassified records
// pass through unchanged.
Classification classify_intervals(const Trajectory& traj, std::span<const IntervalRecord> records,
                                  const EtaConstants& etas);

// min over snapshots t in I of 4 pi int_1^{|I|^{1/2}/eta3} |u|^2 r^2 dr / |I|.
// ParameterError unless the record is unexceptional.
double mass_concentration_check(const Trajectory& traj, const IntervalRecord& record, const EtaConstants& etas);

// sum |I_j|^{1/2} / |J|^{1/2} for contiguous unexceptional records covering J.
// ParameterError for empty, non-contiguous or exceptional input.
double contiguous_sum_check(std::span<const IntervalRecord> records);

enum class Direction { Forward, Backward };

struct ScatteringProfile {
  SpectralField profile;         // v at the last (forward) or first (backward) window time
  double defect;                 // max_{i,j} ||v(t_i) - v(t_j)||, spectral H^1, over the window
  std::vector<double> times;     // window snapshot times
};

// Window of the last (forward) or first (backward) `window` snapshots,
// window >= 4. NumericalAbort naming the last trusted time if the run was
// truncated by the boundary budget.
ScatteringProfile scattering_profile(const Trajectory& traj, Direction direction, std::size_t window = 4);

// Cauchy defect of v over the snapshots with t_from <= t <= t_to (at least two).
double cauchy_defect(const Trajectory& traj, double t_from, double t_to);

// Columns t, mass, energy, boundary_mass, M_R=<R>... in %.16e.
void write_diagnostics_csv(std::ostream& out, const Trajectory& traj, std::span<const double> radii);
// Columns a, b, l10, class, length, partial.
void write_intervals_csv(std::ostream& out, std::span<const IntervalRecord> records);

}  // namespace exball

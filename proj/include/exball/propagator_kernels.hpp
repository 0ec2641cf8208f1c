#pragma once

// Free Dirichlet Schroedinger group on radial fields, its closed-form kernel,
// the half-Laplacian kernels and the Sobolev norm comparison.
//
// Kernel of e^{it Delta_D} on L^2(s^2 ds):
//
//   K(t,r,s) = e^{-i pi/4 sgn t} / (2 sqrt(pi |t|) r s)
//              * (e^{i (r-s)^2 / 4t} - e^{i (r+s-2)^2 / 4t}),
//
// so |t|^{3/2} |K| <= |1 - e^{i (r-1)(s-1)/t}| |t| / (2 sqrt(pi) r s) <= 1/(2 sqrt(pi)).

#include <iosfwd>
#include <span>
#include <vector>

#include "exball/radial_core.hpp"
#include "exball/spectral_transform.hpp"

namespace exball {

inline constexpr double kDispersiveConstant = 0.28209479177387814;  // 1 / (2 sqrt(pi))
inline constexpr double kDefaultBoundaryBudget = 1e-8;

struct PropagationResult {
  RadialField field;
  double boundary_fraction;  // boundary_mass_fraction of the result
  bool budget_exceeded;      // boundary_fraction > budget
};

// e^{it Delta_D} f = F0^*(e^{-i lambda^2 t} F0 f).
RadialField propagate(const RadialField& f, double t);
SpectralField propagate(const SpectralField& g, double t);

// As propagate, flagging results whose mass beyond 0.9 L exceeds `budget`.
PropagationResult propagate_checked(const RadialField& f, double t, double budget = kDefaultBoundaryBudget);

// Closed-form kernel. DomainError for t == 0 or r, s < 1.
Complex propagator_kernel(double t, double r, double s);

// Simpson quadrature of int K(t, r_j, s) f(s) s^2 ds on the field's own grid.
RadialField propagate_via_kernel(const RadialField& f, double t);

struct KernelPoint {
  double t;
  double r;
  double s;
  double modulus;  // |K(t,r,s)|
  double scaled;   // |t|^{3/2} |K(t,r,s)|
};

struct DispersiveScan {
  double sup = 0.0;
  KernelPoint argmax{};
  std::vector<KernelPoint> points;  // in scan order: t outer, r, then s
};

// Every (t, r, s) with t in `times` and r, s in `radii`. DomainError if a
// time is 0 or a radius < 1; ParameterError for empty inputs.
DispersiveScan dispersive_scan(std::span<const double> times, std::span<const double> radii);

// The scan used by the verification suites: t from 1e-2 to 1e8 by decades and
// radii {1, 1.5, 2, 5, 10, 50, 100, 1000}.
DispersiveScan default_dispersive_scan();

// CSV header "t,r,s,abs_K,scaled" and one %.16e row per point.
void write_kernel_csv(std::ostream& out, std::span<const KernelPoint> points);

enum class RieszKernel { K1, K0, Kdiff, KdiffT };

// K1 = (1/rs)(1/(r+s-2) + 1/(r-s)) + (1/(r s^2)) log|(r-s)/(r+s-2)|
// K0 = (1/rs)(1/(r+s) + 1/(r-s)) + (1/(r s^2)) log|(r-s)/(r+s)|
// Kdiff = K1 - K0 = (1/rs)(1/(r+s-2) - 1/(r+s)) + (1/(r s^2)) log((r+s)/(r+s-2))
// KdiffT: Kdiff with the log prefactor 1/(r^2 s).
// DomainError unless r, s > 1, and for r == s with K1 or K0.
double riesz_kernel(RieszKernel which, double r, double s);

enum class HalfLaplacianRoute { Spectral, Kernel };

struct HalfLaplacianResult {
  RadialField value;
  bool accuracy_warning;  // kernel route: f' varies by more than 5% per cell somewhere
};

// (-Delta_D)^{1/2} f. Spectral: multiply F0 f by lambda. Kernel: principal
// value of (1/pi) int K1(r,s) f'(s) s^2 ds by the punctured trapezoid rule
// with second-order diagonal corrections.
HalfLaplacianResult half_laplacian(const RadialField& f, HalfLaplacianRoute route);

// ||(-Delta_D)^{1/2} f||_p / ||f'||_p. ParameterError unless 1 < p < 3.
// DegenerateInputError if f' == 0.
double sobolev_ratio(const RadialField& f, double p);

// Same quotient without the exponent restriction (p >= 1).
double sobolev_quotient(const RadialField& f, double p);

// sin(lambda (r-1)) / (lambda r), tapered to zero over lambda (r-1) in
// [2 pi, 4 pi] by the cutoff profile. Requires 4 pi / lambda < L.
RadialField low_frequency_family(const RadialGrid& grid, double lambda);

}  // namespace exball

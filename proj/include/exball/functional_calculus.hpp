#pragma once

// Spectral multipliers m(sqrt(-Delta_D)) f = F0^*(m F0 f), Littlewood-Paley
// projectors and the explicit projector kernel
//
//   K_N(r,s) = (N/pi) (phihat(N(r-s)) - phihat(N(r+s-2))) / (r s),
//
// where phihat(x) = int_0^inf phi(lambda) cos(lambda x) dlambda.

#include <variant>
#include <vector>

#include "exball/radial_core.hpp"
#include "exball/spectral_transform.hpp"

namespace exball {

namespace profile {

// The fixed smooth cutoff: 1 on |x| <= 1, 0 on |x| >= 2, and
// chi(2-|x|) / (chi(2-|x|) + chi(|x|-1)) in between with chi(y) = exp(-1/y).
// Even, C-infinity, monotone on [1,2], and phi(1.5 + y) + phi(1.5 - y) = 1.
double cutoff(double x);
double cutoff_derivative(double x);

// sup |phi'| (attained at |x| = 1.5).
double cutoff_derivative_sup();

// Dyadic band psi(x) = phi(x) - phi(2x), supported in [1/2, 2].
double band(double x);

// phihat(x) = int_0^inf phi(lambda) cos(lambda x) dlambda, from a cubic spline
// table over [0, 512] (exactly 0 beyond). phihat(0) = 3/2.
double cutoff_cosine_transform(double x);

}  // namespace profile

struct PropagatorPhase {
  double t;  // symbol exp(-i lambda^2 t)
};
struct LPBand {
  double N;  // psi(lambda / N)
};
struct LPLow {
  double N;  // phi(lambda / N)
};
struct LPHigh {
  double N;  // 1 - phi(lambda / N)
};
struct FractionalPower {
  double sigma;  // lambda^sigma
};
struct Custom {
  std::vector<Complex> values;  // m(lambda_k), k = 1..M-1
};

using Multiplier = std::variant<PropagatorPhase, LPBand, LPLow, LPHigh, FractionalPower, Custom>;

// m(lambda_k) on the grid's frequencies. ParameterError for N <= 0,
// non-finite parameters or tabulated values, or a Custom table of wrong size.
std::vector<Complex> symbol_table(const Multiplier& m, const RadialGrid& grid);

SpectralField apply_multiplier(const Multiplier& m, const SpectralField& g);
RadialField apply_multiplier(const Multiplier& m, const RadialField& f);

enum class KernelKind { Low, Band };

// Kernel of P_{<=N} (Low) or P_N (Band). Symmetric in (r, s) and zero when
// either argument is 1. DomainError for r < 1 or s < 1.
double lp_kernel(double N, double r, double s, KernelKind kind = KernelKind::Low);

// Relative L^2(r^2 dr) difference between the spectral P_{<=N} f and the
// direct Simpson quadrature of int K_N(r,s) f(s) s^2 ds. The kernel path needs
// N h <= 1/4 and 2N below the grid's top frequency; otherwise ResolutionError.
double lp_kernel_crosscheck(double N, const RadialField& f);

struct SchurScan {
  double l1_sup;     // sup_r int_1^inf |K_N(r,s)| s^2 ds
  double linf_sup;   // sup_{r,s} |K_N(r,s)|
  double l1_argmax;  // r attaining l1_sup
};

// Schur-test quantities for P_{<=N} over r in [1, r_max]. The s-integral
// runs over [1, r + 512/N] where phihat is tabulated, at radii spread over
// the wall layer [1, 1 + 20/N] and over [1, r_max]; the sup scan uses a
// uniform (r,s) grid over [1, 1 + min(r_max - 1, 60/N)]^2.
SchurScan lp_kernel_schur_scan(double N, double r_max);

// ||P_{<=N} f||_q / (N^{3(1/p - 1/q)} ||f||_p) for 1 <= p <= q <= inf.
// ParameterError if p > q, DegenerateInputError if f == 0.
double bernstein_ratio(double p, double q, double N, const RadialField& f);

// ||(-Delta_D)^{sigma/2} P_N f||_p / (N^sigma ||P_N f||_p).
// DegenerateInputError if P_N f == 0.
double bernstein_band_ratio(double sigma, double p, double N, const RadialField& f);

}  // namespace exball

#pragma once

// Radial grids on the truncated exterior [1, 1+L], complex radial fields with
// Dirichlet ends, Simpson quadrature and the Lebesgue/Sobolev norms used
// throughout the library.
//
// All Lebesgue norms use the radial measure r^2 dr (no 4*pi factor). Quantities
// that are integrals over the physical domain (local mass, Morawetz) add the
// 4*pi themselves.

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "exball/errors.hpp"

namespace exball {

using Complex = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Uniform grid r_j = 1 + j*h, j = 0..M, h = L/M.
class RadialGrid {
 public:
  // Throws ParameterError unless extent > 0, M >= 16 and M even.
  RadialGrid(double extent, std::size_t intervals);

  double extent() const { return extent_; }
  std::size_t intervals() const { return intervals_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return intervals_ + 1; }
  double outer_radius() const { return 1.0 + extent_; }

  // r_0 = 1 and r_M = 1 + L exactly.
  double node(std::size_t j) const {
    return j == intervals_ ? 1.0 + extent_ : 1.0 + static_cast<double>(j) * spacing_;
  }

  // Same extent, factor times more intervals.
  RadialGrid refined(std::size_t factor) const;

  bool operator==(const RadialGrid& other) const = default;

 private:
  double extent_;
  std::size_t intervals_;
  double spacing_;
};

// Complex samples f(r_j) with f(r_0) = f(r_M) = 0 and all samples finite.
class RadialField {
 public:
  // Throws DataError if an endpoint is nonzero or a sample is not finite.
  RadialField(RadialGrid grid, std::vector<Complex> values);

  static RadialField zero(const RadialGrid& grid);

  // Samples `fn` on interior nodes. The endpoint values fn(1), fn(1+L) must be
  // negligible (<= 1e-10 of the sampled maximum) and are stored as exact zeros;
  // otherwise DataError.
  template <class Fn>
  static RadialField sample(const RadialGrid& grid, Fn&& fn);

  const RadialGrid& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  const Complex& operator[](std::size_t j) const { return values_[j]; }
  std::size_t size() const { return values_.size(); }

  RadialField& operator+=(const RadialField& other);
  RadialField& operator-=(const RadialField& other);
  RadialField& operator*=(Complex scale);

  friend RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
  friend RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
  friend RadialField operator*(Complex s, RadialField a) { return a *= s; }

 private:
  struct Unchecked {};
  RadialField(RadialGrid grid, std::vector<Complex> values, Unchecked);
  static RadialField from_samples(const RadialGrid& grid, std::vector<Complex> values, Complex at_inner,
                                  Complex at_outer);

  RadialGrid grid_;
  std::vector<Complex> values_;
};

// One time-stamped field; trajectories are ordered sequences of these.
struct Snapshot {
  double time;
  RadialField field;
};

struct NormSpec {
  enum class Kind { Lp, H1dot, WeightedLinf, SpacetimeLqLr };

  Kind kind = Kind::Lp;
  double p = 2.0;      // Lp exponent, or the spatial exponent r of L^q_t L^r_x
  double q = 2.0;      // temporal exponent
  double alpha = 0.0;  // weight exponent of WeightedLinf

  static NormSpec lp(double p) { return {Kind::Lp, p, 2.0, 0.0}; }
  static NormSpec h1dot() { return {Kind::H1dot, 2.0, 2.0, 0.0}; }
  static NormSpec weighted_linf(double alpha) { return {Kind::WeightedLinf, kInfinity, 2.0, alpha}; }
  static NormSpec spacetime(double q, double r) { return {Kind::SpacetimeLqLr, r, q, 0.0}; }
};

// Composite Simpson weights h/3 * (1,4,2,...,4,1) for the grid.
std::vector<double> simpson_weights(const RadialGrid& grid);

// Simpson integral of `samples` * r^weight_exponent over [1, 1+L].
// weight_exponent must be 0, 1 or 2 (ParameterError); non-finite samples give DataError.
double quadrature(const RadialGrid& grid, std::span<const double> samples, int weight_exponent);
Complex quadrature(const RadialField& f, int weight_exponent);

// Integral of `samples` over [1, upper] (upper clamped to [1, 1+L]): Simpson on
// whole panels, exact integral of the panel's interpolating quadratic on the
// partial panel.
double integrate_to(const RadialGrid& grid, std::span<const double> samples, double upper);

// int_{r > 1 + fraction*L} |f|^2 r^2 dr / ||f||^2 (0 for f == 0).
double boundary_mass_fraction(const RadialField& f, double fraction = 0.9);

// f' on the grid: 4th-order centred differences, 4th-order one-sided stencils
// at the two nodes nearest each end.
std::vector<Complex> derivative(const RadialGrid& grid, std::span<const Complex> samples);
std::vector<Complex> derivative(const RadialField& f);

// Lp / H1dot / WeightedLinf of a single field; SpacetimeLqLr needs snapshots.
double norm(const RadialField& f, const NormSpec& spec);

// L^p(r^2 dr) norm of arbitrary samples (no endpoint constraint).
double lp_norm(const RadialGrid& grid, std::span<const Complex> samples, double p);

// L^q_t L^r_x over the snapshots, trapezoid rule in time (q = inf takes the max
// over snapshots). Only the SpacetimeLqLr kind is accepted here.
double norm(std::span<const Snapshot> snapshots, const NormSpec& spec);

// ---------------------------------------------------------------------------

template <class Fn>
RadialField RadialField::sample(const RadialGrid& grid, Fn&& fn) {
  std::vector<Complex> values(grid.size());
  for (std::size_t j = 1; j + 1 < grid.size(); ++j) values[j] = Complex(fn(grid.node(j)));
  return from_samples(grid, std::move(values), Complex(fn(grid.node(0))),
                      Complex(fn(grid.node(grid.intervals()))));
}

}  // namespace exball

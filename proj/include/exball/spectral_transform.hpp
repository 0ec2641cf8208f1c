#pragma once

// Shifted sine transform diagonalising the radial Dirichlet Laplacian on the
// exterior of the unit ball:
//
//   g(lambda) = sqrt(2/pi) * int_1^{1+L} sin(lambda (s-1)) s f(s) ds,
//   f(r)      = sqrt(2/pi) / r * int_0^inf sin(lambda (r-1)) g(lambda) dlambda,
//
// discretised on lambda_k = k pi / L, k = 1..M-1, through a type-I DST of
// r_j f(r_j). The lambda-integral is the Riemann sum with weight pi/L, which
// makes forward/inverse an exact discrete unitary pair:
//   (pi/L) sum_k |g_k|^2 == h sum_j |r_j f_j|^2.

#include <functional>
#include <span>
#include <vector>

#include "exball/radial_core.hpp"

namespace exball {

// lambda_k = k pi / L for k = 1..M-1.
double frequency(const RadialGrid& grid, std::size_t k);
std::vector<double> frequencies(const RadialGrid& grid);

// Coefficients g(lambda_k), stored at index k-1.
class SpectralField {
 public:
  // Throws DataError on wrong length (must be M-1) or non-finite coefficients.
  SpectralField(RadialGrid grid, std::vector<Complex> coeffs);

  static SpectralField zero(const RadialGrid& grid);

  const RadialGrid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  // lambda of the coefficient stored at index i.
  double frequency_at(std::size_t i) const { return frequency(grid_, i + 1); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex scale);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

  // Pointwise product with a symbol sampled at lambda_k (size M-1).
  SpectralField multiplied(std::span<const Complex> symbol) const;

 private:
  RadialGrid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField forward_transform(const RadialField& f);
RadialField inverse_transform(const SpectralField& g);

// Synthesis on a grid with the same extent but a different resolution:
// coefficients are zero-padded (finer target) or truncated (coarser target).
// ParameterError if the extents differ.
RadialField inverse_transform(const SpectralField& g, const RadialGrid& target);

// Coefficients re-indexed onto `target` (same extent): zero-pad or truncate.
SpectralField resample(const SpectralField& g, const RadialGrid& target);

// Synthesises g on the grid refined by `refine`, multiplies each sample u(r_j)
// by factor(u(r_j)), analyses back and truncates to g's modes. Synthesis and
// analysis share a single exact normalisation, so a unimodular factor keeps
// the spectral L^2 norm up to unbiased rounding.
SpectralField pointwise_product(const SpectralField& g, std::size_t refine,
                                const std::function<Complex(Complex)>& factor);

// sqrt((pi/L) sum |g_k|^2)
double spectral_l2_norm(const SpectralField& g);
// sqrt((pi/L) sum lambda_k^2 |g_k|^2), equal to ||f'||_{L^2(r^2 dr)} in the continuum.
double spectral_h1_norm(const SpectralField& g);

// | ||F0 f||_{L^2(dlambda)} - ||f||_{L^2(s^2 ds)} | / ||f||_{L^2(s^2 ds)}, the
// physical norm by Simpson quadrature. DegenerateInputError for f == 0.
double plancherel_defect(const RadialField& f);

}  // namespace exball

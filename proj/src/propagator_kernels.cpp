#include "exball/propagator_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "exball/functional_calculus.hpp"
#include "exball/parallel.hpp"

namespace exball {

namespace {

using std::numbers::pi;

void require_radius(double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("radius must be finite and >= 1");
}

}  // namespace

SpectralField propagate(const SpectralField& g, double t) { return apply_multiplier(PropagatorPhase{t}, g); }

RadialField propagate(const RadialField& f, double t) {
  if (t == 0.0) return f;
  return inverse_transform(propagate(forward_transform(f), t));
}

PropagationResult propagate_checked(const RadialField& f, double t, double budget) {
  RadialField out = propagate(f, t);
  const double fraction = boundary_mass_fraction(out);
  return {std::move(out), fraction, fraction > budget};
}

Complex propagator_kernel(double t, double r, double s) {
  if (t == 0.0 || !std::isfinite(t)) throw DomainError("propagator kernel needs finite t != 0");
  require_radius(r);
  require_radius(s);
  const double a = std::abs(t);
  const Complex prefactor = std::polar(1.0 / (2.0 * std::sqrt(pi * a) * r * s), t > 0 ? -pi / 4 : pi / 4);
  // e^{i x^2/4t} - e^{i y^2/4t} = 2i sin((x^2-y^2)/8t) e^{i(x^2+y^2)/8t}; x^2 - y^2 = -4(r-1)(s-1)
  const double x = r - s, y = r + s - 2.0;
  const double half_gap = -(r - 1.0) * (s - 1.0) / (2.0 * t);
  const double mean = (x * x + y * y) / (8.0 * t);
  return prefactor * Complex(0.0, 2.0 * std::sin(half_gap)) * std::polar(1.0, mean);
}

RadialField propagate_via_kernel(const RadialField& f, double t) {
  const RadialGrid& grid = f.grid();
  const auto weights = simpson_weights(grid);
  std::vector<Complex> weighted(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = grid.node(j);
    weighted[j] = weights[j] * s * s * f[j];
  }
  std::vector<Complex> out(grid.size());
  parallel::for_each_index(grid.size() - 2, [&](std::size_t idx) {
    const std::size_t i = idx + 1;
    const double r = grid.node(i);
    Complex acc{};
    for (std::size_t j = 1; j + 1 < grid.size(); ++j)
      if (weighted[j] != Complex{}) acc += propagator_kernel(t, r, grid.node(j)) * weighted[j];
    out[i] = acc;
  });
  return RadialField(grid, std::move(out));
}

DispersiveScan dispersive_scan(std::span<const double> times, std::span<const double> radii) {
  if (times.empty() || radii.empty()) throw ParameterError("dispersive scan needs times and radii");
  for (double t : times)
    if (t == 0.0 || !std::isfinite(t)) throw DomainError("dispersive scan time must be finite and nonzero");
  for (double r : radii) require_radius(r);

  DispersiveScan scan;
  const std::size_t nr = radii.size();
  scan.points.resize(times.size() * nr * nr);
  parallel::for_each_index(scan.points.size(), [&](std::size_t idx) {
    const double t = times[idx / (nr * nr)];
    const double r = radii[(idx / nr) % nr];
    const double s = radii[idx % nr];
    const double modulus = std::abs(propagator_kernel(t, r, s));
    scan.points[idx] = {t, r, s, modulus, std::pow(std::abs(t), 1.5) * modulus};
  });
  scan.argmax = scan.points.front();
  for (const auto& p : scan.points)
    if (p.scaled > scan.argmax.scaled) scan.argmax = p;
  scan.sup = scan.argmax.scaled;
  return scan;
}

DispersiveScan default_dispersive_scan() {
  std::vector<double> times;
  for (int e = -2; e <= 8; ++e) times.push_back(std::pow(10.0, e));
  const std::vector<double> radii{1.0, 1.5, 2.0, 5.0, 10.0, 50.0, 100.0, 1000.0};
  return dispersive_scan(times, radii);
}

void write_kernel_csv(std::ostream& out, std::span<const KernelPoint> points) {
  out << "t,r,s,abs_K,scaled\n";
  char line[160];
  for (const auto& p : points) {
    std::snprintf(line, sizeof line, "%.16e,%.16e,%.16e,%.16e,%.16e\n", p.t, p.r, p.s, p.modulus, p.scaled);
    out << line;
  }
}

double riesz_kernel(RieszKernel which, double r, double s) {
  if (!(r > 1.0) || !(s > 1.0) || !std::isfinite(r) || !std::isfinite(s))
    throw DomainError("half-Laplacian kernels need r, s > 1");
  const bool singular = which == RieszKernel::K1 || which == RieszKernel::K0;
  if (singular && r == s) throw DomainError("K1 and K0 are singular on the diagonal r == s");
  const double rs = r * s;
  switch (which) {
    case RieszKernel::K1:
      return (1.0 / (r + s - 2.0) + 1.0 / (r - s)) / rs + std::log(std::abs((r - s) / (r + s - 2.0))) / (rs * s);
    case RieszKernel::K0:
      return (1.0 / (r + s) + 1.0 / (r - s)) / rs + std::log(std::abs((r - s) / (r + s))) / (rs * s);
    case RieszKernel::Kdiff:
      return (1.0 / (r + s - 2.0) - 1.0 / (r + s)) / rs + std::log1p(2.0 / (r + s - 2.0)) / (rs * s);
    case RieszKernel::KdiffT:
      return (1.0 / (r + s - 2.0) - 1.0 / (r + s)) / rs + std::log1p(2.0 / (r + s - 2.0)) / (rs * r);
  }
  throw ParameterError("unknown kernel");
}

namespace {

RadialField half_laplacian_kernel(const RadialField& f, bool& warning) {
  const RadialGrid& grid = f.grid();
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const auto fp = derivative(f);
  const auto fpp = derivative(grid, fp);

  double fp_max = 0.0, variation = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    fp_max = std::max(fp_max, std::abs(fp[j]));
    variation = std::max(variation, h * std::abs(fpp[j]));
  }
  warning = fp_max > 0.0 && variation > 0.05 * fp_max;

  std::vector<Complex> weighted(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = grid.node(j);
    const double w = (j == 0 || j + 1 == n) ? 0.5 * h : h;
    weighted[j] = w * s * s * fp[j];
  }
  const double log_cell = std::log(h / (2.0 * pi));
  std::vector<Complex> out(n);
  parallel::for_each_index(n - 2, [&](std::size_t idx) {
    const std::size_t i = idx + 1;
    const double r = grid.node(i);
    Complex acc{};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || weighted[j] == Complex{}) continue;
      const double s = grid.node(j);
      // K1 with the r == s node skipped; s = 1 is regular since r > 1.
      const double k = (1.0 / (r + s - 2.0) + 1.0 / (r - s)) / (r * s) +
                       std::log(std::abs((r - s) / (r + s - 2.0))) / (r * s * s);
      acc += k * weighted[j];
    }
    // Cell corrections at s = r: the 1/(r-s) part (q = f' s / r), the log|r-s|
    // part, and the regular terms evaluated on the skipped node.
    const Complex dq = ((fp[i + 1] * grid.node(i + 1) - fp[i - 1] * grid.node(i - 1)) / (2.0 * h)) / r;
    acc += -h * dq;
    acc += h * log_cell * fp[i] / r;
    acc += h * fp[i] * (1.0 / (2.0 * r - 2.0) - std::log(2.0 * r - 2.0) / r);
    out[i] = acc / pi;
  });
  return RadialField(grid, std::move(out));
}

}  // namespace

HalfLaplacianResult half_laplacian(const RadialField& f, HalfLaplacianRoute route) {
  if (route == HalfLaplacianRoute::Spectral) return {apply_multiplier(FractionalPower{1.0}, f), false};
  bool warning = false;
  RadialField value = half_laplacian_kernel(f, warning);
  return {std::move(value), warning};
}

double sobolev_quotient(const RadialField& f, double p) {
  if (!(p >= 1.0)) throw ParameterError("Lebesgue exponent must be >= 1");
  const double gradient = lp_norm(f.grid(), derivative(f), p);
  if (gradient == 0.0) throw DegenerateInputError("Sobolev ratio undefined for f' == 0");
  return norm(half_laplacian(f, HalfLaplacianRoute::Spectral).value, NormSpec::lp(p)) / gradient;
}

double sobolev_ratio(const RadialField& f, double p) {
  if (!(p > 1.0 && p < 3.0)) throw ParameterError("Sobolev equivalence needs 1 < p < 3");
  return sobolev_quotient(f, p);
}

RadialField low_frequency_family(const RadialGrid& grid, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("frequency must be positive");
  if (4.0 * pi / lambda >= grid.extent()) throw ParameterError("taper does not fit inside the grid");
  return RadialField::sample(grid, [lambda](double r) {
    const double phase = lambda * (r - 1.0);
    return std::sin(phase) / (lambda * r) * profile::cutoff(phase / (2.0 * pi));
  });
}

}  // namespace exball

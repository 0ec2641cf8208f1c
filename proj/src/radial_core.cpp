#include "exball/radial_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace exball {

namespace {

void require_exponent(double p, const char* what) {
  if (!(p >= 1.0)) {  // also rejects NaN
    std::ostringstream msg;
    msg << what << " exponent must lie in [1, inf], got " << p;
    throw ParameterError(msg.str());
  }
}

double power_abs(double magnitude, double p) {
  if (p == 2.0) return magnitude * magnitude;
  return std::pow(magnitude, p);
}

}  // namespace

RadialGrid::RadialGrid(double extent, std::size_t intervals)
    : extent_(extent), intervals_(intervals), spacing_(extent / static_cast<double>(intervals)) {
  if (!(extent > 0.0) || !std::isfinite(extent)) throw ParameterError("grid extent L must be positive and finite");
  if (intervals < 16 || intervals % 2 != 0) throw ParameterError("grid interval count M must be even and >= 16");
}

RadialGrid RadialGrid::refined(std::size_t factor) const {
  if (factor == 0) throw ParameterError("refinement factor must be positive");
  return RadialGrid(extent_, intervals_ * factor);
}

RadialField::RadialField(RadialGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DataError("field length does not match grid");
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j].real()) || !std::isfinite(values_[j].imag())) {
      std::ostringstream msg;
      msg << "non-finite sample at node " << j;
      throw DataError(msg.str());
    }
  }
  if (values_.front() != Complex{} || values_.back() != Complex{})
    throw DataError("Dirichlet endpoints violated: f(1) and f(1+L) must be zero");
}

RadialField::RadialField(RadialGrid grid, std::vector<Complex> values, Unchecked)
    : grid_(grid), values_(std::move(values)) {}

RadialField RadialField::zero(const RadialGrid& grid) {
  return RadialField(grid, std::vector<Complex>(grid.size()), Unchecked{});
}

RadialField RadialField::from_samples(const RadialGrid& grid, std::vector<Complex> values, Complex at_inner,
                                      Complex at_outer) {
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::abs(v));
  const double tol = 1e-10 * std::max(peak, 1e-300);
  if (!(std::abs(at_inner) <= tol)) throw DataError("sampled function does not vanish at r = 1 (Dirichlet condition)");
  if (!(std::abs(at_outer) <= tol))
    throw DataError("sampled function is not negligible at the truncation radius r = 1 + L");
  values.front() = Complex{};
  values.back() = Complex{};
  return RadialField(grid, std::move(values));
}

RadialField& RadialField::operator+=(const RadialField& other) {
  if (!(grid_ == other.grid_)) throw ParameterError("grid mismatch in field arithmetic");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& other) {
  if (!(grid_ == other.grid_)) throw ParameterError("grid mismatch in field arithmetic");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

RadialField& RadialField::operator*=(Complex scale) {
  for (auto& v : values_) v *= scale;
  return *this;
}

std::vector<double> simpson_weights(const RadialGrid& grid) {
  const std::size_t n = grid.size();
  const double third = grid.spacing() / 3.0;
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = (j % 2 == 1 ? 4.0 : 2.0) * third;
  w.front() = third;
  w.back() = third;
  return w;
}

double quadrature(const RadialGrid& grid, std::span<const double> samples, int weight_exponent) {
  if (weight_exponent < 0 || weight_exponent > 2) throw ParameterError("weight exponent must be 0, 1 or 2");
  if (samples.size() != grid.size()) throw DataError("sample count does not match grid");
  const double third = grid.spacing() / 3.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (!std::isfinite(samples[j])) throw DataError("non-finite sample in quadrature");
    const double r = grid.node(j);
    const double weight = weight_exponent == 0 ? 1.0 : (weight_exponent == 1 ? r : r * r);
    const double c = (j == 0 || j + 1 == samples.size()) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += c * weight * samples[j];
  }
  return sum * third;
}

Complex quadrature(const RadialField& f, int weight_exponent) {
  std::vector<double> re(f.size()), im(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    re[j] = f[j].real();
    im[j] = f[j].imag();
  }
  return {quadrature(f.grid(), re, weight_exponent), quadrature(f.grid(), im, weight_exponent)};
}

double integrate_to(const RadialGrid& grid, std::span<const double> samples, double upper) {
  if (samples.size() != grid.size()) throw DataError("sample count does not match grid");
  const double h = grid.spacing();
  const double x = std::clamp(upper, 1.0, grid.outer_radius()) - 1.0;
  // Whole Simpson panels [r_{2k}, r_{2k+2}] below `upper`.
  std::size_t panels = static_cast<std::size_t>(std::floor(x / (2.0 * h)));
  panels = std::min(panels, grid.intervals() / 2);
  double sum = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const std::size_t j = 2 * k;
    sum += samples[j] + 4.0 * samples[j + 1] + samples[j + 2];
  }
  sum *= h / 3.0;
  if (panels == grid.intervals() / 2) return sum;
  // Partial panel: integrate the quadratic through the panel's three nodes.
  const std::size_t j = 2 * panels;
  const double tau = (x - static_cast<double>(j) * h) / h;
  if (tau <= 0.0) return sum;
  const double y0 = samples[j], y1 = samples[j + 1], y2 = samples[j + 2];
  const double b = 0.5 * (-3.0 * y0 + 4.0 * y1 - y2);
  const double c = 0.5 * (y0 - 2.0 * y1 + y2);
  return sum + h * (y0 * tau + b * tau * tau / 2.0 + c * tau * tau * tau / 3.0);
}

double boundary_mass_fraction(const RadialField& f, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("boundary fraction must lie in [0, 1]");
  const RadialGrid& grid = f.grid();
  std::vector<double> density(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.node(j);
    density[j] = std::norm(f[j]) * r * r;
  }
  const double total = integrate_to(grid, density, grid.outer_radius());
  if (total == 0.0) return 0.0;
  const double inner = integrate_to(grid, density, 1.0 + fraction * grid.extent());
  return std::max(0.0, total - inner) / total;
}

std::vector<Complex> derivative(const RadialGrid& grid, std::span<const Complex> f) {
  const std::size_t n = f.size();
  if (n != grid.size()) throw DataError("sample count does not match grid");
  const double inv = 1.0 / (12.0 * grid.spacing());
  std::vector<Complex> d(n);
  for (std::size_t j = 2; j + 2 < n; ++j) d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * inv;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
  const std::size_t m = n - 1;
  d[m] = -(-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]) * inv;
  d[m - 1] = -(-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]) * inv;
  return d;
}

std::vector<Complex> derivative(const RadialField& f) { return derivative(f.grid(), f.values()); }

double lp_norm(const RadialGrid& grid, std::span<const Complex> samples, double p) {
  require_exponent(p, "Lp");
  if (samples.size() != grid.size()) throw DataError("sample count does not match grid");
  if (p == kInfinity) {
    double m = 0.0;
    for (const auto& v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  std::vector<double> integrand(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) integrand[j] = power_abs(std::abs(samples[j]), p);
  const double integral = quadrature(grid, integrand, 2);
  return p == 2.0 ? std::sqrt(integral) : std::pow(integral, 1.0 / p);
}

double norm(const RadialField& f, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::Lp:
      return lp_norm(f.grid(), f.values(), spec.p);
    case NormSpec::Kind::H1dot: {
      const auto d = derivative(f);
      return lp_norm(f.grid(), d, 2.0);
    }
    case NormSpec::Kind::WeightedLinf: {
      if (!std::isfinite(spec.alpha)) throw ParameterError("weight exponent alpha must be finite");
      double m = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j)
        m = std::max(m, std::pow(f.grid().node(j), spec.alpha) * std::abs(f[j]));
      return m;
    }
    case NormSpec::Kind::SpacetimeLqLr:
      throw ParameterError("spacetime norms need a trajectory, not a single field");
  }
  throw ParameterError("unknown norm kind");
}

double norm(std::span<const Snapshot> snapshots, const NormSpec& spec) {
  if (spec.kind != NormSpec::Kind::SpacetimeLqLr) throw ParameterError("trajectory norms must be SpacetimeLqLr");
  require_exponent(spec.q, "temporal");
  require_exponent(spec.p, "spatial");
  if (snapshots.empty()) throw ParameterError("empty time window");
  std::vector<double> spatial(snapshots.size());
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& f = snapshots[i].field;
    spatial[i] = lp_norm(f.grid(), f.values(), spec.p);
    if (i > 0 && !(snapshots[i].time > snapshots[i - 1].time))
      throw ParameterError("snapshot times must be strictly increasing");
  }
  if (spec.q == kInfinity) return *std::max_element(spatial.begin(), spatial.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
    const double dt = snapshots[i + 1].time - snapshots[i].time;
    sum += 0.5 * dt * (std::pow(spatial[i], spec.q) + std::pow(spatial[i + 1], spec.q));
  }
  return std::pow(sum, 1.0 / spec.q);
}

}  // namespace exball

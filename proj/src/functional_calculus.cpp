#include "exball/functional_calculus.hpp"

#include <fftw3.h>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "exball/parallel.hpp"

namespace exball {

namespace profile {

namespace {

double chi(double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; }

// Tabulation of phihat on [0, kTableEnd] with kTableIntervals + 1 nodes.
constexpr double kTableEnd = 512.0;
constexpr std::size_t kTableIntervals = 1u << 16;
// DCT length; lambda step pi / (n * dx) keeps the lambda-trapezoid alias at
// 2 pi / dlambda ~ 4096, far beyond the table range.
constexpr std::size_t kTransformLength = 1u << 18;

class CosineTable {
 public:
  static const CosineTable& instance() {
    static const CosineTable table;
    return table;
  }
  double operator()(double x) const {
    const double ax = std::abs(x);
    return ax > kTableEnd ? 0.0 : spline_(ax);
  }

 private:
  CosineTable() : spline_(build()) {}

  static boost::math::interpolators::cardinal_cubic_b_spline<double> build() {
    const double dx = kTableEnd / static_cast<double>(kTableIntervals);
    const std::size_t n = kTransformLength;
    const double dlam = std::numbers::pi / (static_cast<double>(n) * dx);
    // REDFT00 of length n+1: Y_k = X_0 + (-1)^k X_n + 2 sum_{j=1}^{n-1} X_j cos(pi j k / n),
    // so the lambda-trapezoid sum is dlam * Y_k / 2 at x = k dx.
    std::vector<double> in(n + 1), out(n + 1);
    for (std::size_t j = 0; j <= n; ++j) in[j] = cutoff(static_cast<double>(j) * dlam);
    fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(n + 1), in.data(), out.data(), FFTW_REDFT00, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> values(kTableIntervals + 1);
    for (std::size_t k = 0; k <= kTableIntervals; ++k) values[k] = 0.5 * dlam * out[k];
    // phihat is even: zero slope at the origin; negligible slope at the far end.
    return {values.begin(), values.end(), 0.0, dx, 0.0, 0.0};
  }

  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

}  // namespace

double cutoff(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double up = chi(2.0 - a);
  const double down = chi(a - 1.0);
  return up / (up + down);
}

double cutoff_derivative(double x) {
  const double a = std::abs(x);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double u = 2.0 - a, d = a - 1.0;
  const double up = chi(u), down = chi(d);
  const double denom = (up + down) * (up + down);
  // d/da [up/(up+down)] = -up*down (1/u^2 + 1/d^2) / (up+down)^2
  const double value = -up * down * (1.0 / (u * u) + 1.0 / (d * d)) / denom;
  return x < 0.0 ? -value : value;
}

double cutoff_derivative_sup() {
  static const double sup = [] {
    constexpr int kSamples = 200000;
    double best = 0.0;
    for (int i = 1; i < kSamples; ++i) best = std::max(best, std::abs(cutoff_derivative(1.0 + static_cast<double>(i) / kSamples)));
    return best;
  }();
  return sup;
}

double band(double x) { return cutoff(x) - cutoff(2.0 * x); }

double cutoff_cosine_transform(double x) { return CosineTable::instance()(x); }

}  // namespace profile

namespace {

void require_positive_scale(double N) {
  if (!(N > 0.0) || !std::isfinite(N)) throw ParameterError("frequency scale N must be positive and finite");
}

struct SymbolVisitor {
  const RadialGrid& grid;

  std::vector<Complex> tabulate(auto&& fn) const {
    std::vector<Complex> out(grid.intervals() - 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(frequency(grid, i + 1));
    return out;
  }

  std::vector<Complex> operator()(const PropagatorPhase& m) const {
    if (!std::isfinite(m.t)) throw ParameterError("propagator time must be finite");
    return tabulate([&](double lam) { return std::polar(1.0, -lam * lam * m.t); });
  }
  std::vector<Complex> operator()(const LPBand& m) const {
    require_positive_scale(m.N);
    return tabulate([&](double lam) { return Complex(profile::band(lam / m.N)); });
  }
  std::vector<Complex> operator()(const LPLow& m) const {
    require_positive_scale(m.N);
    return tabulate([&](double lam) { return Complex(profile::cutoff(lam / m.N)); });
  }
  std::vector<Complex> operator()(const LPHigh& m) const {
    require_positive_scale(m.N);
    return tabulate([&](double lam) { return Complex(1.0 - profile::cutoff(lam / m.N)); });
  }
  std::vector<Complex> operator()(const FractionalPower& m) const {
    if (!std::isfinite(m.sigma)) throw ParameterError("fractional power must be finite");
    return tabulate([&](double lam) { return Complex(std::pow(lam, m.sigma)); });
  }
  std::vector<Complex> operator()(const Custom& m) const {
    if (m.values.size() + 1 != grid.intervals()) throw ParameterError("custom symbol must have M-1 values");
    for (const auto& v : m.values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ParameterError("non-finite custom symbol value");
    return m.values;
  }
};

double lp_norm_of(const RadialField& f, double p) { return norm(f, NormSpec::lp(p)); }

double inverse_or_zero(double p) { return p == kInfinity ? 0.0 : 1.0 / p; }

}  // namespace

std::vector<Complex> symbol_table(const Multiplier& m, const RadialGrid& grid) {
  return std::visit(SymbolVisitor{grid}, m);
}

SpectralField apply_multiplier(const Multiplier& m, const SpectralField& g) {
  return g.multiplied(symbol_table(m, g.grid()));
}

RadialField apply_multiplier(const Multiplier& m, const RadialField& f) {
  return inverse_transform(apply_multiplier(m, forward_transform(f)));
}

double lp_kernel(double N, double r, double s, KernelKind kind) {
  require_positive_scale(N);
  if (!(r >= 1.0) || !(s >= 1.0)) throw DomainError("projector kernel needs r, s >= 1");
  const double a = r - 1.0, b = s - 1.0;
  auto low = [&](double scale) {
    return scale / std::numbers::pi *
           (profile::cutoff_cosine_transform(scale * (a - b)) - profile::cutoff_cosine_transform(scale * (a + b))) /
           (r * s);
  };
  return kind == KernelKind::Low ? low(N) : low(N) - low(0.5 * N);
}

double lp_kernel_crosscheck(double N, const RadialField& f) {
  require_positive_scale(N);
  const RadialGrid& grid = f.grid();
  const double h = grid.spacing();
  const double top = frequency(grid, grid.intervals() - 1);
  if (N * h > 0.25 || 2.0 * N >= top) {
    std::ostringstream msg;
    msg << "under-resolved: kernel path needs N h <= 0.25 and 2N < lambda_max (N h = " << N * h << ")";
    throw ResolutionError(msg.str());
  }
  const RadialField spectral = apply_multiplier(LPLow{N}, f);
  if (norm(spectral, NormSpec::lp(2.0)) == 0.0 && norm(f, NormSpec::lp(2.0)) == 0.0) return 0.0;

  const auto weights = simpson_weights(grid);
  std::vector<Complex> weighted(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = grid.node(j);
    weighted[j] = weights[j] * s * s * f[j];
  }
  std::vector<Complex> direct(grid.size());
  parallel::for_each_index(grid.size() - 2, [&](std::size_t idx) {
    const std::size_t i = idx + 1;
    const double r = grid.node(i);
    Complex acc{};
    for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
      if (weighted[j] == Complex{}) continue;
      acc += lp_kernel(N, r, grid.node(j)) * weighted[j];
    }
    direct[i] = acc;
  });
  std::vector<Complex> diff(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) diff[j] = direct[j] - spectral[j];
  const double ref = norm(spectral, NormSpec::lp(2.0));
  if (ref == 0.0) throw DegenerateInputError("spectral projection vanishes");
  return lp_norm(grid, diff, 2.0) / ref;
}

SchurScan lp_kernel_schur_scan(double N, double r_max) {
  require_positive_scale(N);
  if (!(r_max > 1.0)) throw ParameterError("scan needs r_max > 1");
  SchurScan scan{0.0, 0.0, 1.0};

  // L1 part: dense Simpson in s at radii resolving both the wall layer of
  // width ~1/N and the whole range [1, r_max].
  std::vector<double> radii;
  constexpr std::size_t kWall = 160, kRange = 240;
  const double wall = std::min(r_max - 1.0, 20.0 / N);
  for (std::size_t i = 0; i < kWall; ++i) radii.push_back(1.0 + wall * static_cast<double>(i) / kWall);
  for (std::size_t i = 0; i < kRange; ++i)
    radii.push_back(1.0 + (r_max - 1.0) * static_cast<double>(i) / static_cast<double>(kRange - 1));
  std::vector<double> l1(radii.size());
  const double ds_target = 0.02 / N;
  parallel::for_each_index(radii.size(), [&](std::size_t i) {
    const double r = radii[i];
    const double s_end = r + 512.0 / N;
    std::size_t panels = static_cast<std::size_t>(std::ceil((s_end - 1.0) / (2.0 * ds_target)));
    panels = std::max<std::size_t>(panels, 8);
    const std::size_t n = 2 * panels;
    const double ds = (s_end - 1.0) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double s = 1.0 + ds * static_cast<double>(j);
      const double c = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      sum += c * std::abs(lp_kernel(N, r, s)) * s * s;
    }
    l1[i] = sum * ds / 3.0;
  });
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (l1[i] > scan.l1_sup) {
      scan.l1_sup = l1[i];
      scan.l1_argmax = radii[i];
    }
  }

  constexpr std::size_t kSup = 600;
  const double span = std::min(r_max - 1.0, 60.0 / N);
  std::vector<double> row_max(kSup + 1);
  parallel::for_each_index(kSup + 1, [&](std::size_t i) {
    const double r = 1.0 + span * static_cast<double>(i) / kSup;
    double m = 0.0;
    for (std::size_t j = 0; j <= kSup; ++j)
      m = std::max(m, std::abs(lp_kernel(N, r, 1.0 + span * static_cast<double>(j) / kSup)));
    row_max[i] = m;
  });
  scan.linf_sup = *std::max_element(row_max.begin(), row_max.end());
  return scan;
}

double bernstein_ratio(double p, double q, double N, const RadialField& f) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw ParameterError("Lebesgue exponents must lie in [1, inf]");
  if (p > q) throw ParameterError("Bernstein ratio needs p <= q");
  require_positive_scale(N);
  const double denom_norm = lp_norm_of(f, p);
  if (denom_norm == 0.0) throw DegenerateInputError("Bernstein ratio undefined for f == 0");
  const double exponent = 3.0 * (inverse_or_zero(p) - inverse_or_zero(q));
  return lp_norm_of(apply_multiplier(LPLow{N}, f), q) / (std::pow(N, exponent) * denom_norm);
}

double bernstein_band_ratio(double sigma, double p, double N, const RadialField& f) {
  require_positive_scale(N);
  const SpectralField band = apply_multiplier(LPBand{N}, forward_transform(f));
  const double base = lp_norm_of(inverse_transform(band), p);
  if (base == 0.0) throw DegenerateInputError("P_N f vanishes");
  const double powered = lp_norm_of(inverse_transform(apply_multiplier(FractionalPower{sigma}, band)), p);
  return powered / (std::pow(N, sigma) * base);
}

}  // namespace exball

#include "exball/spectral_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace exball {

namespace {

// FFTW planning is not thread-safe, execution with new arrays is. Plans are
// created once per length under a lock and reused from any thread.
class SinePlanCache {
 public:
  static SinePlanCache& instance() {
    static SinePlanCache cache;
    return cache;
  }

  fftw_plan plan_for(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n), out(n);
    fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_RODFT00,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, plan);
    return plan;
  }

  ~SinePlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  SinePlanCache() = default;
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

// out_k = sum_{j=1}^{n} in_j sin(pi j k / (n+1)), k = 1..n (unnormalised DST-I / 2).
void dst1(std::span<const double> in, std::span<double> out) {
  fftw_plan plan = SinePlanCache::instance().plan_for(in.size());
  // fftw_execute_r2r takes a non-const input; the out-of-place RODFT00 plan preserves it.
  fftw_execute_r2r(plan, const_cast<double*>(in.data()), out.data());
  for (auto& v : out) v *= 0.5;
}

// Complex DST-I via two real transforms.
std::vector<Complex> dst1(std::span<const Complex> in) {
  const std::size_t n = in.size();
  std::vector<double> re(n), im(n), tre(n), tim(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = in[i].real();
    im[i] = in[i].imag();
  }
  dst1(re, tre);
  dst1(im, tim);
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {tre[i], tim[i]};
  return out;
}

void require_same_extent(const RadialGrid& a, const RadialGrid& b) {
  if (a.extent() != b.extent()) throw ParameterError("grid mismatch: spectral resampling needs equal extents");
}

}  // namespace

double frequency(const RadialGrid& grid, std::size_t k) {
  return static_cast<double>(k) * std::numbers::pi / grid.extent();
}

std::vector<double> frequencies(const RadialGrid& grid) {
  std::vector<double> lam(grid.intervals() - 1);
  for (std::size_t i = 0; i < lam.size(); ++i) lam[i] = frequency(grid, i + 1);
  return lam;
}

SpectralField::SpectralField(RadialGrid grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() + 1 != grid_.intervals()) throw DataError("spectral coefficient count must be M-1");
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DataError("non-finite spectral coefficient");
}

SpectralField SpectralField::zero(const RadialGrid& grid) {
  return SpectralField(grid, std::vector<Complex>(grid.intervals() - 1));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ParameterError("grid mismatch in spectral arithmetic");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ParameterError("grid mismatch in spectral arithmetic");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(Complex scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

SpectralField SpectralField::multiplied(std::span<const Complex> symbol) const {
  if (symbol.size() != coeffs_.size()) throw ParameterError("symbol length must be M-1");
  std::vector<Complex> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs_[i] * symbol[i];
  return SpectralField(grid_, std::move(out));
}

SpectralField forward_transform(const RadialField& f) {
  const RadialGrid& grid = f.grid();
  const std::size_t n = grid.intervals() - 1;
  std::vector<Complex> weighted(n);
  for (std::size_t i = 0; i < n; ++i) weighted[i] = grid.node(i + 1) * f[i + 1];
  auto coeffs = dst1(weighted);
  const double scale = std::sqrt(2.0 / std::numbers::pi) * grid.spacing();
  for (auto& c : coeffs) c *= scale;
  return SpectralField(grid, std::move(coeffs));
}

RadialField inverse_transform(const SpectralField& g, const RadialGrid& target) {
  require_same_extent(g.grid(), target);
  const std::size_t n = target.intervals() - 1;
  std::vector<Complex> padded(n);
  const std::size_t keep = std::min(n, g.size());
  for (std::size_t i = 0; i < keep; ++i) padded[i] = g[i];
  const auto synth = dst1(padded);
  const double scale = std::sqrt(2.0 / std::numbers::pi) * std::numbers::pi / target.extent();
  std::vector<Complex> values(target.size());
  for (std::size_t i = 0; i < n; ++i) values[i + 1] = scale * synth[i] / target.node(i + 1);
  return RadialField(target, std::move(values));
}

SpectralField pointwise_product(const SpectralField& g, std::size_t refine,
                                const std::function<Complex(Complex)>& factor) {
  if (refine < 1) throw ParameterError("refinement factor must be >= 1");
  const RadialGrid fine = g.grid().refined(refine);
  const std::size_t n = fine.intervals() - 1;
  std::vector<Complex> padded(n);
  std::copy(g.coeffs().begin(), g.coeffs().end(), padded.begin());
  // dst1 applied twice is (M'/2) times the identity.
  auto synth = dst1(padded);
  const double scale = std::sqrt(2.0 / std::numbers::pi) * std::numbers::pi / fine.extent();
  for (std::size_t i = 0; i < n; ++i) synth[i] *= factor(scale * synth[i] / fine.node(i + 1));
  auto coeffs = dst1(synth);
  const double half = 0.5 * static_cast<double>(fine.intervals());
  std::vector<Complex> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs[i] / half;
  return SpectralField(g.grid(), std::move(out));
}

RadialField inverse_transform(const SpectralField& g) { return inverse_transform(g, g.grid()); }

SpectralField resample(const SpectralField& g, const RadialGrid& target) {
  require_same_extent(g.grid(), target);
  std::vector<Complex> out(target.intervals() - 1);
  const std::size_t keep = std::min(out.size(), g.size());
  for (std::size_t i = 0; i < keep; ++i) out[i] = g[i];
  return SpectralField(target, std::move(out));
}

double spectral_l2_norm(const SpectralField& g) {
  double sum = 0.0;
  for (const auto& c : g.coeffs()) sum += std::norm(c);
  return std::sqrt(sum * std::numbers::pi / g.grid().extent());
}

double spectral_h1_norm(const SpectralField& g) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lam = g.frequency_at(i);
    sum += lam * lam * std::norm(g[i]);
  }
  return std::sqrt(sum * std::numbers::pi / g.grid().extent());
}

double plancherel_defect(const RadialField& f) {
  const double physical = norm(f, NormSpec::lp(2.0));
  if (physical == 0.0) throw DegenerateInputError("Plancherel defect undefined for the zero field");
  const double spectral = spectral_l2_norm(forward_transform(f));
  return std::abs(spectral - physical) / physical;
}

}  // namespace exball

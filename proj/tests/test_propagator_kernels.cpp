#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "exball/propagator_kernels.hpp"

using namespace exball;
using std::numbers::pi;

namespace {

double rel(const RadialField& a, const RadialField& b) {
  return norm(a - b, NormSpec::lp(2.0)) / norm(b, NormSpec::lp(2.0));
}

RadialField wall_gaussian(const RadialGrid& grid) {
  return RadialField::sample(grid, [](double r) { return (r - 1) * std::exp(-(r - 1) * (r - 1)) / r; });
}

RadialField bump(const RadialGrid& grid, double center, double width) {
  return RadialField::sample(grid, [=](double r) {
    const double x = (r - center) / width;
    return std::exp(-x * x) * (r - 1) / r;
  });
}

// Odd extension of x e^{-x^2} evolved under u_t = i u_xx, restricted to r = 1 + x.
Complex wall_gaussian_evolved(double t, double r) {
  const Complex w(1.0, 4.0 * t);
  const double x = r - 1;
  return x * std::pow(w, -1.5) * std::exp(-x * x / w) / r;
}

// Heat kernel with complex diffusivity kappa = eps + i t, odd reflection at r = 1.
Complex reflected_heat_kernel(Complex kappa, double r, double s) {
  const Complex pre = 1.0 / (std::sqrt(4.0 * pi * kappa) * r * s);
  const double minus = r - s, plus = r + s - 2;
  return pre * (std::exp(-minus * minus / (4.0 * kappa)) - std::exp(-plus * plus / (4.0 * kappa)));
}

double max_diff_on_coarse(const RadialField& coarse, const RadialField& fine) {
  const std::size_t stride = fine.grid().intervals() / coarse.grid().intervals();
  double worst = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) worst = std::max(worst, std::abs(coarse[j] - fine[j * stride]));
  return worst;
}

}  // namespace

TEST_CASE("spectral propagation matches the closed-form wall Gaussian") {
  const RadialGrid grid(64.0, 4096);
  const auto f = wall_gaussian(grid);
  for (double t : {0.1, 0.5, 1.0, 2.0, -1.5}) {
    const auto u = propagate(f, t);
    const auto exact = RadialField::sample(grid, [t](double r) { return wall_gaussian_evolved(t, r); });
    CAPTURE(t);
    CHECK(rel(u, exact) < 1e-8);
  }
  CHECK(rel(propagate(f, 0.0), f) == 0.0);
}

TEST_CASE("free group law and unitarity") {
  const RadialGrid grid(32.0, 2048);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<Complex> c(grid.intervals() - 1);
  for (std::size_t k = 0; k < 400; ++k) c[k] = {normal(rng), normal(rng)};
  const auto f = inverse_transform(SpectralField(grid, c));
  const double n0 = norm(f, NormSpec::lp(2.0));
  for (auto [a, b] : {std::pair{0.3, 0.4}, std::pair{-1.0, 2.5}, std::pair{5.0, -5.0}}) {
    const auto two_steps = propagate(propagate(f, a), b);
    CHECK(rel(two_steps, propagate(f, a + b)) < 1e-12);
    CHECK(std::abs(norm(propagate(f, a), NormSpec::lp(2.0)) - n0) < 1e-12 * n0);
  }
  CHECK(rel(propagate(propagate(f, 1.7), -1.7), f) < 1e-12);
}

TEST_CASE("boundary budget flags mass reaching the outer wall") {
  const RadialGrid grid(8.0, 512);
  const auto f = bump(grid, 3.0, 0.5);
  const auto early = propagate_checked(f, 0.01);
  CHECK_FALSE(early.budget_exceeded);
  CHECK(early.boundary_fraction < 1e-8);
  const auto late = propagate_checked(f, 2.0);
  CHECK(late.budget_exceeded);
  CHECK(late.boundary_fraction > 1e-8);
  CHECK_FALSE(propagate_checked(f, 2.0, 1.0).budget_exceeded);
}

TEST_CASE("closed-form kernel values and symmetry") {
  CHECK(std::abs(propagator_kernel(1.0, 2.0, 2.0)) == doctest::Approx(0.067622).epsilon(1e-5));
  for (double t : {-3.0, 0.01, 0.7, 40.0})
    for (double r : {1.0, 1.3, 2.0, 7.5})
      for (double s : {1.0, 1.1, 4.0}) {
        const Complex k = propagator_kernel(t, r, s);
        CHECK(std::abs(k - propagator_kernel(t, s, r)) <= 1e-15 * (1 + std::abs(k)));
        CHECK(std::abs(k - std::conj(propagator_kernel(-t, r, s))) <= 1e-14 * (1 + std::abs(k)));
        CHECK(std::abs(k - reflected_heat_kernel(Complex(0.0, t), r, s)) <= 1e-12 * (1 + std::abs(k)));
      }
  CHECK(propagator_kernel(1.0, 1.0, 3.0) == Complex{});
  CHECK_THROWS_AS(propagator_kernel(0.0, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(propagator_kernel(1.0, 0.5, 2.0), DomainError);
}

TEST_CASE("kernel agrees with the regularised spectral integral") {
  using boost::math::quadrature::gauss_kronrod;
  const double eps = 0.05;
  for (double t : {0.5, 2.0})
    for (auto [r, s] : {std::pair{2.0, 2.0}, std::pair{1.5, 3.0}, std::pair{4.0, 1.2}}) {
      auto part = [&](bool imag) {
        return gauss_kronrod<double, 61>::integrate(
            [&](double lam) {
              const Complex v = 2.0 / (pi * r * s) * std::sin(lam * (r - 1)) * std::sin(lam * (s - 1)) *
                                std::exp(Complex(-eps * lam * lam, -t * lam * lam));
              return imag ? v.imag() : v.real();
            },
            0.0, 40.0, 15, 1e-14);
      };
      const Complex quad(part(false), part(true));
      CHECK(std::abs(quad - reflected_heat_kernel(Complex(eps, t), r, s)) < 1e-10);
    }
}

TEST_CASE("kernel quadrature reproduces spectral propagation") {
  const RadialGrid grid(32.0, 8192);
  const auto f = wall_gaussian(grid);
  CHECK(rel(propagate_via_kernel(f, 1.0), propagate(f, 1.0)) < 1e-8);
}

TEST_CASE("dispersive scan") {
  const std::vector<double> times{0.1, 1.0, 10.0}, radii{1.0, 2.0, 3.0};
  const auto scan = dispersive_scan(times, radii);
  CHECK(scan.points.size() == 27);
  double best = 0.0;
  for (const auto& p : scan.points) {
    CHECK(p.scaled == doctest::Approx(std::pow(std::abs(p.t), 1.5) * p.modulus));
    CHECK(p.scaled <= kDispersiveConstant + 1e-12);
    best = std::max(best, p.scaled);
  }
  CHECK(scan.sup == best);
  CHECK(scan.argmax.scaled == best);
  CHECK(scan.points[0].r == 1.0);
  CHECK(scan.points[0].scaled == 0.0);

  const auto full = default_dispersive_scan();
  CHECK(full.points.size() == 11 * 8 * 8);
  CHECK(full.sup <= kDispersiveConstant);
  CHECK(full.sup > 0.99 * kDispersiveConstant);
  CHECK(kDispersiveConstant == doctest::Approx(0.5 / std::sqrt(pi)).epsilon(1e-16));

  const std::vector<double> bad_t{0.0}, bad_r{0.5}, none;
  CHECK_THROWS_AS(dispersive_scan(bad_t, radii), DomainError);
  CHECK_THROWS_AS(dispersive_scan(times, bad_r), DomainError);
  CHECK_THROWS_AS(dispersive_scan(none, radii), ParameterError);
}

TEST_CASE("kernel CSV layout") {
  const std::vector<double> times{1.0}, radii{2.0};
  const auto scan = dispersive_scan(times, radii);
  std::ostringstream out;
  write_kernel_csv(out, scan.points);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,r,s,abs_K,scaled");
  CHECK(row.rfind("1.0000000000000000e+00,2.0000000000000000e+00,2.0000000000000000e+00,", 0) == 0);
}

TEST_CASE("half-Laplacian kernels") {
  auto kdiff = [](long double r, long double s) {
    return (1 / (r * s)) * (1 / (r + s - 2) - 1 / (r + s)) + (1 / (r * s * s)) * std::log((r + s) / (r + s - 2));
  };
  CHECK(riesz_kernel(RieszKernel::Kdiff, 10, 10) == doctest::Approx(1.609161e-4).epsilon(1e-6));
  for (double r : {1.001, 1.5, 3.0, 20.0, 500.0})
    for (double s : {1.002, 2.0, 9.0, 1000.0}) {
      const double k = riesz_kernel(RieszKernel::Kdiff, r, s);
      CHECK(k > 0.0);
      CHECK(k == doctest::Approx(static_cast<double>(kdiff(r, s))).epsilon(1e-12));
      CHECK(riesz_kernel(RieszKernel::KdiffT, r, s) == doctest::Approx(riesz_kernel(RieszKernel::Kdiff, s, r)).epsilon(1e-13));
      CHECK(riesz_kernel(RieszKernel::K1, r, s) - riesz_kernel(RieszKernel::K0, r, s) ==
            doctest::Approx(k).epsilon(1e-6));
    }
  CHECK_THROWS_AS(riesz_kernel(RieszKernel::K1, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(riesz_kernel(RieszKernel::K0, 3.0, 3.0), DomainError);
  CHECK_NOTHROW(riesz_kernel(RieszKernel::Kdiff, 3.0, 3.0));
  CHECK_THROWS_AS(riesz_kernel(RieszKernel::Kdiff, 1.0, 3.0), DomainError);
}

TEST_CASE("half-Laplacian: kernel route against the spectral route") {
  for (double L : {32.0, 64.0}) {
    const RadialGrid grid(L, static_cast<std::size_t>(L * 128));
    const auto f = bump(grid, 4.0, 1.0);
    const auto spectral = half_laplacian(f, HalfLaplacianRoute::Spectral);
    const auto kernel = half_laplacian(f, HalfLaplacianRoute::Kernel);
    CHECK_FALSE(spectral.accuracy_warning);
    CHECK_FALSE(kernel.accuracy_warning);
    CHECK(rel(kernel.value, spectral.value) < (L < 40 ? 1e-3 : 2e-4));
  }
}

TEST_CASE("half-Laplacian kernel route converges at second order") {
  std::vector<RadialField> levels;
  for (std::size_t M : {1024, 2048, 4096}) levels.push_back(half_laplacian(bump(RadialGrid(32.0, M), 4.0, 1.0), HalfLaplacianRoute::Kernel).value);
  const double coarse = max_diff_on_coarse(levels[0], levels[1]);
  const double fine = max_diff_on_coarse(levels[1], levels[2]);
  CHECK(coarse / fine > 3.0);
}

TEST_CASE("half-Laplacian warns on under-resolved data") {
  const RadialGrid grid(32.0, 256);
  const auto f = bump(grid, 4.0, 0.1);
  CHECK(half_laplacian(f, HalfLaplacianRoute::Kernel).accuracy_warning);
  CHECK_FALSE(half_laplacian(f, HalfLaplacianRoute::Spectral).accuracy_warning);
}

TEST_CASE("Sobolev ratio") {
  const RadialGrid grid(32.0, 8192);
  for (double c : {3.0, 4.0, 6.0, 8.0, 10.0})
    for (double w : {0.5, 1.0}) {
      const auto f = bump(grid, c, w);
      CHECK(std::abs(sobolev_ratio(f, 2.0) - 1.0) < 1e-8);
    }
  const auto f = bump(grid, 4.0, 1.0);
  for (double p : {1.5, 2.5}) {
    const double q = sobolev_ratio(f, p);
    CHECK(q > 0.2);
    CHECK(q < 5.0);
  }
  CHECK_THROWS_AS(sobolev_ratio(f, 3.0), ParameterError);
  CHECK_THROWS_AS(sobolev_ratio(f, 1.0), ParameterError);
  CHECK_NOTHROW(sobolev_quotient(f, 4.0));
  CHECK_THROWS_AS(sobolev_quotient(f, 0.5), ParameterError);
  CHECK_THROWS_AS(sobolev_quotient(RadialField::zero(grid), 2.0), DegenerateInputError);
}

TEST_CASE("low-frequency family drives the p = 4 quotient down") {
  const RadialGrid grid(128.0, 8192);
  double previous = kInfinity;
  for (double lam : {1.0, 0.5, 0.25, 0.125}) {
    const double q = sobolev_quotient(low_frequency_family(grid, lam), 4.0);
    CHECK(q < previous);
    previous = q;
  }
  CHECK(previous < 0.8);
  CHECK_THROWS_AS(low_frequency_family(grid, 0.05), ParameterError);
  CHECK_THROWS_AS(low_frequency_family(grid, -1.0), ParameterError);
}

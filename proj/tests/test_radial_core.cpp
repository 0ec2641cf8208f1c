#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "exball/radial_core.hpp"
#include "exball/spectral_transform.hpp"

using namespace exball;
using boost::math::quadrature::gauss_kronrod;

namespace {

double oracle(auto fn, double a, double b) { return gauss_kronrod<double, 61>::integrate(fn, a, b, 15, 1e-14); }

RadialField random_field(const RadialGrid& grid, std::uint64_t seed, std::size_t modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> c(grid.intervals() - 1);
  for (std::size_t k = 0; k < modes; ++k) c[k] = {normal(rng), normal(rng)};
  return inverse_transform(SpectralField(grid, std::move(c)));
}

}  // namespace

TEST_CASE("grid nodes hit both ends exactly") {
  const RadialGrid grid(32.0, 4096);
  CHECK(grid.node(0) == 1.0);
  CHECK(grid.node(4096) == 33.0);
  CHECK(grid.spacing() == doctest::Approx(32.0 / 4096));
  const RadialGrid odd_extent(0.3, 30);
  CHECK(odd_extent.node(30) == 1.3);
  CHECK(grid.refined(3).intervals() == 3 * 4096);
}

TEST_CASE("grid rejects odd, small or degenerate sizes") {
  CHECK_THROWS_AS(RadialGrid(32.0, 15), ParameterError);
  CHECK_THROWS_AS(RadialGrid(32.0, 14), ParameterError);
  CHECK_THROWS_AS(RadialGrid(32.0, 101), ParameterError);
  CHECK_THROWS_AS(RadialGrid(0.0, 64), ParameterError);
  CHECK_THROWS_AS(RadialGrid(-1.0, 64), ParameterError);
  CHECK_NOTHROW(RadialGrid(1.0, 16));
}

TEST_CASE("fields enforce Dirichlet ends and finiteness") {
  const RadialGrid grid(2.0, 16);
  std::vector<Complex> v(17, Complex(0.0));
  v[5] = 1.0;
  CHECK_NOTHROW(RadialField(grid, v));
  auto bad = v;
  bad[0] = 1e-3;
  CHECK_THROWS_AS(RadialField(grid, bad), DataError);
  bad = v;
  bad[16] = Complex(0.0, 1e-9);
  CHECK_THROWS_AS(RadialField(grid, bad), DataError);
  bad = v;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(RadialField(grid, bad), DataError);
  bad = v;
  bad[3] = kInfinity;
  CHECK_THROWS_AS(RadialField(grid, bad), DataError);
  CHECK_THROWS_AS(RadialField(grid, std::vector<Complex>(10)), DataError);
  CHECK_THROWS_AS(RadialField::sample(grid, [](double) { return 1.0; }), DataError);
  const auto ok = RadialField::sample(grid, [](double r) { return (r - 1.0) * (3.0 - r); });
  CHECK(ok[0] == Complex(0.0));
  CHECK(ok[16] == Complex(0.0));
}

TEST_CASE("quadrature of a quadratic is exact") {
  const RadialGrid grid(2.0, 16);
  const auto f = RadialField::sample(grid, [](double r) { return (r - 1.0) * (3.0 - r); });
  CHECK(std::abs(quadrature(f, 0) - Complex(4.0 / 3.0)) < 1e-14);
  CHECK(quadrature(RadialField::zero(grid), 2) == Complex(0.0));
  // Cubic between nodes: still exact.
  const auto cubic = RadialField::sample(grid, [](double r) { return (r - 1.0) * (3.0 - r) * r; });
  CHECK(std::abs(quadrature(cubic, 0).real() - oracle([](double r) { return (r - 1) * (3 - r) * r; }, 1, 3)) < 1e-14);
}

TEST_CASE("quadrature of the Gaussian family against adaptive Gauss-Kronrod") {
  const RadialGrid grid(32.0, 8192);
  const auto f = RadialField::sample(grid, [](double r) { return std::exp(-(r - 1) * (r - 1)) * (r - 1) / r; });
  const double exact = oracle([](double x) { return x * std::exp(-x * x) * (1 + x); }, 0.0, 40.0);
  CHECK(std::abs(quadrature(f, 2).real() - exact) / exact < 1e-10);
}

TEST_CASE("quadrature rejects bad weights and non-finite samples") {
  const RadialGrid grid(2.0, 16);
  std::vector<double> samples(17, 1.0);
  CHECK_THROWS_AS(quadrature(grid, samples, 3), ParameterError);
  CHECK_THROWS_AS(quadrature(grid, samples, -1), ParameterError);
  samples[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(quadrature(grid, samples, 0), DataError);
}

TEST_CASE("Simpson convergence order is at least 3.5") {
  auto integrand = [](double r) { return std::exp(-r) * std::cos(3 * r); };
  const double exact = oracle([&](double r) { return integrand(r) * r * r; }, 1.0, 5.0);
  std::vector<double> errors;
  for (std::size_t m : {32, 64, 128}) {
    const RadialGrid grid(4.0, m);
    std::vector<double> s(grid.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = integrand(grid.node(j));
    errors.push_back(std::abs(quadrature(grid, s, 2) - exact));
  }
  CHECK(std::log2(errors[0] / errors[1]) >= 3.5);
  CHECK(std::log2(errors[1] / errors[2]) >= 3.5);
}

TEST_CASE("integrate_to agrees with full quadrature and integrates quadratics exactly") {
  const RadialGrid grid(2.0, 16);
  std::vector<double> s(grid.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = 1.0 + grid.node(j) * grid.node(j);
  CHECK(integrate_to(grid, s, 3.0) == doctest::Approx(quadrature(grid, s, 0)).epsilon(1e-15));
  CHECK(integrate_to(grid, s, 10.0) == doctest::Approx(quadrature(grid, s, 0)).epsilon(1e-15));
  CHECK(integrate_to(grid, s, 1.0) == 0.0);
  for (double upper : {1.05, 1.3, 2.2071, 2.9}) {
    const double exact = (upper - 1.0) + (upper * upper * upper - 1.0) / 3.0;
    CHECK(integrate_to(grid, s, upper) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("L2 norm of a sine arch against the oracle") {
  const RadialGrid grid(2.0, 2048);
  const double pi = std::numbers::pi;
  const auto f = RadialField::sample(grid, [pi](double r) { return std::sin(pi * (r - 1) / 2); });
  const double exact = std::sqrt(oracle([pi](double r) { return std::pow(std::sin(pi * (r - 1) / 2) * r, 2); }, 1, 3));
  CHECK(norm(f, NormSpec::lp(2.0)) == doctest::Approx(exact).epsilon(1e-12));
  for (const auto& spec : {NormSpec::lp(1.0), NormSpec::lp(2.0), NormSpec::lp(kInfinity), NormSpec::h1dot(),
                           NormSpec::weighted_linf(0.5)})
    CHECK(norm(RadialField::zero(grid), spec) == 0.0);
}

TEST_CASE("norm parameters are validated") {
  const RadialGrid grid(2.0, 16);
  const auto f = RadialField::sample(grid, [](double r) { return (r - 1.0) * (3.0 - r); });
  CHECK_THROWS_AS(norm(f, NormSpec::lp(0.5)), ParameterError);
  CHECK_THROWS_AS(norm(f, NormSpec::lp(std::numeric_limits<double>::quiet_NaN())), ParameterError);
  CHECK_THROWS_AS(norm(f, NormSpec::spacetime(2.0, 2.0)), ParameterError);
  CHECK(norm(f, NormSpec::lp(kInfinity)) == doctest::Approx(1.0));
}

TEST_CASE("H1dot matches the analytic derivative at fourth order") {
  const double exact = std::sqrt(oracle(
      [](double r) {
        const double e = std::exp(-(r - 4) * (r - 4));
        const double d = e / (r * r) + (r - 1) / r * e * (-2 * (r - 4));
        return d * d * r * r;
      },
      1, 33));
  std::vector<double> errors;
  for (std::size_t m : {4096, 8192}) {
    const RadialGrid grid(32.0, m);
    const auto f = RadialField::sample(grid, [](double r) { return std::exp(-(r - 4) * (r - 4)) * (r - 1) / r; });
    errors.push_back(std::abs(norm(f, NormSpec::h1dot()) - exact) / exact);
  }
  CHECK(errors[0] < 1e-8);
  CHECK(errors[1] < errors[0] / 12.0);
}

TEST_CASE("derivative stencils are fourth order") {
  auto err = [](std::size_t m) {
    const RadialGrid grid(2.0, m);
    std::vector<Complex> s(grid.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = std::sin(2 * grid.node(j));
    const auto d = derivative(grid, s);
    double e = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) e = std::max(e, std::abs(d[j] - 2 * std::cos(2 * grid.node(j))));
    return e;
  };
  CHECK(std::log2(err(64) / err(128)) > 3.7);
}

TEST_CASE("radial embedding: r^{1/2}|f| bounded by ||f'|| and tightening under refinement") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (std::size_t m : {2048, 8192}) {
      const RadialGrid grid(16.0, m);
      const auto f = random_field(grid, seed, 24);
      CHECK(norm(f, NormSpec::weighted_linf(0.5)) <= norm(f, NormSpec::h1dot()) * (1.0 + 1e-6));
    }
  }
  for (double c : {1.0, 2.0, 5.0}) {
    const RadialGrid grid(32.0, 4096);
    const auto f = RadialField::sample(grid, [c](double r) { return std::exp(-(r - c) * (r - c)) * (r - 1) / r; });
    CHECK(norm(f, NormSpec::weighted_linf(0.5)) <= norm(f, NormSpec::h1dot()) * (1 + 1e-9));
  }
}

TEST_CASE("boundary mass fraction") {
  const RadialGrid grid(10.0, 1000);
  const auto inner = RadialField::sample(grid, [](double r) { return std::exp(-10 * (r - 3) * (r - 3)) * (r - 1); });
  CHECK(boundary_mass_fraction(inner) < 1e-30);
  const auto outer = RadialField::sample(grid, [](double r) { return std::exp(-50 * (r - 10.3) * (r - 10.3)) * (r - 1); });
  CHECK(boundary_mass_fraction(outer) > 0.5);
  CHECK(boundary_mass_fraction(RadialField::zero(grid)) == 0.0);
  CHECK_THROWS_AS(boundary_mass_fraction(inner, 1.5), ParameterError);
}

TEST_CASE("spacetime norms: trapezoid in time, max for q = inf") {
  const RadialGrid grid(4.0, 64);
  const auto f = RadialField::sample(grid, [](double r) { return (r - 1) * (5 - r); });
  const double fx = norm(f, NormSpec::lp(6.0));
  std::vector<Snapshot> snaps;
  for (int k = 0; k <= 4; ++k) snaps.push_back({0.25 * k, Complex(1.0 + k) * f});
  double trap = 0.0;
  for (int k = 0; k < 4; ++k) trap += 0.125 * (std::pow((1.0 + k) * fx, 2) + std::pow((2.0 + k) * fx, 2));
  CHECK(norm(snaps, NormSpec::spacetime(2.0, 6.0)) == doctest::Approx(std::sqrt(trap)).epsilon(1e-13));
  CHECK(norm(snaps, NormSpec::spacetime(kInfinity, 6.0)) == doctest::Approx(5.0 * fx).epsilon(1e-14));
  std::vector<Snapshot> zero{{0.0, RadialField::zero(grid)}, {1.0, RadialField::zero(grid)}};
  CHECK(norm(zero, NormSpec::spacetime(10.0, 10.0)) == 0.0);
  CHECK_THROWS_AS(norm(std::span<const Snapshot>{}, NormSpec::spacetime(2.0, 2.0)), ParameterError);
  std::vector<Snapshot> backwards{{1.0, f}, {0.5, f}};
  CHECK_THROWS_AS(norm(backwards, NormSpec::spacetime(2.0, 2.0)), ParameterError);
  CHECK_THROWS_AS(norm(snaps, NormSpec::lp(2.0)), ParameterError);
  CHECK_THROWS_AS(norm(snaps, NormSpec::spacetime(0.5, 2.0)), ParameterError);
}

#include "exball/nls_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exball/functional_calculus.hpp"
#include "exball/propagator_kernels.hpp"

namespace exball {

namespace {

[[noreturn]] void bad_field(const char* field, const std::string& why) {
  throw ParameterError(std::string(field) + ": " + why);
}

// e^{-i |u|^p tau} u on the padded grid, back in the working modes.
SpectralField nonlinear_phase(const SpectralField& g, double p, double tau, std::size_t dealias) {
  return pointwise_product(g, dealias, [p, tau](Complex u) { return std::polar(1.0, -std::pow(std::norm(u), 0.5 * p) * tau); });
}

bool finite(const SpectralField& g) {
  return std::all_of(g.coeffs().begin(), g.coeffs().end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SnapshotDiagnostics diagnose(const RadialField& u, double p, std::size_t step) {
  auto abort = [step] {
    std::ostringstream msg;
    msg << "non-finite diagnostics at step " << step;
    return NumericalAbort(msg.str());
  };
  SnapshotDiagnostics d{};
  try {
    d = {mass(u), energy(u, p), boundary_mass_fraction(u)};
  } catch (const DataError&) {
    throw abort();
  }
  if (!std::isfinite(d.mass) || !std::isfinite(d.energy) || !std::isfinite(d.boundary_fraction)) throw abort();
  return d;
}

}  // namespace

std::size_t EvolutionConfig::minimum_dealias_factor(double p) {
  return std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil((p + 2.0) / 2.0)));
}

void EvolutionConfig::validate() const {
  if (!(p >= 4.0) || !std::isfinite(p)) bad_field("p", "nonlinearity exponent must be finite and >= 4");
  if (!(dt > 0.0) || !std::isfinite(dt)) bad_field("dt", "time step must be positive");
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
    bad_field("t_end", "horizon needs t_end > t_start");
  const double n = (t_end - t_start) / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) bad_field("dt", "must divide t_end - t_start");
  if (snapshot_stride < 1) bad_field("snapshot_stride", "must be >= 1");
  if (dealias_factor < minimum_dealias_factor(p)) {
    std::ostringstream msg;
    msg << "must be >= " << minimum_dealias_factor(p) << " for p = " << p;
    bad_field("dealias_factor", msg.str());
  }
  if (!(boundary_budget > 0.0 && boundary_budget < 1.0)) bad_field("boundary_budget", "must lie in (0, 1)");
}

std::size_t EvolutionConfig::steps() const {
  return static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
}

std::size_t Trajectory::index_of(double t) const {
  const double scale = std::max({1.0, std::abs(snapshots.front().time), std::abs(snapshots.back().time)});
  for (std::size_t k = 0; k < snapshots.size(); ++k)
    if (std::abs(snapshots[k].time - t) <= 1e-12 * scale) return k;
  std::ostringstream msg;
  msg << "time " << t << " is not a snapshot time";
  throw ParameterError(msg.str());
}

double mass(const RadialField& u) {
  const double n = norm(u, NormSpec::lp(2.0));
  return n * n;
}

double energy(const RadialField& u, double p) {
  const double gradient = norm(u, NormSpec::h1dot());
  const double potential = std::pow(norm(u, NormSpec::lp(p + 2.0)), p + 2.0);
  return 0.5 * gradient * gradient + potential / (p + 2.0);
}

SpectralField nonlinearity(const SpectralField& g, double p, std::size_t dealias_factor) {
  return pointwise_product(g, dealias_factor, [p](Complex u) { return Complex(std::pow(std::norm(u), 0.5 * p)); });
}

Trajectory evolve(const RadialField& u0, const EvolutionConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.config = cfg;
  const SnapshotDiagnostics initial = diagnose(u0, cfg.p, 0);
  if (initial.boundary_fraction > cfg.boundary_budget)
    throw ParameterError("initial data exceeds the boundary-mass budget");
  traj.snapshots.push_back({cfg.t_start, u0});
  traj.diagnostics.push_back(initial);

  const std::size_t steps = cfg.steps();
  const auto linear_phase = symbol_table(PropagatorPhase{cfg.dt}, u0.grid());
  SpectralField g = forward_transform(u0);
  for (std::size_t step = 1; step <= steps; ++step) {
    if (!cfg.linear) g = nonlinear_phase(g, cfg.p, 0.5 * cfg.dt, cfg.dealias_factor);
    g = g.multiplied(linear_phase);
    if (!cfg.linear) g = nonlinear_phase(g, cfg.p, 0.5 * cfg.dt, cfg.dealias_factor);
    if (!finite(g)) {
      std::ostringstream msg;
      msg << "non-finite solution at step " << step;
      throw NumericalAbort(msg.str());
    }
    if (step % cfg.snapshot_stride != 0 && step != steps) continue;
    RadialField u = inverse_transform(g);
    SnapshotDiagnostics d = diagnose(u, cfg.p, step);
    if (d.boundary_fraction > cfg.boundary_budget) {
      traj.truncated = true;
      break;
    }
    traj.snapshots.push_back({cfg.t_start + static_cast<double>(step) * cfg.dt, std::move(u)});
    traj.diagnostics.push_back(d);
  }
  return traj;
}

SpectralField free_profile(const Trajectory& traj, std::size_t k) {
  const Snapshot& snap = traj.snapshots.at(k);
  return propagate(forward_transform(snap.field), -snap.time);
}

double duhamel_residual(const Trajectory& traj, double t0, double t1, std::size_t n_quad) {
  if (n_quad < 8) throw ParameterError("n_quad must be >= 8");
  const std::size_t k0 = traj.index_of(t0);
  const std::size_t k1 = traj.index_of(t1);
  t0 = traj.snapshots[k0].time;
  t1 = traj.snapshots[k1].time;
  const std::size_t n = n_quad + (n_quad % 2);
  const std::size_t count = traj.snapshots.size();

  const SpectralField g1 = forward_transform(traj.snapshots[k1].field);
  SpectralField residual = g1 - propagate(forward_transform(traj.snapshots[k0].field), t1 - t0);
  const double scale = spectral_h1_norm(g1);

  if (!traj.config.linear && t1 != t0 && count >= 2) {
    std::vector<SpectralField> profiles;
    profiles.reserve(count);
    for (std::size_t k = 0; k < count; ++k) profiles.push_back(free_profile(traj, k));

    // Cubic Lagrange interpolation of the free profile through the four
    // snapshots nearest to s (fewer near short trajectories).
    auto interpolate = [&](double s) {
      const auto it = std::upper_bound(traj.snapshots.begin(), traj.snapshots.end(), s,
                                       [](double value, const Snapshot& snap) { return value < snap.time; });
      const std::size_t order = std::min<std::size_t>(4, count);
      std::size_t right = static_cast<std::size_t>(it - traj.snapshots.begin());
      std::size_t first = right >= 2 ? right - 2 : 0;
      first = std::min(first, count - order);
      SpectralField out = SpectralField::zero(traj.grid());
      for (std::size_t a = first; a < first + order; ++a) {
        double weight = 1.0;
        for (std::size_t b = first; b < first + order; ++b)
          if (b != a)
            weight *= (s - traj.snapshots[b].time) / (traj.snapshots[a].time - traj.snapshots[b].time);
        out += Complex(weight) * profiles[a];
      }
      return out;
    };

    const double ds = (t1 - t0) / static_cast<double>(n);
    SpectralField integral = SpectralField::zero(traj.grid());
    for (std::size_t q = 0; q <= n; ++q) {
      const double s = t0 + ds * static_cast<double>(q);
      const double w = (q == 0 || q == n) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      const SpectralField us = propagate(interpolate(s), s);
      const SpectralField term = propagate(nonlinearity(us, traj.config.p, traj.config.dealias_factor), t1 - s);
      integral += Complex(w * ds / 3.0) * term;
    }
    residual += Complex(0.0, 1.0) * integral;
  }
  if (scale == 0.0) return spectral_h1_norm(residual) == 0.0 ? 0.0 : kInfinity;
  return spectral_h1_norm(residual) / scale;
}

}  // namespace exball

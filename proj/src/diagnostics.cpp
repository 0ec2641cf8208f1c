#include "exball/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "exball/functional_calculus.hpp"
#include "exball/parallel.hpp"
#include "exball/propagator_kernels.hpp"

namespace exball {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_snapshots(const Trajectory& traj, std::size_t at_least) {
  if (traj.snapshots.size() < at_least) {
    std::ostringstream msg;
    msg << "trajectory needs at least " << at_least << " snapshots";
    throw ParameterError(msg.str());
  }
}

// 4 pi int_1^{upper} |u|^power r^weight dr
double radial_integral(const RadialField& u, double power, int weight, double upper) {
  const RadialGrid& grid = u.grid();
  std::vector<double> density(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    density[j] = std::pow(std::abs(u[j]), power) * std::pow(grid.node(j), weight);
  return kFourPi * integrate_to(grid, density, upper);
}

// Trapezoid rule over snapshot indices [first, last] of per-snapshot values.
double trapezoid(const Trajectory& traj, std::span<const double> values, std::size_t first, std::size_t last) {
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k)
    sum += 0.5 * (values[k] + values[k + 1]) * (traj.snapshots[k + 1].time - traj.snapshots[k].time);
  return sum;
}

std::vector<double> tenth_powers(std::span<const RadialField> fields) {
  std::vector<double> out(fields.size());
  parallel::for_each_index(fields.size(), [&](std::size_t k) { out[k] = std::pow(norm(fields[k], NormSpec::lp(10.0)), 10.0); });
  return out;
}

std::vector<RadialField> fields_of(const Trajectory& traj) {
  std::vector<RadialField> out;
  out.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) out.push_back(s.field);
  return out;
}

// Free evolution of snapshot `anchor` to every snapshot time.
std::vector<RadialField> free_flow_from(const Trajectory& traj, std::size_t anchor) {
  const SpectralField g = forward_transform(traj.snapshots[anchor].field);
  const double t0 = traj.snapshots[anchor].time;
  std::vector<RadialField> out(traj.snapshots.size(), RadialField::zero(traj.grid()));
  parallel::for_each_index(out.size(), [&](std::size_t k) {
    out[k] = inverse_transform(propagate(g, traj.snapshots[k].time - t0));
  });
  return out;
}

void csv_number(std::ostream& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  out << buf;
}

}  // namespace

void EtaConstants::validate() const {
  if (!(1.0 > eta0 && eta0 > eta1 && eta1 > eta2 && eta2 > eta3 && eta3 > 0.0))
    throw ParameterError("etas: need 1 > eta0 > eta1 > eta2 > eta3 > 0");
}

std::string to_string(IntervalClass c) {
  switch (c) {
    case IntervalClass::Exceptional:
      return "exceptional";
    case IntervalClass::Unexceptional:
      return "unexceptional";
    case IntervalClass::Unclassified:
      return "unclassified";
  }
  return "unclassified";
}

double CutoffSpec::operator()(double r) const { return profile::cutoff(r / R); }

double local_mass(const RadialField& u, double R) {
  if (!(R >= 1.0)) throw ParameterError("local mass radius R must be >= 1");
  const RadialGrid& grid = u.grid();
  const CutoffSpec cut{R};
  std::vector<double> density(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.node(j);
    const double w = cut(r);
    density[j] = std::norm(u[j]) * w * w;
  }
  return kFourPi * quadrature(grid, density, 2);
}

double mass_lipschitz_check(const Trajectory& traj, double R) {
  require_snapshots(traj, 2);
  const std::size_t n = traj.snapshots.size();
  std::vector<double> root(n);
  parallel::for_each_index(n, [&](std::size_t k) { root[k] = std::sqrt(local_mass(traj.snapshots[k].field, R)); });
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::max(best, R * std::abs(root[j] - root[i]) / (traj.snapshots[j].time - traj.snapshots[i].time));
  return best;
}

double gradient_sup(const Trajectory& traj) {
  double best = 0.0;
  for (const auto& s : traj.snapshots) best = std::max(best, norm(s.field, NormSpec::h1dot()));
  return std::sqrt(kFourPi) * best;
}

double morawetz_integral(const Trajectory& traj, double t_a, double t_b, double A) {
  if (!(A >= 1.0)) throw ParameterError("Morawetz scale A must be >= 1");
  const std::size_t first = traj.index_of(t_a), last = traj.index_of(t_b);
  if (last <= first) throw ParameterError("Morawetz window needs t_a < t_b");
  const double upper = A * std::sqrt(traj.snapshots[last].time - traj.snapshots[first].time);
  std::vector<double> values(traj.snapshots.size());
  parallel::for_each_index(last - first + 1, [&](std::size_t i) {
    values[first + i] = radial_integral(traj.snapshots[first + i].field, 6.0, 1, upper);
  });
  return trapezoid(traj, values, first, last);
}

double weighted_l6_integral(const Trajectory& traj) {
  require_snapshots(traj, 1);
  std::vector<double> values(traj.snapshots.size());
  parallel::for_each_index(values.size(), [&](std::size_t k) {
    values[k] = radial_integral(traj.snapshots[k].field, 6.0, 1, traj.grid().outer_radius());
  });
  return trapezoid(traj, values, 0, values.size() - 1);
}

double spacetime_norm(const Trajectory& traj, double q, double r, double t_a, double t_b) {
  if (!(t_a < t_b)) throw ParameterError("empty time window");
  const std::size_t first = traj.index_of(t_a), last = traj.index_of(t_b);
  std::span<const Snapshot> window(traj.snapshots.data() + first, last - first + 1);
  return norm(window, NormSpec::spacetime(q, r));
}

std::vector<IntervalRecord> partition_intervals(const Trajectory& traj, const EtaConstants& etas) {
  etas.validate();
  require_snapshots(traj, 2);
  const auto fields = fields_of(traj);
  const auto density = tenth_powers(fields);
  const std::size_t n = traj.snapshots.size();
  const double total = trapezoid(traj, density, 0, n - 1);
  const double low = std::pow(etas.eta0, 10.0), high = std::pow(2.0 * etas.eta0, 10.0);

  std::vector<IntervalRecord> records;
  if (total <= low) {
    IntervalRecord whole;
    whole.a = traj.snapshots.front().time;
    whole.b = traj.snapshots.back().time;
    whole.l10_norm = std::pow(total, 0.1);
    whole.first = 0;
    whole.last = n - 1;
    records.push_back(whole);
    return records;
  }
  std::size_t start = 0;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    acc += 0.5 * (density[k] + density[k + 1]) * (traj.snapshots[k + 1].time - traj.snapshots[k].time);
    if (acc <= low) continue;
    if (acc > high) {
      std::ostringstream msg;
      msg << "snapshots too coarse: window [" << traj.snapshots[start].time << ", " << traj.snapshots[k + 1].time
          << "] reaches L10 norm " << std::pow(acc, 0.1) << " > 2 eta0";
      throw ResolutionError(msg.str());
    }
    IntervalRecord rec;
    rec.a = traj.snapshots[start].time;
    rec.b = traj.snapshots[k + 1].time;
    rec.l10_norm = std::pow(acc, 0.1);
    rec.first = start;
    rec.last = k + 1;
    records.push_back(rec);
    start = k + 1;
    acc = 0.0;
  }
  if (start + 1 < n) {
    IntervalRecord rec;
    rec.a = traj.snapshots[start].time;
    rec.b = traj.snapshots.back().time;
    rec.l10_norm = std::pow(acc, 0.1);
    rec.first = start;
    rec.last = n - 1;
    rec.partial = true;
    records.push_back(rec);
  }
  return records;
}

Classification classify_intervals(const Trajectory& traj, std::span<const IntervalRecord> records,
                                  const EtaConstants& etas) {
  etas.validate();
  require_snapshots(traj, 2);
  Classification out;
  out.records.assign(records.begin(), records.end());
  const auto minus = tenth_powers(free_flow_from(traj, 0));
  const auto plus = tenth_powers(free_flow_from(traj, traj.snapshots.size() - 1));
  const double threshold = std::pow(etas.eta0, 10.0);
  for (auto& rec : out.records) {
    if (rec.last >= traj.snapshots.size() || rec.first >= rec.last)
      throw ParameterError("interval record does not match the trajectory");
    if (rec.classification == IntervalClass::Unclassified && !rec.partial && rec.first == 0 &&
        rec.last + 1 == traj.snapshots.size() && rec.l10_norm <= etas.eta0)
      continue;
    rec.minus_norm = std::pow(trapezoid(traj, minus, rec.first, rec.last), 0.1);
    rec.plus_norm = std::pow(trapezoid(traj, plus, rec.first, rec.last), 0.1);
    const bool exceptional = rec.minus_norm > threshold || rec.plus_norm > threshold;
    rec.classification = exceptional ? IntervalClass::Exceptional : IntervalClass::Unexceptional;
    if (exceptional) {
      ++out.exceptional;
    } else {
      ++out.unexceptional;
      if (!rec.partial)
        out.min_unexceptional_length = std::min(out.min_unexceptional_length.value_or(kInfinity), rec.length());
    }
  }
  return out;
}

double mass_concentration_check(const Trajectory& traj, const IntervalRecord& record, const EtaConstants& etas) {
  etas.validate();
  if (record.classification != IntervalClass::Unexceptional)
    throw ParameterError("mass concentration needs an unexceptional interval");
  const double length = record.length();
  const double upper = std::sqrt(length) / etas.eta3;
  double best = kInfinity;
  for (std::size_t k = record.first; k <= record.last; ++k)
    best = std::min(best, radial_integral(traj.snapshots.at(k).field, 2.0, 2, upper) / length);
  return best;
}

double contiguous_sum_check(std::span<const IntervalRecord> records) {
  if (records.empty()) throw ParameterError("no records");
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].classification != IntervalClass::Unexceptional)
      throw ParameterError("contiguous sum needs unexceptional records");
    if (i > 0 && records[i].a != records[i - 1].b) throw ParameterError("records are not contiguous");
    sum += std::sqrt(records[i].length());
  }
  return sum / std::sqrt(records.back().b - records.front().a);
}

double cauchy_defect(const Trajectory& traj, double t_from, double t_to) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    if (traj.snapshots[k].time >= t_from && traj.snapshots[k].time <= t_to) idx.push_back(k);
  if (idx.size() < 2) throw ParameterError("Cauchy window needs at least two snapshots");
  std::vector<SpectralField> v;
  v.reserve(idx.size());
  for (std::size_t k : idx) v.push_back(free_profile(traj, k));
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, spectral_h1_norm(v[i] - v[j]));
  return best;
}

ScatteringProfile scattering_profile(const Trajectory& traj, Direction direction, std::size_t window) {
  if (window < 4) throw ParameterError("scattering window needs at least 4 snapshots");
  if (traj.truncated) {
    std::ostringstream msg;
    msg << "boundary budget violated; last trusted time " << traj.last_time();
    throw NumericalAbort(msg.str());
  }
  require_snapshots(traj, window);
  const std::size_t n = traj.snapshots.size();
  const std::size_t first = direction == Direction::Forward ? n - window : 0;
  const std::size_t last = first + window - 1;
  std::vector<double> times;
  for (std::size_t k = first; k <= last; ++k) times.push_back(traj.snapshots[k].time);
  const double defect = cauchy_defect(traj, times.front(), times.back());
  const std::size_t anchor = direction == Direction::Forward ? last : first;
  return {free_profile(traj, anchor), defect, std::move(times)};
}

void write_diagnostics_csv(std::ostream& out, const Trajectory& traj, std::span<const double> radii) {
  out << "t,mass,energy,boundary_mass";
  for (double R : radii) {
    out << ",M_R=";
    csv_number(out, R);
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& u = traj.snapshots[k].field;
    const SnapshotDiagnostics d = k < traj.diagnostics.size()
                                      ? traj.diagnostics[k]
                                      : SnapshotDiagnostics{mass(u), energy(u, traj.config.p), boundary_mass_fraction(u)};
    csv_number(out, traj.snapshots[k].time);
    for (double x : {d.mass, d.energy, d.boundary_fraction}) {
      out << ',';
      csv_number(out, x);
    }
    for (double R : radii) {
      out << ',';
      csv_number(out, local_mass(u, R));
    }
    out << '\n';
  }
}

void write_intervals_csv(std::ostream& out, std::span<const IntervalRecord> records) {
  out << "a,b,l10,class,length,partial\n";
  for (const auto& r : records) {
    csv_number(out, r.a);
    out << ',';
    csv_number(out, r.b);
    out << ',';
    csv_number(out, r.l10_norm);
    out << ',' << to_string(r.classification) << ',';
    csv_number(out, r.length());
    out << ',' << (r.partial ? 1 : 0) << '\n';
  }
}

}  // namespace exball

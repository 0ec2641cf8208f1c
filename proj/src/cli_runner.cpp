#include "exball/cli_runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "exball/diagnostics.hpp"
#include "exball/functional_calculus.hpp"
#include "exball/nls_solver.hpp"
#include "exball/propagator_kernels.hpp"
#include "exball/run_config.hpp"
#include "json.hpp"

namespace exball::cli {

namespace {

namespace fs = std::filesystem;

class Reporter {
 public:
  Reporter(std::ostream& out, bool quiet) : out_(out), quiet_(quiet) {}

  void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) ++failures_;
    if (!ok || !quiet_) out_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
  }
  void info(const std::string& line) {
    if (!quiet_) out_ << "INFO " << line << '\n';
  }
  int exit_code() const { return failures_ == 0 ? kOk : kFailure; }

 private:
  std::ostream& out_;
  bool quiet_;
  int failures_ = 0;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

RadialField shifted_gaussian(const RadialGrid& grid, double center, double width) {
  return RadialField::sample(grid, [=](double r) {
    const double x = (r - center) / width;
    return (r - 1.0) * std::exp(-x * x) / r;
  });
}

RadialField random_band_limited(const RadialGrid& grid, std::mt19937_64& rng, std::size_t modes) {
  std::normal_distribution<double> normal;
  std::vector<Complex> coeffs(grid.intervals() - 1);
  for (std::size_t k = 0; k < modes; ++k) coeffs[k] = {normal(rng), normal(rng)};
  return inverse_transform(SpectralField(grid, std::move(coeffs)));
}

double relative_l2(const RadialField& a, const RadialField& reference) {
  return norm(a - reference, NormSpec::lp(2.0)) / norm(reference, NormSpec::lp(2.0));
}

void suite_transform(Reporter& rep) {
  const RadialGrid grid(32.0, 4096);
  std::mt19937_64 rng(20240601);
  double defect = 0.0, roundtrip = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const RadialField f = random_band_limited(grid, rng, 400);
    defect = std::max(defect, plancherel_defect(f));
    const RadialField back = inverse_transform(forward_transform(f));
    double err = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      err = std::max(err, std::abs(back[j] - f[j]));
      peak = std::max(peak, std::abs(f[j]));
    }
    roundtrip = std::max(roundtrip, err / peak);
  }
  rep.check(defect < 1e-10, "plancherel", fmt("max defect %.3e over 10 band-limited fields", defect));
  rep.check(roundtrip < 1e-12, "round_trip", fmt("max pointwise error %.3e relative to sup norm", roundtrip));

  const std::size_t k = 37;
  const double lam = frequency(grid, k);
  const RadialField mode = RadialField::sample(grid, [lam](double r) { return std::sin(lam * (r - 1.0)) / r; });
  const SpectralField g = forward_transform(mode);
  double off = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (i + 1 != k) off = std::max(off, std::abs(g[i]));
  rep.check(off < 1e-10 * std::abs(g[k - 1]), "mode_leakage", fmt("off-bin / on-bin %.3e", off / std::abs(g[k - 1])));

  const RadialField gauss = shifted_gaussian(grid, 1.0, 1.0);
  const SpectralField gg = forward_transform(gauss);
  double worst = 0.0;
  for (std::size_t i = 0; i < gg.size(); ++i) {
    const double l = gg.frequency_at(i);
    const double exact = std::sqrt(2.0) / 4.0 * l * std::exp(-l * l / 4.0);
    worst = std::max(worst, std::abs(gg[i] - exact));
  }
  const std::size_t bin = static_cast<std::size_t>(std::lround(2.0 * grid.extent() / std::numbers::pi));
  rep.check(worst < 1e-10, "gaussian_closed_form",
            fmt("max |g - (sqrt2/4) l e^{-l^2/4}| = %.3e; g(%.4f) = %.6f", worst, frequency(grid, bin),
                gg[bin - 1].real()));
}

void suite_kernels(Reporter& rep) {
  const RadialGrid grid(32.0, 4096);
  const RadialField f = shifted_gaussian(grid, 4.0, 1.0);

  double asym = 0.0, edge = 0.0;
  for (double N : {0.25, 1.0, 4.0, 16.0})
    for (double r : {1.0, 1.3, 2.0, 7.5})
      for (double s : {1.0, 1.1, 2.5, 9.0}) {
        asym = std::max(asym, std::abs(lp_kernel(N, r, s) - lp_kernel(N, s, r)));
        if (s == 1.0) edge = std::max(edge, std::abs(lp_kernel(N, r, s)));
      }
  rep.check(asym == 0.0 && edge == 0.0, "projector_kernel_structure",
            fmt("max asymmetry %.3e, max |K_N(r,1)| %.3e", asym, edge));

  const double cross = lp_kernel_crosscheck(2.0, f);
  rep.check(cross < 1e-4, "projector_kernel_vs_spectral", fmt("N = 2 relative L2 difference %.3e", cross));

  double kmin = kInfinity;
  for (int i = 1; i <= 60; ++i)
    for (int j = 1; j <= 60; ++j) {
      const double r = 1.0 + 0.05 * i * i / 3.6, s = 1.0 + 0.05 * j * j / 3.6;
      kmin = std::min(kmin, riesz_kernel(RieszKernel::Kdiff, r, s));
    }
  rep.check(kmin > 0.0, "kdiff_positive", fmt("min Kdiff over scan %.3e", kmin));

  const RadialField u0 = shifted_gaussian(grid, 1.0, 1.0);
  const double prop = relative_l2(propagate_via_kernel(u0, 1.0), propagate(u0, 1.0));
  rep.check(prop < 1e-4, "propagator_kernel_vs_spectral", fmt("t = 1 relative L2 difference %.3e", prop));

  const auto kernel = half_laplacian(f, HalfLaplacianRoute::Kernel);
  const double routes = relative_l2(kernel.value, half_laplacian(f, HalfLaplacianRoute::Spectral).value);
  rep.check(routes < 1e-3 && !kernel.accuracy_warning, "half_laplacian_routes",
            fmt("relative L2 difference %.3e", routes));
}

void suite_bernstein(Reporter& rep) {
  const RadialGrid grid(64.0, 65536);
  const RadialField bump = RadialField::sample(grid, [](double r) {
    const double x = (r - 1.02) / 0.004;
    return (r - 1.0) * std::exp(-x * x);
  });
  const std::vector<double> scales{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> ratios;
  for (double N : scales) ratios.push_back(bernstein_ratio(1.0, kInfinity, N, bump));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double x = std::log(scales[i]), y = std::log(ratios[i] * std::pow(scales[i], 3.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(scales.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  rep.check(worst < 1.0, "bernstein_1_inf_bound", fmt("max ||P_N f||_inf / (N^3 ||f||_1) = %.4e", worst));
  rep.info(fmt("log-log slope of ||P_N f||_inf over N in {1..16}: %.3f", slope));

  const RadialGrid smooth_grid(32.0, 4096);
  std::mt19937_64 rng(7);
  double l2max = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const RadialField f = random_band_limited(smooth_grid, rng, 800);
    for (double N : {0.25, 1.0, 4.0, 16.0, 64.0}) l2max = std::max(l2max, bernstein_ratio(2.0, 2.0, N, f));
  }
  rep.check(l2max <= 1.0 + 1e-12, "projector_l2_contraction", fmt("max ||P_<=N f||_2 / ||f||_2 = %.15f", l2max));

  const RadialField narrow = shifted_gaussian(smooth_grid, 4.0, 0.1);
  double lo = kInfinity, hi = 0.0;
  for (double N = 1.0; N <= 16.0; N += 1.0) {
    const double q = bernstein_band_ratio(1.0, 2.0, N, narrow);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  rep.check(lo >= 0.5 && hi <= 2.0, "band_derivative_equivalence",
            fmt("sigma = 1, p = 2 ratio in [%.6f, %.6f]", lo, hi));
}

void suite_sobolev(Reporter& rep) {
  const RadialGrid grid(32.0, 8192);
  double dev = 0.0, lo = kInfinity, hi = 0.0;
  for (double center : {3.0, 4.0, 6.0})
    for (double width : {0.5, 1.0, 2.0}) {
      const RadialField f = shifted_gaussian(grid, center, width);
      dev = std::max(dev, std::abs(sobolev_ratio(f, 2.0) - 1.0));
      for (double p : {1.5, 2.5}) {
        const double q = sobolev_ratio(f, p);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
    }
  rep.check(dev < 1e-8, "sobolev_p2_isometry", fmt("max |ratio - 1| = %.3e", dev));
  rep.check(lo >= 0.2 && hi <= 5.0, "sobolev_p_1.5_2.5_bounded", fmt("ratios in [%.4f, %.4f]", lo, hi));

  const RadialGrid wide(128.0, 8192);
  std::vector<double> quotients;
  std::string listing;
  for (double lam : {1.0, 0.5, 0.25, 0.125}) {
    quotients.push_back(sobolev_quotient(low_frequency_family(wide, lam), 4.0));
    listing += fmt(" %.4f", quotients.back());
  }
  const bool decreasing = std::is_sorted(quotients.rbegin(), quotients.rend()) &&
                          std::adjacent_find(quotients.begin(), quotients.end()) == quotients.end();
  rep.check(decreasing, "sobolev_p4_counterexample", "ratio at lambda = 1, 1/2, 1/4, 1/8:" + listing);
}

void suite_dispersive(Reporter& rep, const Options& opts) {
  const DispersiveScan scan = default_dispersive_scan();
  rep.check(scan.sup <= kDispersiveConstant + 1e-12 && scan.sup >= 0.85 * kDispersiveConstant, "dispersive_sup",
            fmt("max |t|^{3/2}|K| = %.6f at t = %.0e, r = s = %.0f; constant 1/(2 sqrt(pi)) = %.6f", scan.sup,
                scan.argmax.t, scan.argmax.r, kDispersiveConstant));
  if (!opts.out.empty()) {
    fs::create_directories(opts.out);
    std::ofstream csv(opts.out / "dispersive_scan.csv");
    write_kernel_csv(csv, scan.points);
    rep.info("wrote " + (opts.out / "dispersive_scan.csv").string());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("failed to write " + path.string());
}

RunConfig run_config_for(const fs::path& run_dir, const Trajectory& traj) {
  if (fs::exists(run_dir / "config.json")) return load_run_config(run_dir / "config.json");
  RunConfig cfg;
  cfg.extent = traj.grid().extent();
  cfg.intervals = traj.grid().intervals();
  cfg.evolution = traj.config;
  return cfg;
}

int analyze_intervals(const fs::path& dir, const Trajectory& traj, const RunConfig& cfg, std::ostream& out) {
  const auto records = partition_intervals(traj, cfg.etas);
  const Classification cls = classify_intervals(traj, records, cfg.etas);
  std::ofstream csv(dir / "intervals.csv");
  write_intervals_csv(csv, cls.records);
  out << "intervals " << cls.records.size() << " exceptional " << cls.exceptional << " unexceptional "
      << cls.unexceptional << '\n';
  if (cls.min_unexceptional_length)
    out << fmt("min unexceptional length %.6e (eta1 = %.3e)\n", *cls.min_unexceptional_length, cfg.etas.eta1);
  else
    out << "no complete unexceptional interval\n";
  nlohmann::ordered_json report = {{"intervals", cls.records.size()},
                                   {"exceptional", cls.exceptional},
                                   {"unexceptional", cls.unexceptional},
                                   {"eta1", cfg.etas.eta1}};
  if (cls.min_unexceptional_length) report["min_unexceptional_length"] = *cls.min_unexceptional_length;
  write_text(dir / "report_intervals.json", report.dump(2) + "\n");
  return kOk;
}

int analyze_morawetz(const fs::path& dir, const Trajectory& traj, const RunConfig& cfg, std::ostream& out) {
  auto windows = cfg.diagnostics.morawetz_windows;
  if (windows.empty()) windows.push_back({traj.snapshots.front().time, traj.last_time()});
  std::ofstream csv(dir / "morawetz.csv");
  csv << "t_a,t_b,A,value,ratio\n";
  for (const auto& w : windows)
    for (double A : cfg.diagnostics.morawetz_scales) {
      const double value = morawetz_integral(traj, w[0], w[1], A);
      const double ratio = value / (A * std::sqrt(w[1] - w[0]));
      csv << fmt("%.16e,%.16e,%.16e,%.16e,%.16e\n", w[0], w[1], A, value, ratio);
      out << fmt("window [%g, %g] A = %g: integral %.6e, ratio %.6e\n", w[0], w[1], A, value, ratio);
    }
  return kOk;
}

int analyze_scatter(const fs::path& dir, const Trajectory& traj, std::ostream& out) {
  const ScatteringProfile prof = scattering_profile(traj, Direction::Forward);
  Trajectory single;
  single.config = traj.config;
  single.snapshots.push_back({prof.times.back(), inverse_transform(prof.profile)});
  save_trajectory(single, dir / "v_plus");
  std::ofstream csv(dir / "cauchy_defect.csv");
  csv << "t_from,t_to,defect\n";
  const std::size_t n = traj.snapshots.size();
  const std::size_t blocks = std::min<std::size_t>(4, n / 2);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double from = traj.snapshots[b * n / blocks].time;
    const double to = traj.snapshots[(b + 1) * n / blocks - 1].time;
    const double d = cauchy_defect(traj, from, to);
    csv << fmt("%.16e,%.16e,%.16e\n", from, to, d);
    out << fmt("Cauchy defect over [%g, %g]: %.6e\n", from, to, d);
  }
  out << fmt("final-window defect %.6e; profile written to %s\n", prof.defect, (dir / "v_plus").c_str());
  return kOk;
}

}  // namespace

unsigned resolve_thread_count(int flag_value) {
  if (flag_value > 0) return static_cast<unsigned>(flag_value);
  if (const char* env = std::getenv("EXBALL_NLS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 0;
}

int cmd_check(const std::string& suite, const Options& opts, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, int> suites{
      {"transform", 0}, {"kernels", 1}, {"bernstein", 2}, {"sobolev", 3}, {"dispersive", 4}};
  const auto it = suites.find(suite);
  if (it == suites.end()) {
    err << "unknown suite '" << suite << "'\nusage: exball-nls check <transform|kernels|bernstein|sobolev|dispersive>\n";
    return kConfigError;
  }
  Reporter rep(out, opts.quiet);
  try {
    switch (it->second) {
      case 0:
        suite_transform(rep);
        break;
      case 1:
        suite_kernels(rep);
        break;
      case 2:
        suite_bernstein(rep);
        break;
      case 3:
        suite_sobolev(rep);
        break;
      case 4:
        suite_dispersive(rep, opts);
        break;
    }
  } catch (const Error& e) {
    err << "check " << suite << " failed: " << e.what() << '\n';
    return kFailure;
  }
  return rep.exit_code();
}

int cmd_evolve(const fs::path& config_path, const Options& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  RadialField u0 = RadialField::zero(RadialGrid(64.0, 16));
  try {
    cfg = load_run_config(config_path);
    if (!opts.out.empty()) cfg.output_dir = opts.out;
    u0 = make_initial_condition(cfg.grid(), cfg.initial, cfg.seed);
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "config error: initial_condition: " << e.what() << '\n';
    return kConfigError;
  }

  Trajectory traj;
  try {
    traj = evolve(u0, cfg.evolution);
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  }

  const fs::path dir = cfg.output_dir;
  try {
    save_trajectory(traj, dir);
    write_text(dir / "config.json", dump_run_config(cfg));
    std::ofstream csv(dir / "diagnostics.csv");
    write_diagnostics_csv(csv, traj, cfg.diagnostics.radii);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return kFailure;
  }

  const auto& d0 = traj.diagnostics.front();
  double mass_drift = 0.0, energy_drift = 0.0;
  for (const auto& d : traj.diagnostics) {
    mass_drift = std::max(mass_drift, d0.mass > 0 ? std::abs(d.mass - d0.mass) / d0.mass : 0.0);
    energy_drift = std::max(energy_drift, d0.energy > 0 ? std::abs(d.energy - d0.energy) / d0.energy : 0.0);
  }
  if (!opts.quiet) {
    out << fmt("snapshots %zu, final time %g, written to %s\n", traj.snapshots.size(), traj.last_time(), dir.c_str());
    out << fmt("mass drift %.3e\nenergy drift %.3e\n", mass_drift, energy_drift);
  }
  if (traj.truncated) {
    err << fmt("numerical abort: boundary-mass budget exceeded after t = %g\n", traj.last_time());
    return kNumericalAbort;
  }
  return kOk;
}

int cmd_analyze(const fs::path& run_dir, const std::string& analysis, const Options& opts, std::ostream& out,
                std::ostream& err) {
  if (analysis != "intervals" && analysis != "morawetz" && analysis != "scatter") {
    err << "unknown analysis '" << analysis << "'\nusage: exball-nls analyze <run_dir> <intervals|morawetz|scatter>\n";
    return kConfigError;
  }
  Trajectory traj;
  RunConfig cfg;
  try {
    traj = load_trajectory(run_dir);
    cfg = run_config_for(run_dir, traj);
  } catch (const IntegrityError& e) {
    err << "integrity error: " << e.what() << '\n';
    return kIntegrityError;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const fs::path dir = opts.out.empty() ? run_dir : opts.out;
  std::ostringstream sink;
  std::ostream& report = opts.quiet ? static_cast<std::ostream&>(sink) : out;
  try {
    fs::create_directories(dir);
    if (analysis == "intervals") return analyze_intervals(dir, traj, cfg, report);
    if (analysis == "morawetz") return analyze_morawetz(dir, traj, cfg, report);
    return analyze_scatter(dir, traj, report);
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const ParameterError& e) {
    err << "analysis error: " << e.what() << '\n';
    return kFailure;
  } catch (const ResolutionError& e) {
    err << "analysis error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace exball::cli

#include "exball/run_config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace exball {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& object, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!object.is_object()) throw ParameterError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : object.items())
    if (!keys.contains(key)) throw ParameterError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& object, const char* key, const std::string& where, T& target) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParameterError(where + "." + key + ": wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  try {
    (void)grid();
  } catch (const ParameterError& e) {
    throw ParameterError(std::string("grid: ") + e.what());
  }
  evolution.validate();
  etas.validate();
  for (double R : diagnostics.radii)
    if (!(R >= 1.0)) throw ParameterError("diagnostics.R: radii must be >= 1");
  for (double A : diagnostics.morawetz_scales)
    if (!(A >= 1.0)) throw ParameterError("diagnostics.A: scales must be >= 1");
  for (const auto& w : diagnostics.morawetz_windows)
    if (!(w[0] >= evolution.t_start && w[0] < w[1] && w[1] <= evolution.t_end))
      throw ParameterError("diagnostics.morawetz_windows: windows must lie inside the run");
  static const std::set<std::string> families{"gaussian", "bump", "sine_mode", "random"};
  if (!families.contains(initial.family))
    throw ParameterError("initial_condition.family: unknown family '" + initial.family + "'");
  if (!std::isfinite(initial.amplitude)) throw ParameterError("initial_condition.amplitude: must be finite");
  if (!(initial.width > 0.0)) throw ParameterError("initial_condition.width: must be positive");
  if (initial.mode < 1 || initial.mode + 1 > intervals) throw ParameterError("initial_condition.mode: out of range");
  if (initial.modes < 1 || initial.modes + 1 > intervals) throw ParameterError("initial_condition.modes: out of range");
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "config",
                 {"spec_version", "grid", "evolution", "etas", "initial_condition", "diagnostics", "output_dir", "seed"});
  RunConfig cfg;
  int version = kConfigVersion;
  read(doc, "spec_version", "config", version);
  if (version != kConfigVersion) throw ParameterError("spec_version: unsupported version");
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    reject_unknown(g, "grid", {"L", "M"});
    read(g, "L", "grid", cfg.extent);
    read(g, "M", "grid", cfg.intervals);
  }
  if (doc.contains("evolution")) {
    const json& e = doc["evolution"];
    reject_unknown(e, "evolution",
                   {"p", "dt", "t_start", "t_end", "snapshot_stride", "dealias_factor", "linear", "boundary_budget"});
    auto& ev = cfg.evolution;
    read(e, "p", "evolution", ev.p);
    read(e, "dt", "evolution", ev.dt);
    read(e, "t_start", "evolution", ev.t_start);
    read(e, "t_end", "evolution", ev.t_end);
    read(e, "snapshot_stride", "evolution", ev.snapshot_stride);
    if (!e.contains("dealias_factor")) ev.dealias_factor = EvolutionConfig::minimum_dealias_factor(ev.p);
    read(e, "dealias_factor", "evolution", ev.dealias_factor);
    read(e, "linear", "evolution", ev.linear);
    read(e, "boundary_budget", "evolution", ev.boundary_budget);
  }
  if (doc.contains("etas")) {
    const json& e = doc["etas"];
    reject_unknown(e, "etas", {"eta0", "eta1", "eta2", "eta3"});
    read(e, "eta0", "etas", cfg.etas.eta0);
    read(e, "eta1", "etas", cfg.etas.eta1);
    read(e, "eta2", "etas", cfg.etas.eta2);
    read(e, "eta3", "etas", cfg.etas.eta3);
  }
  if (doc.contains("initial_condition")) {
    const json& ic = doc["initial_condition"];
    reject_unknown(ic, "initial_condition", {"family", "amplitude", "center", "width", "mode", "modes"});
    read(ic, "family", "initial_condition", cfg.initial.family);
    read(ic, "amplitude", "initial_condition", cfg.initial.amplitude);
    read(ic, "center", "initial_condition", cfg.initial.center);
    read(ic, "width", "initial_condition", cfg.initial.width);
    read(ic, "mode", "initial_condition", cfg.initial.mode);
    read(ic, "modes", "initial_condition", cfg.initial.modes);
  }
  if (doc.contains("diagnostics")) {
    const json& d = doc["diagnostics"];
    reject_unknown(d, "diagnostics", {"R", "A", "morawetz_windows"});
    read(d, "R", "diagnostics", cfg.diagnostics.radii);
    read(d, "A", "diagnostics", cfg.diagnostics.morawetz_scales);
    read(d, "morawetz_windows", "diagnostics", cfg.diagnostics.morawetz_windows);
  }
  std::string out = cfg.output_dir.string();
  read(doc, "output_dir", "config", out);
  cfg.output_dir = out;
  read(doc, "seed", "config", cfg.seed);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string dump_run_config(const RunConfig& cfg) {
  const auto& ev = cfg.evolution;
  ordered_json doc;
  doc["spec_version"] = kConfigVersion;
  doc["grid"] = {{"L", cfg.extent}, {"M", cfg.intervals}};
  doc["evolution"] = {{"p", ev.p},
                      {"dt", ev.dt},
                      {"t_start", ev.t_start},
                      {"t_end", ev.t_end},
                      {"snapshot_stride", ev.snapshot_stride},
                      {"dealias_factor", ev.dealias_factor},
                      {"linear", ev.linear},
                      {"boundary_budget", ev.boundary_budget}};
  doc["etas"] = {{"eta0", cfg.etas.eta0}, {"eta1", cfg.etas.eta1}, {"eta2", cfg.etas.eta2}, {"eta3", cfg.etas.eta3}};
  doc["initial_condition"] = {{"family", cfg.initial.family}, {"amplitude", cfg.initial.amplitude},
                              {"center", cfg.initial.center}, {"width", cfg.initial.width},
                              {"mode", cfg.initial.mode},     {"modes", cfg.initial.modes}};
  doc["diagnostics"] = {{"R", cfg.diagnostics.radii},
                        {"A", cfg.diagnostics.morawetz_scales},
                        {"morawetz_windows", cfg.diagnostics.morawetz_windows}};
  doc["output_dir"] = cfg.output_dir.string();
  doc["seed"] = cfg.seed;
  return doc.dump(2) + "\n";
}

RadialField make_initial_condition(const RadialGrid& grid, const InitialCondition& ic, std::uint64_t seed) {
  const double a = ic.amplitude, c = ic.center, w = ic.width;
  if (ic.family == "gaussian")
    return RadialField::sample(grid, [=](double r) {
      const double x = (r - c) / w;
      return a * (r - 1.0) * std::exp(-x * x) / r;
    });
  if (ic.family == "bump")
    return RadialField::sample(grid, [=](double r) {
      const double x = (r - c) / w;
      return a * std::exp(-x * x);
    });
  if (ic.family == "sine_mode") {
    const double lam = frequency(grid, ic.mode);
    return RadialField::sample(grid, [=](double r) { return a * std::sin(lam * (r - 1.0)) / r; });
  }
  if (ic.family == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Complex> coeffs(grid.intervals() - 1);
    for (std::size_t k = 0; k < ic.modes && k < coeffs.size(); ++k) coeffs[k] = {unit(rng), unit(rng)};
    SpectralField g(grid, std::move(coeffs));
    const double n = spectral_l2_norm(g);
    if (n > 0.0) g *= Complex(a / n);
    return inverse_transform(g);
  }
  throw ParameterError("initial_condition.family: unknown family '" + ic.family + "'");
}

}  // namespace exball

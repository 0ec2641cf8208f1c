#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "exball/nls_solver.hpp"
#include "json.hpp"

namespace exball {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kFormatVersion = 1;

std::vector<unsigned char> encode(const RadialField& f) {
  std::vector<unsigned char> bytes;
  bytes.reserve(f.size() * 16);
  auto put = [&](double x) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  };
  for (const auto& v : f.values()) {
    put(v.real());
    put(v.imag());
  }
  return bytes;
}

std::vector<Complex> decode(const std::vector<unsigned char>& bytes) {
  auto get = [&](std::size_t offset) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[offset + b]) << (8 * b);
    return std::bit_cast<double>(bits);
  };
  std::vector<Complex> values(bytes.size() / 16);
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = {get(16 * j), get(16 * j + 8)};
  return values;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("missing snapshot file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ordered_json config_json(const EvolutionConfig& c) {
  return {{"p", c.p},
          {"dt", c.dt},
          {"t_start", c.t_start},
          {"t_end", c.t_end},
          {"snapshot_stride", c.snapshot_stride},
          {"dealias_factor", c.dealias_factor},
          {"linear", c.linear},
          {"boundary_budget", c.boundary_budget}};
}

EvolutionConfig config_from(const ordered_json& j) {
  EvolutionConfig c;
  c.p = j.at("p").get<double>();
  c.dt = j.at("dt").get<double>();
  c.t_start = j.at("t_start").get<double>();
  c.t_end = j.at("t_end").get<double>();
  c.snapshot_stride = j.at("snapshot_stride").get<std::size_t>();
  c.dealias_factor = j.at("dealias_factor").get<std::size_t>();
  c.linear = j.at("linear").get<bool>();
  c.boundary_budget = j.at("boundary_budget").get<double>();
  return c;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

void save_trajectory(const Trajectory& traj, const fs::path& dir) {
  if (traj.snapshots.empty()) throw ParameterError("cannot save an empty trajectory");
  fs::create_directories(dir);
  const RadialGrid& grid = traj.grid();
  ordered_json manifest;
  manifest["spec_version"] = kFormatVersion;
  manifest["hash"] = "fnv1a64";
  manifest["grid"] = {{"L", grid.extent()}, {"M", grid.intervals()}};
  manifest["config"] = config_json(traj.config);
  manifest["truncated"] = traj.truncated;
  ordered_json snaps = ordered_json::array();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%06zu.bin", k);
    const auto bytes = encode(traj.snapshots[k].field);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed to write " + (dir / name).string());
    ordered_json entry = {{"time", traj.snapshots[k].time}, {"file", name}, {"hash", hex64(fnv1a64(bytes))}};
    if (k < traj.diagnostics.size()) {
      const auto& d = traj.diagnostics[k];
      entry["mass"] = d.mass;
      entry["energy"] = d.energy;
      entry["boundary_fraction"] = d.boundary_fraction;
    }
    snaps.push_back(std::move(entry));
  }
  manifest["snapshots"] = std::move(snaps);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("failed to write manifest in " + dir.string());
}

Trajectory load_trajectory(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IntegrityError("missing manifest.json in " + dir.string());
  Trajectory traj;
  try {
    const ordered_json manifest = ordered_json::parse(in);
    if (manifest.at("spec_version").get<int>() != kFormatVersion) throw IntegrityError("unsupported manifest version");
    const RadialGrid grid(manifest.at("grid").at("L").get<double>(), manifest.at("grid").at("M").get<std::size_t>());
    traj.config = config_from(manifest.at("config"));
    traj.truncated = manifest.at("truncated").get<bool>();
    for (const auto& entry : manifest.at("snapshots")) {
      const std::string file = entry.at("file").get<std::string>();
      const auto bytes = read_bytes(dir / file);
      if (hex64(fnv1a64(bytes)) != entry.at("hash").get<std::string>())
        throw IntegrityError("hash mismatch for " + file);
      if (bytes.size() != 16 * grid.size()) throw IntegrityError("wrong length for " + file);
      traj.snapshots.push_back({entry.at("time").get<double>(), RadialField(grid, decode(bytes))});
      if (entry.contains("mass"))
        traj.diagnostics.push_back({entry.at("mass").get<double>(), entry.at("energy").get<double>(),
                                    entry.at("boundary_fraction").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("malformed manifest: ") + e.what());
  } catch (const DataError& e) {
    throw IntegrityError(std::string("invalid snapshot data: ") + e.what());
  }
  if (traj.snapshots.empty()) throw IntegrityError("manifest lists no snapshots");
  return traj;
}

}  // namespace exball

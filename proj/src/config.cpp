#include "nvholo/config.hpp"

#include "nvholo/dynamics.hpp"
#include "nvholo/holonomy.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nvholo {

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

nlohmann::json grid_json(const Grid& g) { return {{"min", g.min}, {"max", g.max}, {"step", g.step}}; }

void read_grid(const nlohmann::json& j, const char* key, Grid& g) {
  if (!j.contains(key)) return;
  const auto& o = j.at(key);
  read(o, "min", g.min);
  read(o, "max", g.max);
  read(o, "step", g.step);
}

}  // namespace

std::vector<double> Grid::points() const {
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((max - min) / step + 1e-6));
  for (long k = 0; k <= n; ++k) out.push_back(min + step * static_cast<double>(k));
  return out;
}

void Grid::validate(const char* what) const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(step > 0.0) || max < min)
    throw std::invalid_argument(std::string(what) + ": grid needs finite min <= max and step > 0");
}

void ExperimentConfig::validate() const {
  env.validate();
  if (!(omega_mhz > 0.0)) throw std::invalid_argument("omega_mhz must be positive");
  if (!(rabi.cycle_ns > 0.0) || !(rabi.t_max_ns > 0.0) || !(rabi.sample_ns > 0.0))
    throw std::invalid_argument("rabi times must be positive");
  if (!(qpt.cycle_ns > 0.0) || qpt.gates.empty() || qpt.shots < 1 || qpt.bootstrap < 0)
    throw std::invalid_argument("qpt settings invalid");
  fidelity_map.detuning_mhz.validate("fidelity_map.detuning_mhz");
  fidelity_map.pulse_ns.validate("fidelity_map.pulse_ns");
  if (fidelity_map.raman_min_turns < 1 || fidelity_map.raman_max_turns < fidelity_map.raman_min_turns)
    throw std::invalid_argument("raman turn range invalid");
  tolerance.relative_error.validate("tolerance.relative_error");
  if (tolerance.angles_rad.empty()) throw std::invalid_argument("tolerance needs at least one angle");
  if (energy_tolerance.gates.empty() || energy_tolerance.targets.empty() || energy_tolerance.steps < 2)
    throw std::invalid_argument("energy tolerance settings invalid");
  for (const auto& t : energy_tolerance.targets) shift_target_from_string(t);
  for (const auto& g : energy_tolerance.gates) HolonomicGateSpec::named(g);
  for (const auto& g : qpt.gates) HolonomicGateSpec::named(g);
  if (bloch.angle_steps < 2) throw std::invalid_argument("bloch.angle_steps must be >= 2");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json opt = c.optimizer;
  opt.erase("seed");
  j = nlohmann::json{
      {"environment", c.env},
      {"omega_mhz", c.omega_mhz},
      {"rabi",
       {{"cycle_ns", c.rabi.cycle_ns},
        {"delta_mhz", c.rabi.delta_mhz},
        {"theta_rad", c.rabi.theta_rad},
        {"phi_rad", c.rabi.phi_rad},
        {"t_max_ns", c.rabi.t_max_ns},
        {"sample_ns", c.rabi.sample_ns}}},
      {"qpt",
       {{"cycle_ns", c.qpt.cycle_ns},
        {"gates", c.qpt.gates},
        {"shots", c.qpt.shots},
        {"bootstrap", c.qpt.bootstrap},
        {"exact_populations", c.qpt.exact_populations}}},
      {"fidelity_map",
       {{"detuning_mhz", grid_json(c.fidelity_map.detuning_mhz)},
        {"pulse_ns", grid_json(c.fidelity_map.pulse_ns)},
        {"ridge_threshold", c.fidelity_map.ridge_threshold},
        {"raman_min_turns", c.fidelity_map.raman_min_turns},
        {"raman_max_turns", c.fidelity_map.raman_max_turns}}},
      {"tolerance",
       {{"angles_rad", c.tolerance.angles_rad},
        {"relative_error", grid_json(c.tolerance.relative_error)},
        {"fit_halfwidth", c.tolerance.fit_halfwidth}}},
      {"energy_tolerance",
       {{"gates", c.energy_tolerance.gates},
        {"targets", c.energy_tolerance.targets},
        {"range_omega", c.energy_tolerance.range_omega},
        {"steps", c.energy_tolerance.steps}}},
      {"bloch", {{"angle_steps", c.bloch.angle_steps}, {"with_relaxation", c.bloch.with_relaxation}}},
      {"optimizer", opt},
      {"seed", c.seed},
      {"threads", c.threads}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (j.contains("environment")) c.env = j.at("environment").get<NVEnvironment>();
  read(j, "omega_mhz", c.omega_mhz);
  if (j.contains("rabi")) {
    const auto& r = j.at("rabi");
    read(r, "cycle_ns", c.rabi.cycle_ns);
    read(r, "delta_mhz", c.rabi.delta_mhz);
    read(r, "theta_rad", c.rabi.theta_rad);
    read(r, "phi_rad", c.rabi.phi_rad);
    read(r, "t_max_ns", c.rabi.t_max_ns);
    read(r, "sample_ns", c.rabi.sample_ns);
  }
  if (j.contains("qpt")) {
    const auto& q = j.at("qpt");
    read(q, "cycle_ns", c.qpt.cycle_ns);
    read(q, "gates", c.qpt.gates);
    read(q, "shots", c.qpt.shots);
    read(q, "bootstrap", c.qpt.bootstrap);
    read(q, "exact_populations", c.qpt.exact_populations);
  }
  if (j.contains("fidelity_map")) {
    const auto& f = j.at("fidelity_map");
    read_grid(f, "detuning_mhz", c.fidelity_map.detuning_mhz);
    read_grid(f, "pulse_ns", c.fidelity_map.pulse_ns);
    read(f, "ridge_threshold", c.fidelity_map.ridge_threshold);
    read(f, "raman_min_turns", c.fidelity_map.raman_min_turns);
    read(f, "raman_max_turns", c.fidelity_map.raman_max_turns);
  }
  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    read(t, "angles_rad", c.tolerance.angles_rad);
    read_grid(t, "relative_error", c.tolerance.relative_error);
    read(t, "fit_halfwidth", c.tolerance.fit_halfwidth);
  }
  if (j.contains("energy_tolerance")) {
    const auto& e = j.at("energy_tolerance");
    read(e, "gates", c.energy_tolerance.gates);
    read(e, "targets", c.energy_tolerance.targets);
    read(e, "range_omega", c.energy_tolerance.range_omega);
    read(e, "steps", c.energy_tolerance.steps);
  }
  if (j.contains("bloch")) {
    const auto& b = j.at("bloch");
    read(b, "angle_steps", c.bloch.angle_steps);
    read(b, "with_relaxation", c.bloch.with_relaxation);
  }
  if (j.contains("optimizer")) c.optimizer = j.at("optimizer").get<OptimizerConfig>();
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  c.optimizer.seed = c.seed;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed config " + path.string() + ": " + e.what());
  }
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

std::filesystem::path default_config_path() { return NVHOLO_DEFAULT_CONFIG; }

std::string config_hash(const ExperimentConfig& c) {
  const std::string s = nlohmann::json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace nvholo

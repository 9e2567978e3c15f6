#pragma once

// Experiment configuration: one JSON document holding the NV environment,
// drive defaults, sweep grids, sampling and optimizer settings.

#include "nvholo/environment.hpp"
#include "nvholo/optimizer.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nvholo {

struct Grid {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  /// Points min, min + step, ... up to max inclusive (within step/1e6).
  std::vector<double> points() const;
  void validate(const char* what) const;
};

struct RabiSettings {
  double cycle_ns = 1.7;      // 2 pi / omega_eff
  double delta_mhz = 0.0;
  double theta_rad = 1.5707963267948966;  // vertical polarization
  double phi_rad = 3.141592653589793;
  double t_max_ns = 30.0;
  double sample_ns = 0.01;
};

struct QptSettings {
  double cycle_ns = 1.7;
  std::vector<std::string> gates = {"X", "Y", "Z"};
  std::uint64_t shots = 100000;
  int bootstrap = 20;
  bool exact_populations = false;
};

struct FidelityMapSettings {
  Grid detuning_mhz{-500.0, 500.0, 10.0};
  Grid pulse_ns{0.0, 12.0, 0.05};
  double ridge_threshold = 0.5;
  int raman_min_turns = 34;  // first turn count whose pi-rotation plan has |delta| > 4 omega
  int raman_max_turns = 60;
};

struct ToleranceSettings {
  std::vector<double> angles_rad = {0.7853981633974483, 1.5707963267948966, 3.141592653589793};
  Grid relative_error{-0.5, 0.5, 0.01};
  double fit_halfwidth = 0.1;
};

struct EnergyToleranceSettings {
  std::vector<std::string> gates = {"X", "H", "S", "T"};
  std::vector<std::string> targets = {"A2_level", "plus1_level", "minus1_level", "detuning"};
  double range_omega = 0.5;  // sweep +/- range_omega * omega
  int steps = 101;
};

struct BlochSettings {
  int angle_steps = 12;
  bool with_relaxation = false;
};

struct ExperimentConfig {
  NVEnvironment env = NVEnvironment::sample_defaults();
  double omega_mhz = 250.0;
  RabiSettings rabi;
  QptSettings qpt;
  FidelityMapSettings fidelity_map;
  ToleranceSettings tolerance;
  EnergyToleranceSettings energy_tolerance;
  BlochSettings bloch;
  OptimizerConfig optimizer;
  std::uint64_t seed = 42;
  int threads = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);
/// The committed default configuration file.
std::filesystem::path default_config_path();

/// FNV-1a 64 of the canonical (key-sorted, compact) JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace nvholo

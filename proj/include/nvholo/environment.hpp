#pragma once

// Physical environment of a single NV center: excited-state fine structure,
// crystal strain, relaxation and the orientation of the NV axis relative to
// the optical axis. Frequencies are in GHz, times in ns, angles in rad.

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string_view>

namespace nvholo {

/// Fine-structure constants of the excited-state Hamiltonian.
/// Defaults are literature values for the NV- center at low temperature.
struct FineStructureParams {
  double lambda_par = 5.33;  // axial spin-orbit coupling
  double d_es_par = 1.42;    // axial excited spin-spin splitting
  double d_es_perp = 1.55;   // perpendicular excited spin-spin term
  double d_gs = 2.878;       // ground-state zero-field splitting

  void validate() const;
};

struct StrainParams {
  double e_x = 0.0;
  double e_y = 0.0;

  double magnitude() const { return std::hypot(e_x, e_y); }
  void validate() const;
};

enum class DephasingMode { OpticalDephasing, GroundDephasing };

std::string_view to_string(DephasingMode m);
DephasingMode dephasing_mode_from_string(std::string_view s);

struct RelaxationParams {
  double t1_ns = 12.0;
  double t2_star_ns = 4.6;
  DephasingMode mode = DephasingMode::GroundDephasing;

  static RelaxationParams none() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, DephasingMode::GroundDephasing};
  }

  /// Total A2 population decay rate 1/T1 (split equally into |+1> and |-1>).
  double decay_rate() const { return 1.0 / t1_ns; }
  /// Optical mode: Gamma_phi = 2 (1/T2* - 1/(2 T1)) on |A2><A2|.
  /// Ground mode: Gamma_phi' = 1/(2 T2*) on |+1><+1| - |-1><-1|.
  double pure_dephasing_rate() const;
  bool is_closed() const { return decay_rate() == 0.0 && pure_dephasing_rate() == 0.0; }
  void validate() const;
};

struct NVOrientation {
  double tilt = std::acos(1.0 / std::sqrt(3.0));  // NV axis vs optical axis
  double azimuth = 0.0;                            // azimuth of the NV-axis projection
  double lab_reference = 0.0;                      // lab horizontal-axis reference

  static NVOrientation aligned() { return {0.0, 0.0, 0.0}; }
  void validate() const;
};

struct NVEnvironment {
  FineStructureParams fine;
  StrainParams strain;
  RelaxationParams relaxation;
  NVOrientation orientation;

  /// Default sample: strain (-1.2, -1.8) GHz, <111> tilt, T1 = 12 ns, T2* = 4.6 ns.
  static NVEnvironment sample_defaults();
  /// Unstrained, aligned, closed system.
  static NVEnvironment ideal();
  void validate() const;
};

void to_json(nlohmann::json& j, const FineStructureParams& p);
void from_json(const nlohmann::json& j, FineStructureParams& p);
void to_json(nlohmann::json& j, const StrainParams& p);
void from_json(const nlohmann::json& j, StrainParams& p);
void to_json(nlohmann::json& j, const RelaxationParams& p);
void from_json(const nlohmann::json& j, RelaxationParams& p);
void to_json(nlohmann::json& j, const NVOrientation& p);
void from_json(const nlohmann::json& j, NVOrientation& p);
void to_json(nlohmann::json& j, const NVEnvironment& p);
void from_json(const nlohmann::json& j, NVEnvironment& p);

}  // namespace nvholo

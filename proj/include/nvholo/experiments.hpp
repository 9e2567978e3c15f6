#pragma once

// Figure-level experiments. Each run_* computes a result struct; when given
// an OutputWriter it also writes the corresponding files.

#include "nvholo/compensation.hpp"
#include "nvholo/config.hpp"
#include "nvholo/dynamics.hpp"
#include "nvholo/holonomy.hpp"
#include "nvholo/output.hpp"
#include "nvholo/tomography.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace nvholo {

/// Runs fn(0..n-1) on `threads` workers; callers store results by index, so
/// the schedule never affects output.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Stateless seed derivation (splitmix64 over the base seed and tags).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

double omega_for_cycle(double cycle_ns, double delta);

struct RabiResult {
  TimeSeries noisy;
  TimeSeries closed;
  RabiFit fit;
  RabiFit fit_closed;
  double expected_period_ns;
};
RabiResult run_rabi(const ExperimentConfig& cfg, const OutputWriter* out = nullptr);

struct AngleSweepRow {
  double detuning_mhz;
  double gamma_rad;
  double t2pi_ns;
};
std::vector<AngleSweepRow> run_angle_vs_detuning(const ExperimentConfig& cfg, const OutputWriter* out = nullptr);

struct CompensationRow {
  RotationAxis target;
  PolarizationAngles incident;
  PolarizationAngles compensated;
  double infidelity;
};

struct BlochResult {
  std::vector<TrajectoryPoint> points;
  double max_deviation;
  std::vector<CompensationRow> table;  // filled for the compensated run
};
BlochResult run_bloch_trajectories(const ExperimentConfig& cfg, bool compensated, const OutputWriter* out = nullptr);
std::vector<CompensationRow> compensation_table(const ExperimentConfig& cfg);

struct QptGateResult {
  std::string gate;
  ChiMatrix chi;
  ChiMatrix chi_linear;
  double fidelity;
  double bootstrap_mean;
  double bootstrap_std;
  int dominant;
  std::vector<TomographyRecord> records;
};
std::vector<QptGateResult> run_qpt(const ExperimentConfig& cfg, const OutputWriter* out = nullptr);

/// X-gate drive (theta = pi/2, phi = 0) at detuning delta for pulse length t.
Mat4 x_drive_channel(double omega, double delta, double t, const RelaxationParams& r);
/// e^{-i m gamma}|B><B| + |D><D| for the X drive, m = max(1, round(t / t_2pi)).
Mat2 achieved_x_rotation(double omega, double delta, double t, int* turns = nullptr);

struct FidelityMapPoint {
  double detuning_mhz;
  double pulse_ns;
  double fidelity;
  int turns;
};

struct RamanPoint {
  int turns;
  double detuning_mhz;
  double pulse_ns;
  double fidelity;
};

struct FidelityMapResult {
  std::vector<FidelityMapPoint> grid;
  std::vector<FidelityMapPoint> ridges;
  std::vector<RamanPoint> raman;
  double near_resonant_single_turn_best;
  double far_detuned_best;
  std::vector<int> ridge_turns;
};
FidelityMapResult run_fidelity_map(const ExperimentConfig& cfg, const OutputWriter* out = nullptr);

struct ToleranceRow {
  std::string scheme;
  double target_angle;
  double relative_length_error;
  double fidelity;
};

struct ToleranceSummary {
  std::string scheme;
  double target_angle;
  double sensitivity;  // 2 |c2| of a quadratic fit of F(eps) over |eps| <= fit_halfwidth
};

struct ToleranceResult {
  std::vector<ToleranceRow> rows;
  std::vector<ToleranceSummary> summary;
};
/// Geometric: X-axis holonomic plan run for (1 + eps) t_2pi. Dynamic: R_x(angle (1 + eps)).
ToleranceResult run_pulse_tolerance(const ExperimentConfig& cfg, const OutputWriter* out = nullptr);
double geometric_length_fidelity(double angle, double eps);
double dynamic_length_fidelity(double angle, double eps);
/// Returns the coefficients (c0, c1, c2) of a least-squares quadratic.
std::array<double, 3> quadratic_fit(const std::vector<double>& x, const std::vector<double>& y);

struct EnergyCurve {
  std::string gate;
  ShiftTarget target;
  TimeSeries curve;
};
std::vector<EnergyCurve> run_energy_tolerance(const ExperimentConfig& cfg, const OutputWriter* out = nullptr);

struct SynthesisReport {
  HolonomicGateSpec spec;
  PulsePlan plan;
  double verification_distance;
};
SynthesisReport run_synthesize(const ExperimentConfig& cfg, const HolonomicGateSpec& spec,
                               const OutputWriter* out = nullptr);

}  // namespace nvholo

#pragma once

// Optical off-alignment and strain: how an incident lab-frame polarization
// maps onto the bright/dark pair the NV actually sees, the inverse problem
// (which polarization realizes a target pair), and the Bloch-trajectory
// pipeline with and without that correction.
//
// Lab frame: optical axis z, lab horizontal axis at angle lab_reference in the
// xy plane. NV axis n = (sin t cos a, sin t sin a, cos t) for tilt t, azimuth a.

#include "nvholo/environment.hpp"
#include "nvholo/holonomy.hpp"
#include "nvholo/optimizer.hpp"
#include "nvholo/spinspace.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace nvholo {

/// Jones vector on the lab (horizontal, vertical) basis, plus a power scale
/// applied to the Rabi frequency. Poincare angles use the circular basis
/// |+/-1>_p = (h +/- i v)/sqrt(2): J = cos(t/2)|+1>_p + e^{i p} sin(t/2)|-1>_p.
struct IncidentPolarization {
  Vec2 jones = Vec2(1.0, 0.0);
  double power_scale = 1.0;

  static IncidentPolarization from_poincare(double theta, double phi, double power_scale = 1.0);
  PolarizationAngles poincare() const;
};

struct ProjectedPolarization {
  double theta_eff;
  double phi_eff;
  double amplitude_scale;  // |E_perp| / |E|, in (0, 1]
};

/// Throws std::domain_error when the field is (numerically) parallel to the NV axis.
ProjectedPolarization project_polarization(const IncidentPolarization& p, const NVOrientation& o);

struct EffectiveDrive {
  BrightDarkPair pair;
  PolarizationAngles angles;  // bright state as Lambda-drive angles
  double omega_ratio;         // coupling to the A2-like level / nominal omega
  double a2_overlap;          // |<A2|A2'>|^2
  double leakage;             // |drive coupling into the other excited levels| / |coupling into A2'|
};

/// Weak-drive reduction of the 9-dim model: the bright state is the qubit
/// vector coupled to the strained A2-like level A2' by the projected drive.
EffectiveDrive effective_bright_dark(const NVEnvironment& env, const IncidentPolarization& p);

struct CompensationResult {
  IncidentPolarization polarization;
  EffectiveDrive achieved;
  double infidelity;  // 1 - |<D_target|D_achieved>|^2
  OptimizerResult optimizer;
};

/// Searches (theta_p, phi_p) in [0, pi] x [0, 2 pi] with de_minimize. Throws
/// std::runtime_error if the infidelity stays above max_infidelity.
CompensationResult compensate(const BrightDarkPair& target, const NVEnvironment& env, const OptimizerConfig& cfg,
                              double max_infidelity = 1e-4);

enum class RotationAxis { PlusX, MinusX, PlusY, MinusY, PlusZ, MinusZ };
inline constexpr std::array<RotationAxis, 6> kRotationAxes = {RotationAxis::PlusX, RotationAxis::MinusX,
                                                              RotationAxis::PlusY, RotationAxis::MinusY,
                                                              RotationAxis::PlusZ, RotationAxis::MinusZ};
std::string_view to_string(RotationAxis a);
RotationAxis rotation_axis_from_string(std::string_view s);
Eigen::Vector3d axis_vector(RotationAxis a);
/// |+i> for rotations about X, |+> for Y and Z.
BlochVector start_state(RotationAxis a);

struct TrajectoryConfig {
  double omega = mhz_to_angular(250.0);  // nominal on-axis Rabi frequency, rad/ns
  int angle_steps = 12;                  // gamma_k = 2 pi k / steps, k = 0 .. steps-1
  bool compensated = false;
  bool with_relaxation = false;
  OptimizerConfig optimizer;  // used when compensated
};

struct TrajectoryPoint {
  RotationAxis axis;
  int step;
  double angle;
  BlochVector measured;
  BlochVector ideal;
  double deviation;  // trace distance to the closest point of the ideal circle
};

/// Polarizations the pipeline applies for one axis: preparation, rotation
/// (one per nonzero angle step) and readout along X, Y, Z.
struct TrajectoryLights {
  IncidentPolarization prep;
  std::vector<IncidentPolarization> rotation;
  std::array<IncidentPolarization, 3> readout;
};

/// Naive lights read the target Poincare angles straight off the NV-frame
/// formulas; compensated lights come from compensate().
TrajectoryLights trajectory_lights(RotationAxis axis, const NVEnvironment& env, const TrajectoryConfig& cfg);

/// Preparation -> rotation -> three-axis readout -> state tomography.
std::vector<TrajectoryPoint> simulate_trajectory(RotationAxis axis, const TrajectoryLights& lights,
                                                 const NVEnvironment& env, const TrajectoryConfig& cfg);
std::vector<TrajectoryPoint> bloch_trajectories(const NVEnvironment& env, const TrajectoryConfig& cfg);

/// Trace distance from Bloch point r to the circle traced by rotating `start` about `axis`.
double circle_deviation(const Eigen::Vector3d& r, const Eigen::Vector3d& start, const Eigen::Vector3d& axis);

struct ObservedTrajectory {
  RotationAxis axis;
  std::vector<BlochVector> points;  // one per angle step
};

struct StrainFit {
  StrainParams strain;
  double residual;
  OptimizerResult optimizer;
};

/// Least-squares fit of (e_x, e_y) to uncompensated trajectories. cfg.bounds
/// defaults to [-3, 3] GHz for both. Throws std::invalid_argument when fewer
/// than two distinct rotation axes (up to sign) are present.
StrainFit fit_strain(const std::vector<ObservedTrajectory>& data, const NVEnvironment& env0,
                     const TrajectoryConfig& traj, const OptimizerConfig& cfg);

}  // namespace nvholo

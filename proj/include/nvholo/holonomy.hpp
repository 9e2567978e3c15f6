#pragma once

// Bright/dark decomposition, analytic Lambda-space evolution, geometric phase
// and pulse synthesis for holonomic single-qubit rotations.
//
// Qubit kets are in computational order (|-1>, |+1>). The bright state of
// polarization (theta, phi) has Bloch axis (sin t cos p, -sin t sin p, cos t).

#include "nvholo/hamiltonian.hpp"
#include "nvholo/linalg.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace nvholo {

struct BrightDarkPair {
  Vec2 bright;
  Vec2 dark;
};

BrightDarkPair bright_dark(double theta, double phi);

struct PolarizationAngles {
  double theta;
  double phi;  // [0, 2 pi); 0 when theta is 0 or pi
};

/// Inverse of bright_dark(...).bright up to global phase.
PolarizationAngles angles_from_bright(const Vec2& bright);

Eigen::Vector3d bright_axis(double theta, double phi);
PolarizationAngles angles_from_axis(const Eigen::Vector3d& axis);

/// gamma = pi (1 - delta / sqrt(omega^2 + delta^2)); throws unless omega > 0.
double geometric_phase(double omega, double delta);
/// One cyclic evolution, 2 pi / sqrt(omega^2 + delta^2).
double cycle_time(double omega, double delta);

/// Lambda-space propagator of h_lambda(d) for time t (closed form).
Mat3 evolution_operator(const LambdaDrive& d, double t);

/// exp(-i gamma)|B><B| + |D><D| on the qubit.
Mat2 holonomy_unitary(const LambdaDrive& d);

/// exp(-i angle n.sigma / 2).
Mat2 rotation(const Eigen::Vector3d& axis, double angle);

class HolonomicGateSpec {
 public:
  enum class Kind { X, Y, Z, H, S, T, Rk, Explicit };

  static HolonomicGateSpec named(Kind kind, int k = 0);
  /// Accepts "X", "Y", "Z", "H", "S", "T", "R_k"/"Rk" (k from the argument) and "R3"-style names.
  static HolonomicGateSpec named(std::string_view name, std::optional<int> k = std::nullopt);
  /// Negative angles are folded into the antipodal axis; |angle| must lie in (0, 2 pi).
  static HolonomicGateSpec explicit_rotation(const Eigen::Vector3d& axis, double angle);

  Kind kind() const { return kind_; }
  int k() const { return k_; }
  const Eigen::Vector3d& axis() const { return axis_; }
  double angle() const { return angle_; }
  std::string name() const;

 private:
  HolonomicGateSpec(Kind kind, int k, Eigen::Vector3d axis, double angle)
      : kind_(kind), k_(k), axis_(std::move(axis)), angle_(angle) {}

  Kind kind_;
  int k_;
  Eigen::Vector3d axis_;
  double angle_;
};

/// Textbook matrix for named gates, rotation(axis, angle) for explicit ones.
Mat2 gate_matrix(const HolonomicGateSpec& spec);

struct PulsePlan {
  LambdaDrive drive;
  double gamma = 0.0;      // rotation angle achieved over the full duration, [0, 2 pi)
  double omega_eff = 0.0;  // rad/ns
  int turns = 1;

  double cycle_time() const { return kTwoPi / omega_eff; }
};

/// Single-branch inversion of geometric_phase. With turns = m the duration is
/// m cycles and gamma is m times the single-cycle angle, mod 2 pi.
PulsePlan synthesize(const HolonomicGateSpec& spec, double omega, int turns = 1);

/// Plan for an explicit drive run for `turns` full cycles.
PulsePlan plan_from_drive(LambdaDrive drive, int turns = 1);

struct PhaseComparison {
  bool equal;
  double distance;  // min over alpha of ||U - exp(i alpha) V||_F
};

PhaseComparison phase_unitary_equal(const Mat2& u, const Mat2& v, double tol = 1e-9);

void to_json(nlohmann::json& j, const PulsePlan& p);
void from_json(const nlohmann::json& j, PulsePlan& p);

}  // namespace nvholo

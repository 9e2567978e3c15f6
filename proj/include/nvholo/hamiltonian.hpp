#pragma once

// Excited-state fine structure, ground-state, optical-drive and Lambda-space
// Hamiltonians of the NV center. All returned operators are in angular units
// (rad/ns); parameter structs carry GHz.

#include "nvholo/environment.hpp"
#include "nvholo/linalg.hpp"
#include "nvholo/spinspace.hpp"

#include <vector>

namespace nvholo {

/// One rotation-light pulse in the NV frame. omega and delta are angular (rad/ns).
struct LambdaDrive {
  double theta = 0.0;     // polar angle on the Poincare sphere, [0, pi]
  double phi = 0.0;       // azimuth, [0, 2 pi)
  double omega = 1.0;     // on-resonance Rabi frequency
  double delta = 0.0;     // detuning from the (strained) A2 resonance
  double duration = 0.0;  // ns

  double omega_eff() const { return std::hypot(omega, delta); }
  /// Length of one cyclic evolution, 2 pi / omega_eff.
  double cycle_time() const { return kTwoPi / omega_eff(); }
  void validate() const;
};

/// Wraps an azimuth into [0, 2 pi).
double wrap_angle(double phi);

/// Spin-1 operators in the {+1, 0, -1} basis; (S_x +/- i S_y)/sqrt(2) has unit matrix elements.
Mat3 spin1_z();
Mat3 spin1_raise();
Mat3 spin1_lower();
Mat9 kron(const Mat3& orbital, const Mat3& spin);

Mat9 excited_projector();
Mat9 ground_orbital_projector();

Mat9 h_excited(const FineStructureParams& p, const StrainParams& s);
Mat9 h_ground(const FineStructureParams& p);
Mat9 h_drive(const LambdaDrive& d);
Mat3 h_lambda(const LambdaDrive& d);

struct ExcitedEigenpair {
  double energy;  // rad/ns
  Vec9 state;
  SymmetryState label;  // symmetry state with maximal overlap
  double overlap;       // |<label|state>|^2
};

/// Six eigenpairs of the excited-orbital block, ascending in energy. Inside a
/// degenerate cluster the symmetry states are used as the preferred basis and
/// each vector's phase is fixed so its overlap with its label is real positive.
std::vector<ExcitedEigenpair> excited_eigensystem(const FineStructureParams& p, const StrainParams& s);

/// The excited eigenstate with maximal overlap onto the unstrained |A2>.
/// Throws std::domain_error when that overlap is below 0.5.
ExcitedEigenpair a2_like_state(const FineStructureParams& p, const StrainParams& s);

/// Rotating frame at the laser frequency: |+/-1> at zero, the strained A2-like
/// level at -delta, plus the drive. At delta = 0 the A2-like level is on resonance.
Mat9 h_total_rotating(const NVEnvironment& env, const LambdaDrive& d);

/// Splitting of the Ex/Ey-like (spin-0) excited levels, in GHz.
double ex_ey_splitting_ghz(const FineStructureParams& p, const StrainParams& s);

}  // namespace nvholo

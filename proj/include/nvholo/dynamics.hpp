#pragma once

// Lindblad master-equation integration in the Lambda space and the drive
// protocols built on it: Rabi oscillations, noisy gates, readout, the dynamic
// two-level baseline and closed-system robustness sweeps.

#include "nvholo/environment.hpp"
#include "nvholo/hamiltonian.hpp"
#include "nvholo/holonomy.hpp"
#include "nvholo/spinspace.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace nvholo {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  /// Strictly increasing times; populations additionally in [-1e-9, 1 + 1e-9].
  void validate(bool population) const;
};

/// Decay |A2> -> |+/-1> at 1/(2 T1) each, plus the mode's dephasing operator
/// when its rate is nonzero. Lambda-space operators.
std::vector<Mat3> collapse_operators(const RelaxationParams& r);

/// Default step: min(1 ps, t_2pi / 2000).
double default_dt(const LambdaDrive& d);

/// Fixed-step classical RK4 for d rho/dt = L rho with a time-independent
/// Liouvillian. For a linear autonomous system one RK4 step of size h is the
/// degree-4 Taylor polynomial of exp(h L), which is what step_operator builds.
class LindbladSolver {
 public:
  /// Throws for non-Hermitian h, mismatched operator sizes, or
  /// dt_max * ||h|| > 0.1.
  LindbladSolver(const MatX& h, const std::vector<MatX>& collapse, double dt_max);

  int dim() const { return dim_; }
  double dt_max() const { return dt_max_; }
  const MatX& liouvillian() const { return liouvillian_; }

  /// RK4 one-step map (dim^2 x dim^2) for step h <= dt_max.
  MatX step_operator(double h) const;
  /// Propagator over t: ceil(t / dt_max) equal steps.
  MatX propagator(double t) const;
  MatX evolve(const MatX& rho, double t) const;

 private:
  int dim_;
  double dt_max_;
  MatX liouvillian_;
};

MatX vectorize(const MatX& m);  // column-major
MatX unvectorize(const MatX& v, int dim);

QuantumState lindblad_evolve(const QuantumState& rho0, const MatX& h, const std::vector<MatX>& collapse, double t,
                             double dt);

/// Bright-state population under drive d, starting in |B><B|. Samples every
/// sample_interval ns from 0 to t_max inclusive.
TimeSeries simulate_rabi(const LambdaDrive& d, const RelaxationParams& r, double t_max, std::optional<double> dt = {},
                         double sample_interval = 0.01);

struct RabiFit {
  double period_ns;   // mean spacing of successive population minima
  double damping_ns;  // 1/e time of the peak-to-trough contrast envelope
  double contrast;    // first peak-to-trough contrast
};

/// Throws std::runtime_error when fewer than two oscillation cycles are resolved.
RabiFit fit_rabi(const TimeSeries& ts);

/// Embeds rho in the Lambda space, integrates the drive for its duration, then
/// lets the residual A2 population relax through the decay channels only.
/// Without drive the decay channels leave the qubit block untouched apart from
/// the gain term, so the infinitely long relaxation window is folded exactly:
/// rho_q += rho_AA / 2 * 1.
Mat2 apply_drive_noisy(const Mat2& rho, const LambdaDrive& d, const RelaxationParams& r,
                       std::optional<double> dt = {});
QuantumState apply_gate_noisy(const QuantumState& rho, const PulsePlan& plan, const RelaxationParams& r,
                              std::optional<double> dt = {});

/// Lambda-space state after the drive but before the relaxation fold.
Mat3 evolve_drive(const Mat3& rho, const LambdaDrive& d, const RelaxationParams& r, std::optional<double> dt = {});
/// The relaxation fold applied to a Lambda-space state.
Mat2 fold_excited_population(const Mat3& rho);

/// Superoperator of apply_drive_noisy on vec(rho_qubit), column-major.
Mat4 noisy_drive_channel(const LambdaDrive& d, const RelaxationParams& r, std::optional<double> dt = {});
Mat2 apply_channel(const Mat4& superop, const Mat2& rho);
Mat4 unitary_superop(const Mat2& u);

/// <B|rho|B> for the bright state of (theta, phi).
double readout(const Mat2& rho, double theta, double phi);
double readout(const QuantumState& rho, double theta, double phi);
/// Binomial photon counts for `shots` repetitions with a seeded generator.
std::uint64_t readout_sampled(const Mat2& rho, double theta, double phi, std::uint64_t shots, std::uint64_t seed);

Mat2 dynamic_rotation_unitary(double omega, double t);
QuantumState dynamic_rotation(double omega, double t, const QuantumState& rho0);

/// Average of <i|U^dag E(|i><j|) U|j> over the qubit basis, i.e. the
/// entanglement fidelity of the channel against U.
double process_fidelity(const Mat4& superop, const Mat2& u);

/// Phase-invariant fidelity of a (possibly leaky) qubit block M against U,
/// normalized to the population retained in the qubit:
/// |Tr(U^dag M)|^2 / (2 Tr(M^dag M)).
double subspace_gate_fidelity(const Mat2& m, const Mat2& u);
/// |Tr(U^dag M)|^2 / 4, which also charges leakage out of the qubit.
double leaky_gate_fidelity(const Mat2& m, const Mat2& u);

enum class ShiftTarget { A2Level, Plus1Level, Minus1Level, Detuning };
std::string_view to_string(ShiftTarget s);
ShiftTarget shift_target_from_string(std::string_view s);

/// h_lambda with one diagonal perturbed by `shift` (rad/ns).
Mat3 shifted_h_lambda(const LambdaDrive& d, ShiftTarget target, double shift);

/// Closed-system fidelity versus energy shift; times hold the shift in GHz.
/// Sweeps `steps` points evenly over [-range_ghz, range_ghz].
TimeSeries energy_shift_tolerance(const PulsePlan& plan, ShiftTarget target, double range_ghz, int steps);

}  // namespace nvholo

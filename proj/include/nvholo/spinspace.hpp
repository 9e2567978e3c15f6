#pragma once

// NV spin-orbit Hilbert space: basis orderings, states and state metrics.
//
// Full space (dim 9): orbital (x) spin, orbital-major, descending m:
//   index = 3 * o + s with o, s in {0: +1, 1: 0, 2: -1}.
//   The orbital 0_L is the ground orbital, +/-1_L the excited E orbitals.
// Lambda space (dim 3): {|A2>, |+1>, |-1>}, with |+/-1> = |0>_L|+/-1>_S.
// Qubit space (dim 2): computational order {|-1>, |+1>}, i.e. |0> := |-1>
//   (Bloch north pole) and |1> := |+1>. Pauli matrices are the textbook ones
//   in this order, so Z = |-1><-1| - |+1><+1| and X = |+1><-1| + |-1><+1|.

#include "nvholo/linalg.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nvholo {

enum class AngularMomentum { Plus = 0, Zero = 1, Minus = 2 };

struct BasisLabel {
  AngularMomentum orbital;
  AngularMomentum spin;

  int index() const { return 3 * static_cast<int>(orbital) + static_cast<int>(spin); }
  static BasisLabel at(int index);
  std::string to_string() const;
};

inline constexpr int kFullDim = 9;
inline constexpr int kFullPlus1 = 3;   // |0>_L|+1>_S
inline constexpr int kFullZero = 4;    // |0>_L|0>_S
inline constexpr int kFullMinus1 = 5;  // |0>_L|-1>_S

inline constexpr int kLambdaA2 = 0;
inline constexpr int kLambdaPlus1 = 1;
inline constexpr int kLambdaMinus1 = 2;

inline constexpr int kQubitMinus1 = 0;
inline constexpr int kQubitPlus1 = 1;

enum class Space { Qubit, Lambda, Full };

int dimension(Space s);
std::string_view to_string(Space s);
Space space_from_string(std::string_view s);

/// Ket or density matrix tagged with the space its indices refer to.
/// Construction validates normalization (1e-9), Hermiticity and positivity.
class QuantumState {
 public:
  static QuantumState ket(Space space, VecX amplitudes);
  static QuantumState density(Space space, MatX rho);

  Space space() const { return space_; }
  int dim() const { return dimension(space_); }
  bool is_ket() const { return is_ket_; }
  const VecX& amplitudes() const;  // throws for density matrices
  MatX density_matrix() const;

 private:
  QuantumState(Space space, bool is_ket, VecX ket, MatX rho)
      : space_(space), is_ket_(is_ket), ket_(std::move(ket)), rho_(std::move(rho)) {}

  Space space_;
  bool is_ket_;
  VecX ket_;
  MatX rho_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  Eigen::Vector3d vec() const { return {x, y, z}; }
  static BlochVector from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

enum class SymmetryState { A2, A1, E1, E2, Ex, Ey };

SymmetryState symmetry_state_from_string(std::string_view name);
std::string_view to_string(SymmetryState s);

/// Zero-strain excited-state symmetry eigenstate as a 9-dim ket.
QuantumState eigenstate(SymmetryState s);
QuantumState eigenstate(std::string_view name);
Vec9 eigenstate_vector(SymmetryState s);

QuantumState qubit_minus1();
QuantumState qubit_plus1();

BlochVector bloch_from_qubit(const QuantumState& s);
BlochVector bloch_from_density(const Mat2& rho);
QuantumState qubit_from_bloch(const BlochVector& b, bool pure);
Mat2 density_from_bloch(const BlochVector& b);

double fidelity(const QuantumState& a, const QuantumState& b);
double trace_distance(const QuantumState& a, const QuantumState& b);
double trace_distance(const MatX& a, const MatX& b);

struct QubitProjection {
  QuantumState state;
  double leakage;
};

/// Renormalized projection of a full-space state onto span{|+1>, |-1>}.
QubitProjection project_to_qubit(const QuantumState& s);

/// Embeds a qubit density matrix into the Lambda space (A2 block zero).
Mat3 embed_qubit_in_lambda(const Mat2& rho);
/// Qubit block of a Lambda-space operator, in qubit ordering.
Mat2 qubit_block(const Mat3& op);
Vec3 embed_qubit_ket_in_lambda(const Vec2& ket);

void to_json(nlohmann::json& j, const QuantumState& s);
QuantumState state_from_json(const nlohmann::json& j);

}  // namespace nvholo

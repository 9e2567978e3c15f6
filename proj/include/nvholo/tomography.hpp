#pragma once

// Qubit state and process tomography in the Pauli basis {I, X, Y, Z}, with a
// maximum-likelihood physical reconstruction driven by differential evolution.
//
// Process convention: E(rho) = sum_mn chi_mn P_m rho P_n. Trace preservation
// reads sum_mn chi_mn P_n P_m = 1, so Tr(chi) = 1 for channels.

#include "nvholo/linalg.hpp"
#include "nvholo/optimizer.hpp"
#include "nvholo/spinspace.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace nvholo {

struct StateTomography {
  BlochVector bloch;
  Mat2 rho;
  bool clipped;  // raw vector left the unit ball and was rescaled onto it
};

/// Bright-population readout along +X, +Y, +Z: r_i = 2 p_i - 1.
StateTomography state_tomography(const std::array<double, 3>& populations);

/// Polarization (theta, phi) whose bright state points along +X, +Y or +Z (axis 0..2).
std::array<double, 2> readout_angles(int axis);

enum class TomoInput { Plus, PlusI, KetPlus1, KetMinus1 };
inline constexpr std::array<TomoInput, 4> kTomoInputs = {TomoInput::Plus, TomoInput::PlusI, TomoInput::KetPlus1,
                                                         TomoInput::KetMinus1};

std::string_view to_string(TomoInput in);
TomoInput tomo_input_from_string(std::string_view s);
BlochVector input_bloch(TomoInput in);
Mat2 input_density(TomoInput in);

struct TomographyRecord {
  TomoInput input;
  BlochVector bloch;  // measured output Bloch vector
  std::optional<std::array<std::uint64_t, 3>> counts;
  std::uint64_t shots = 0;
};

class ChiMatrix {
 public:
  explicit ChiMatrix(const Mat4& chi, bool physical = false) : chi_(chi), physical_(physical) {}

  const Mat4& matrix() const { return chi_; }
  bool physical() const { return physical_; }

  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// || sum_mn chi_mn P_n P_m - 1 ||_F.
  double tp_residual() const;
  /// Hermitian within 1e-9, eigenvalues >= -1e-9, TP residual <= tp_tol.
  bool satisfies_physical(double tp_tol = 1e-6) const;
  Mat2 apply(const Mat2& rho) const;

 private:
  Mat4 chi_;
  bool physical_;
};

/// Rank-1 chi of a unitary: chi_mn = e_m conj(e_n), e_m = Tr(P_m U) / 2.
ChiMatrix chi_of_unitary(const Mat2& u);

/// Linear inversion from the channel's action on the four canonical inputs.
ChiMatrix qpt_linear(const std::function<Mat2(const Mat2&)>& channel);
/// Linear inversion from measured output Bloch vectors (one record per input).
ChiMatrix qpt_linear(const std::vector<TomographyRecord>& records);
/// chi from a column-major superoperator on vec(rho).
ChiMatrix chi_from_superop(const Mat4& superop);

struct MleResult {
  ChiMatrix chi;
  OptimizerResult optimizer;
  double residual;  // summed squared Bloch residual of the returned chi
};

/// chi = T^dag T with T lower triangular (16 reals), least-squares Bloch
/// residual plus 1e3 x squared TP defect, minimized by de_minimize with a
/// Nelder-Mead polish, seeded with the projected linear inversion; the best
/// point is then made exactly trace preserving by chi -> G chi G^dag with
/// G_km = Tr(P_k P_m W) / 2, W = A^(-1/2), A = sum_mn chi_mn P_n P_m.
MleResult mle_chi(const std::vector<TomographyRecord>& records, const OptimizerConfig& cfg);

/// Tr(chi_ideal chi); invariant under the global phase of U.
double process_fidelity(const ChiMatrix& chi, const Mat2& u);

/// Index (0..3 for I, X, Y, Z) of the largest |chi_mm|.
int dominant_element(const ChiMatrix& chi);

void to_json(nlohmann::json& j, const ChiMatrix& c);
ChiMatrix chi_from_json(const nlohmann::json& j);

}  // namespace nvholo

#include "nvholo/tomography.hpp"

#include "nvholo/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nvholo {

namespace {

const std::array<Mat2, 4>& paulis() {
  static const std::array<Mat2, 4> p = {pauli(0), pauli(1), pauli(2), pauli(3)};
  return p;
}

// Column (m, n) -> index 4 m + n of vec(chi) in the linear system below.
Eigen::Matrix<Complex, 16, 16> chi_to_superop_map() {
  Eigen::Matrix<Complex, 16, 16> a;
  const auto& p = paulis();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      Mat4 s;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) s.block<2, 2>(2 * r, 2 * c) = std::conj(p[n](r, c)) * p[m];
      a.col(4 * m + n) = s.reshaped(16, 1);
    }
  return a;
}

Mat4 chi_from_params(const std::vector<double>& x) {
  Mat4 t = Mat4::Zero();
  int k = 0;
  for (int i = 0; i < 4; ++i) t(i, i) = x[k++];
  for (int i = 1; i < 4; ++i)
    for (int j = 0; j < i; ++j) {
      t(i, j) = Complex(x[k], x[k + 1]);
      k += 2;
    }
  return t.adjoint() * t;
}

// Inverse of chi_from_params for positive definite chi: t = J L^dag J with J chi J = L L^dag.
std::vector<double> params_from_chi(const Mat4& chi) {
  Mat4 j = Mat4::Zero();
  for (int i = 0; i < 4; ++i) j(i, 3 - i) = 1.0;
  const Mat4 l = Eigen::LLT<Mat4>(j * chi * j).matrixL();
  const Mat4 t = j * l.adjoint() * j;
  std::vector<double> x;
  for (int i = 0; i < 4; ++i) x.push_back(std::real(t(i, i)));
  for (int i = 1; i < 4; ++i)
    for (int k = 0; k < i; ++k) {
      x.push_back(std::real(t(i, k)));
      x.push_back(std::imag(t(i, k)));
    }
  return x;
}

// Nearest PSD matrix (negative eigenvalues clipped), floored to stay positive definite.
Mat4 psd_floor(const Mat4& chi, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (chi + chi.adjoint()));
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat4 tp_fix(const Mat4& chi) {
  const auto& p = paulis();
  Mat2 a = Mat2::Zero();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) a += chi(m, n) * p[n] * p[m];
  a = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat2> es(a);
  if (es.eigenvalues().minCoeff() <= 1e-12) return chi;
  const Mat2 w = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().cast<Complex>().asDiagonal() *
                 es.eigenvectors().adjoint();
  Mat4 g;
  for (int k = 0; k < 4; ++k)
    for (int m = 0; m < 4; ++m) g(k, m) = 0.5 * (p[k] * p[m] * w).trace();
  const Mat4 out = g * chi * g.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

std::array<double, 2> readout_angles(int axis) {
  switch (axis) {
    case 0: return {kPi / 2.0, 0.0};
    case 1: return {kPi / 2.0, 1.5 * kPi};
    case 2: return {0.0, 0.0};
    default: throw std::out_of_range("readout axis must be 0, 1 or 2");
  }
}

StateTomography state_tomography(const std::array<double, 3>& populations) {
  Eigen::Vector3d r;
  for (int i = 0; i < 3; ++i) {
    if (!(populations[i] >= -1e-12 && populations[i] <= 1.0 + 1e-12))
      throw std::invalid_argument("populations must lie in [0, 1]");
    r(i) = 2.0 * populations[i] - 1.0;
  }
  StateTomography out{};
  out.clipped = r.norm() > 1.0;
  if (out.clipped) r /= r.norm();
  out.bloch = BlochVector::from(r);
  out.rho = density_from_bloch(out.bloch);
  return out;
}

std::string_view to_string(TomoInput in) {
  switch (in) {
    case TomoInput::Plus: return "plus";
    case TomoInput::PlusI: return "plus_i";
    case TomoInput::KetPlus1: return "ket_plus1";
    case TomoInput::KetMinus1: return "ket_minus1";
  }
  return "plus";
}

TomoInput tomo_input_from_string(std::string_view s) {
  for (TomoInput in : kTomoInputs)
    if (to_string(in) == s) return in;
  throw std::invalid_argument("unknown tomography input: " + std::string(s));
}

BlochVector input_bloch(TomoInput in) {
  switch (in) {
    case TomoInput::Plus: return {1, 0, 0};
    case TomoInput::PlusI: return {0, 1, 0};
    case TomoInput::KetPlus1: return {0, 0, -1};
    case TomoInput::KetMinus1: return {0, 0, 1};
  }
  return {0, 0, 1};
}

Mat2 input_density(TomoInput in) { return density_from_bloch(input_bloch(in)); }

double ChiMatrix::hermiticity_defect() const { return (chi_ - chi_.adjoint()).norm(); }

double ChiMatrix::min_eigenvalue() const {
  const Mat4 h = 0.5 * (chi_ + chi_.adjoint());
  return Eigen::SelfAdjointEigenSolver<Mat4>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double ChiMatrix::tp_residual() const {
  const auto& p = paulis();
  Mat2 a = Mat2::Zero();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) a += chi_(m, n) * p[n] * p[m];
  return (a - Mat2::Identity()).norm();
}

bool ChiMatrix::satisfies_physical(double tp_tol) const {
  return hermiticity_defect() < 1e-9 && min_eigenvalue() >= -1e-9 && tp_residual() <= tp_tol;
}

Mat2 ChiMatrix::apply(const Mat2& rho) const {
  const auto& p = paulis();
  Mat2 out = Mat2::Zero();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) out += chi_(m, n) * p[m] * rho * p[n];
  return out;
}

ChiMatrix chi_of_unitary(const Mat2& u) {
  if (unitarity_defect(u) > 1e-9) throw std::invalid_argument("chi_of_unitary needs a unitary");
  Eigen::Vector4cd e;
  for (int m = 0; m < 4; ++m) e(m) = 0.5 * (paulis()[m] * u).trace();
  return ChiMatrix(e * e.adjoint(), true);
}

ChiMatrix chi_from_superop(const Mat4& superop) {
  static const Eigen::PartialPivLU<Eigen::Matrix<Complex, 16, 16>> lu(chi_to_superop_map());
  const Eigen::Matrix<Complex, 16, 1> v = lu.solve(superop.reshaped(16, 1));
  Mat4 chi;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi(m, n) = v(4 * m + n);
  return ChiMatrix(chi, false);
}

ChiMatrix qpt_linear(const std::function<Mat2(const Mat2&)>& channel) {
  std::array<Mat2, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = channel(input_density(kTomoInputs[k]));
  const Mat2& e_plus = out[0];
  const Mat2& e_plus_i = out[1];
  const Mat2& e11 = out[2];  // |+1> = computational |1>
  const Mat2& e00 = out[3];
  // |0><1| = rho_+ + i rho_+i - (1 + i)/2 (|0><0| + |1><1|), and its adjoint for |1><0|.
  const Complex c(0.5, 0.5);
  const Mat2 e01 = e_plus + kI * e_plus_i - c * (e00 + e11);
  const Mat2 e10 = e_plus - kI * e_plus_i - std::conj(c) * (e00 + e11);
  Mat4 s;
  s.col(0) = e00.reshaped(4, 1);
  s.col(1) = e10.reshaped(4, 1);
  s.col(2) = e01.reshaped(4, 1);
  s.col(3) = e11.reshaped(4, 1);
  return chi_from_superop(s);
}

ChiMatrix qpt_linear(const std::vector<TomographyRecord>& records) {
  std::array<std::optional<Mat2>, 4> outs;
  for (const auto& r : records) outs[static_cast<int>(r.input)] = density_from_bloch(r.bloch);
  for (const auto& o : outs)
    if (!o) throw std::invalid_argument("linear QPT needs one record per canonical input");
  return qpt_linear([&](const Mat2& rho) {
    for (int k = 0; k < 4; ++k)
      if ((rho - input_density(kTomoInputs[k])).norm() < 1e-12) return *outs[k];
    throw std::logic_error("non-canonical input");
  });
}

MleResult mle_chi(const std::vector<TomographyRecord>& records, const OptimizerConfig& cfg_in) {
  if (records.size() < 4) throw std::invalid_argument("MLE needs at least four records");
  bool seen[4] = {false, false, false, false};
  for (const auto& r : records) seen[static_cast<int>(r.input)] = true;
  for (bool s : seen)
    if (!s) throw std::invalid_argument("MLE needs all four canonical inputs");

  // Bloch component i of E(rho_in) is linear in chi: sum_mn chi_mn coeff[i](m, n).
  const auto& p = paulis();
  struct Row {
    std::array<Mat4, 3> coeff;
    Eigen::Vector3d target;
  };
  std::vector<Row> rows;
  for (const auto& r : records) {
    Row row;
    const Mat2 rho = input_density(r.input);
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) row.coeff[i](m, n) = (p[i + 1] * p[m] * rho * p[n]).trace();
    row.target = r.bloch.vec();
    rows.push_back(row);
  }
  const auto residual = [&](const Mat4& chi) {
    double acc = 0.0;
    for (const Row& row : rows)
      for (int i = 0; i < 3; ++i) {
        const double pred = std::real((row.coeff[i].cwiseProduct(chi)).sum());
        acc += (pred - row.target(i)) * (pred - row.target(i));
      }
    return acc;
  };
  const auto objective = [&](const std::vector<double>& x) {
    const Mat4 chi = chi_from_params(x);
    const double tp = ChiMatrix(chi).tp_residual();
    return residual(chi) + 1e3 * tp * tp;
  };

  OptimizerConfig cfg = cfg_in;
  if (cfg.bounds.empty()) cfg.bounds.assign(16, {-1.0, 1.0});
  if (cfg.bounds.size() != 16) throw std::invalid_argument("MLE parameterization has 16 bounded reals");
  // The physical projection of the linear inversion, raw and made trace preserving, joins the initial
  // population; the penalty valley is too narrow for the search to find from random members alone.
  const Mat4 projected = psd_floor(qpt_linear(records).matrix(), 1e-8);
  cfg.initial_points.push_back(params_from_chi(tp_fix(projected)));
  cfg.initial_points.push_back(params_from_chi(projected));
  cfg.polish = true;
  const OptimizerResult opt = de_minimize(objective, cfg);
  const Mat4 chi = tp_fix(chi_from_params(opt.x));
  return {ChiMatrix(chi, true), opt, residual(chi)};
}

double process_fidelity(const ChiMatrix& chi, const Mat2& u) {
  return std::clamp(std::real((chi_of_unitary(u).matrix() * chi.matrix()).trace()), 0.0, 1.0);
}

int dominant_element(const ChiMatrix& chi) {
  int best = 0;
  for (int m = 1; m < 4; ++m)
    if (std::abs(chi.matrix()(m, m)) > std::abs(chi.matrix()(best, best))) best = m;
  return best;
}

void to_json(nlohmann::json& j, const ChiMatrix& c) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int m = 0; m < 4; ++m) {
    nlohmann::json rr = nlohmann::json::array(), ii = nlohmann::json::array();
    for (int n = 0; n < 4; ++n) {
      rr.push_back(c.matrix()(m, n).real());
      ii.push_back(c.matrix()(m, n).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  j = nlohmann::json{{"basis", "IXYZ"}, {"re", re}, {"im", im}, {"physical", c.physical()}};
}

ChiMatrix chi_from_json(const nlohmann::json& j) {
  if (j.at("basis").get<std::string>() != "IXYZ") throw std::invalid_argument("chi basis must be IXYZ");
  Mat4 chi;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi(m, n) = Complex(j.at("re").at(m).at(n).get<double>(), j.at("im").at(m).at(n).get<double>());
  return ChiMatrix(chi, j.value("physical", false));
}

}  // namespace nvholo

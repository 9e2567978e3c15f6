#include "nvholo/spinspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nvholo {

namespace {

std::string_view am_name(AngularMomentum m) {
  switch (m) {
    case AngularMomentum::Plus: return "+1";
    case AngularMomentum::Zero: return "0";
    case AngularMomentum::Minus: return "-1";
  }
  return "?";
}

void check_dim(Space space, long n) {
  if (n != dimension(space)) {
    throw std::invalid_argument("state dimension does not match space " + std::string(to_string(space)));
  }
}

}  // namespace

BasisLabel BasisLabel::at(int index) {
  if (index < 0 || index >= kFullDim) throw std::out_of_range("basis index out of range");
  return {static_cast<AngularMomentum>(index / 3), static_cast<AngularMomentum>(index % 3)};
}

std::string BasisLabel::to_string() const {
  return "|" + std::string(am_name(orbital)) + ">_L|" + std::string(am_name(spin)) + ">_S";
}

int dimension(Space s) {
  switch (s) {
    case Space::Qubit: return 2;
    case Space::Lambda: return 3;
    case Space::Full: return 9;
  }
  return 0;
}

std::string_view to_string(Space s) {
  switch (s) {
    case Space::Qubit: return "qubit";
    case Space::Lambda: return "lambda";
    case Space::Full: return "full";
  }
  return "?";
}

Space space_from_string(std::string_view s) {
  if (s == "qubit") return Space::Qubit;
  if (s == "lambda") return Space::Lambda;
  if (s == "full") return Space::Full;
  throw std::invalid_argument("unknown space: " + std::string(s));
}

QuantumState QuantumState::ket(Space space, VecX amplitudes) {
  check_dim(space, amplitudes.size());
  if (std::abs(amplitudes.norm() - 1.0) > kStateTol) throw std::invalid_argument("ket is not normalized");
  return QuantumState(space, true, std::move(amplitudes), MatX());
}

QuantumState QuantumState::density(Space space, MatX rho) {
  check_dim(space, rho.rows());
  check_dim(space, rho.cols());
  if (hermiticity_defect(rho) > kStateTol) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > kStateTol) throw std::invalid_argument("density matrix trace is not 1");
  if (hermitian_eigenvalues(rho).minCoeff() < -kStateTol) {
    throw std::invalid_argument("density matrix has negative eigenvalues");
  }
  MatX herm = 0.5 * (rho + rho.adjoint());
  return QuantumState(space, false, VecX(), std::move(herm));
}

const VecX& QuantumState::amplitudes() const {
  if (!is_ket_) throw std::logic_error("state is a density matrix, not a ket");
  return ket_;
}

MatX QuantumState::density_matrix() const { return is_ket_ ? MatX(ket_ * ket_.adjoint()) : rho_; }

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

SymmetryState symmetry_state_from_string(std::string_view name) {
  if (name == "A2") return SymmetryState::A2;
  if (name == "A1") return SymmetryState::A1;
  if (name == "E1") return SymmetryState::E1;
  if (name == "E2") return SymmetryState::E2;
  if (name == "Ex") return SymmetryState::Ex;
  if (name == "Ey") return SymmetryState::Ey;
  throw std::invalid_argument("unknown symmetry state: " + std::string(name));
}

std::string_view to_string(SymmetryState s) {
  switch (s) {
    case SymmetryState::A2: return "A2";
    case SymmetryState::A1: return "A1";
    case SymmetryState::E1: return "E1";
    case SymmetryState::E2: return "E2";
    case SymmetryState::Ex: return "Ex";
    case SymmetryState::Ey: return "Ey";
  }
  return "?";
}

Vec9 eigenstate_vector(SymmetryState s) {
  using AM = AngularMomentum;
  auto idx = [](AM o, AM sp) { return BasisLabel{o, sp}.index(); };
  const double r = 1.0 / std::sqrt(2.0);
  Vec9 v = Vec9::Zero();
  switch (s) {
    case SymmetryState::A2:
      v(idx(AM::Plus, AM::Minus)) = r;
      v(idx(AM::Minus, AM::Plus)) = r;
      break;
    case SymmetryState::A1:
      v(idx(AM::Plus, AM::Minus)) = r;
      v(idx(AM::Minus, AM::Plus)) = -r;
      break;
    case SymmetryState::E1:
      v(idx(AM::Plus, AM::Plus)) = r;
      v(idx(AM::Minus, AM::Minus)) = r;
      break;
    case SymmetryState::E2:
      v(idx(AM::Plus, AM::Plus)) = r;
      v(idx(AM::Minus, AM::Minus)) = -r;
      break;
    case SymmetryState::Ex:
      v(idx(AM::Plus, AM::Zero)) = r;
      v(idx(AM::Minus, AM::Zero)) = -r;
      break;
    case SymmetryState::Ey:
      v(idx(AM::Plus, AM::Zero)) = kI * r;
      v(idx(AM::Minus, AM::Zero)) = kI * r;
      break;
  }
  return v;
}

QuantumState eigenstate(SymmetryState s) { return QuantumState::ket(Space::Full, eigenstate_vector(s)); }

QuantumState eigenstate(std::string_view name) { return eigenstate(symmetry_state_from_string(name)); }

QuantumState qubit_minus1() { return QuantumState::ket(Space::Qubit, Vec2(1.0, 0.0)); }
QuantumState qubit_plus1() { return QuantumState::ket(Space::Qubit, Vec2(0.0, 1.0)); }

BlochVector bloch_from_density(const Mat2& rho) {
  return {(pauli(1) * rho).trace().real(), (pauli(2) * rho).trace().real(), (pauli(3) * rho).trace().real()};
}

BlochVector bloch_from_qubit(const QuantumState& s) {
  if (s.space() != Space::Qubit) throw std::invalid_argument("bloch_from_qubit requires a qubit state");
  return bloch_from_density(s.density_matrix());
}

Mat2 density_from_bloch(const BlochVector& b) {
  return 0.5 * (pauli(0) + b.x * pauli(1) + b.y * pauli(2) + b.z * pauli(3));
}

QuantumState qubit_from_bloch(const BlochVector& b, bool pure) {
  const double n = b.norm();
  if (n > 1.0 + kStateTol) throw std::invalid_argument("Bloch vector longer than 1");
  if (!pure) return QuantumState::density(Space::Qubit, density_from_bloch(b));
  if (std::abs(n - 1.0) > kDerivedTol) throw std::invalid_argument("pure state requires a unit Bloch vector");
  const double theta = std::acos(std::clamp(b.z / n, -1.0, 1.0));
  const double phi = std::atan2(b.y, b.x);
  Vec2 ket(std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi));
  return QuantumState::ket(Space::Qubit, ket.normalized());
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.space() != b.space()) throw std::invalid_argument("fidelity: dimension mismatch");
  double f;
  if (a.is_ket() && b.is_ket()) {
    f = std::norm(a.amplitudes().dot(b.amplitudes()));
  } else if (a.is_ket()) {
    const VecX& k = a.amplitudes();
    f = (k.adjoint() * b.density_matrix() * k)(0, 0).real();
  } else if (b.is_ket()) {
    const VecX& k = b.amplitudes();
    f = (k.adjoint() * a.density_matrix() * k)(0, 0).real();
  } else {
    const MatX sa = psd_sqrt(a.density_matrix());
    const MatX inner = sa * b.density_matrix() * sa;
    const double tr = hermitian_eigenvalues(0.5 * (inner + inner.adjoint())).cwiseMax(0.0).cwiseSqrt().sum();
    f = tr * tr;
  }
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const MatX& a, const MatX& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const MatX d = a - b;
  return 0.5 * hermitian_eigenvalues(0.5 * (d + d.adjoint())).cwiseAbs().sum();
}

double trace_distance(const QuantumState& a, const QuantumState& b) {
  if (a.space() != b.space()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return trace_distance(a.density_matrix(), b.density_matrix());
}

QubitProjection project_to_qubit(const QuantumState& s) {
  if (s.space() != Space::Full) throw std::invalid_argument("project_to_qubit requires a full-space state");
  const int idx[2] = {kFullMinus1, kFullPlus1};
  if (s.is_ket()) {
    const VecX& k = s.amplitudes();
    Vec2 q(k(idx[0]), k(idx[1]));
    const double w = q.squaredNorm();
    if (w < 1e-12) throw std::domain_error("state has no weight in the qubit space");
    return {QuantumState::ket(Space::Qubit, q / std::sqrt(w)), 1.0 - w};
  }
  const MatX rho = s.density_matrix();
  Mat2 q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) q(i, j) = rho(idx[i], idx[j]);
  const double w = q.trace().real();
  if (w < 1e-12) throw std::domain_error("state has no weight in the qubit space");
  return {QuantumState::density(Space::Qubit, q / w), 1.0 - w};
}

Mat3 embed_qubit_in_lambda(const Mat2& rho) {
  const int idx[2] = {kLambdaMinus1, kLambdaPlus1};
  Mat3 out = Mat3::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(idx[i], idx[j]) = rho(i, j);
  return out;
}

Vec3 embed_qubit_ket_in_lambda(const Vec2& ket) {
  Vec3 out = Vec3::Zero();
  out(kLambdaMinus1) = ket(kQubitMinus1);
  out(kLambdaPlus1) = ket(kQubitPlus1);
  return out;
}

Mat2 qubit_block(const Mat3& op) {
  const int idx[2] = {kLambdaMinus1, kLambdaPlus1};
  Mat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = op(idx[i], idx[j]);
  return out;
}

void to_json(nlohmann::json& j, const QuantumState& s) {
  std::vector<double> re, im;
  if (s.is_ket()) {
    for (const Complex& c : s.amplitudes()) {
      re.push_back(c.real());
      im.push_back(c.imag());
    }
  } else {
    const MatX rho = s.density_matrix();
    for (int r = 0; r < rho.rows(); ++r)
      for (int c = 0; c < rho.cols(); ++c) {
        re.push_back(rho(r, c).real());
        im.push_back(rho(r, c).imag());
      }
  }
  j = {{"dim", s.dim()},
       {"space", std::string(to_string(s.space()))},
       {"kind", s.is_ket() ? "ket" : "density"},
       {"re", re},
       {"im", im}};
}

QuantumState state_from_json(const nlohmann::json& j) {
  const Space space = space_from_string(j.at("space").get<std::string>());
  const int dim = j.at("dim").get<int>();
  if (dim != dimension(space)) throw std::invalid_argument("state JSON: dim does not match space");
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw std::invalid_argument("state JSON: re/im length mismatch");
  const bool ket = j.value("kind", re.size() == static_cast<size_t>(dim) ? "ket" : "density") == "ket";
  if (ket) {
    if (re.size() != static_cast<size_t>(dim)) throw std::invalid_argument("state JSON: bad ket length");
    VecX v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(re[i], im[i]);
    return QuantumState::ket(space, v);
  }
  if (re.size() != static_cast<size_t>(dim * dim)) throw std::invalid_argument("state JSON: bad density length");
  MatX m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(re[r * dim + c], im[r * dim + c]);
  return QuantumState::density(space, m);
}

}  // namespace nvholo

#include "nvholo/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace nvholo {

namespace {

constexpr std::array<int, 6> kExcitedIndices = {0, 1, 2, 6, 7, 8};
constexpr std::array<SymmetryState, 6> kSymmetryStates = {SymmetryState::A2, SymmetryState::A1, SymmetryState::E1,
                                                          SymmetryState::E2, SymmetryState::Ex, SymmetryState::Ey};

// Orbital operators share the spin-1 matrices: L_z = S_z, L_+/- = S_+/-.
Mat3 orbital_z() { return spin1_z(); }
Mat3 orbital_raise() { return spin1_raise(); }
Mat3 orbital_lower() { return spin1_lower(); }

}  // namespace

void LambdaDrive::validate() const {
  if (!(theta >= -1e-12 && theta <= kPi + 1e-12)) throw std::invalid_argument("drive theta outside [0, pi]");
  if (!(phi >= -1e-12 && phi < kTwoPi + 1e-12)) throw std::invalid_argument("drive phi outside [0, 2 pi)");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("drive omega must be positive");
  if (!std::isfinite(delta)) throw std::invalid_argument("drive delta must be finite");
  if (!(duration >= 0.0)) throw std::invalid_argument("drive duration must be non-negative");
}

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

Mat3 spin1_z() {
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}

Mat3 spin1_raise() {
  Mat3 m = Mat3::Zero();
  m(0, 1) = 1.0;
  m(1, 2) = 1.0;
  return m;
}

Mat3 spin1_lower() { return spin1_raise().transpose(); }

Mat9 kron(const Mat3& orbital, const Mat3& spin) {
  Mat9 out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out.block<3, 3>(3 * a, 3 * b) = orbital(a, b) * spin;
  return out;
}

Mat9 excited_projector() {
  Mat3 p = Mat3::Zero();
  p(0, 0) = 1.0;
  p(2, 2) = 1.0;
  return kron(p, Mat3::Identity());
}

Mat9 ground_orbital_projector() {
  Mat3 p = Mat3::Zero();
  p(1, 1) = 1.0;
  return kron(p, Mat3::Identity());
}

Mat9 h_excited(const FineStructureParams& p, const StrainParams& s) {
  p.validate();
  s.validate();
  const Mat3 I = Mat3::Identity();
  const Mat3 lz = orbital_z(), sz = spin1_z();
  const Mat3 lp2 = orbital_raise() * orbital_raise(), lm2 = orbital_lower() * orbital_lower();
  const Mat3 sp2 = spin1_raise() * spin1_raise(), sm2 = spin1_lower() * spin1_lower();
  Mat9 h = p.lambda_par * kron(lz, sz) + p.d_es_par * kron(lz * lz, sz * sz) +
           p.d_es_perp * (kron(lm2, sp2) + kron(lp2, sm2)) + s.e_x * kron(lm2 + lp2, I) +
           kI * s.e_y * kron(lm2 - lp2, I);
  return ghz_to_angular(1.0) * h;
}

Mat9 h_ground(const FineStructureParams& p) {
  p.validate();
  Mat3 g = Mat3::Zero();
  g(1, 1) = 1.0;
  const Mat3 sz = spin1_z();
  return ghz_to_angular(p.d_gs) * kron(g, sz * sz);
}

Mat9 h_drive(const LambdaDrive& d) {
  d.validate();
  Mat3 orb = Mat3::Zero();
  orb(0, 1) = std::cos(d.theta / 2.0);
  orb(2, 1) = std::polar(std::sin(d.theta / 2.0), d.phi);
  const Mat9 half = (d.omega / std::sqrt(2.0)) * kron(orb, Mat3::Identity());
  return half + half.adjoint();
}

Mat3 h_lambda(const LambdaDrive& d) {
  d.validate();
  Mat3 h = Mat3::Zero();
  h(kLambdaA2, kLambdaMinus1) = 0.5 * d.omega * std::cos(d.theta / 2.0);
  h(kLambdaA2, kLambdaPlus1) = 0.5 * d.omega * std::polar(std::sin(d.theta / 2.0), d.phi);
  h(kLambdaMinus1, kLambdaA2) = std::conj(h(kLambdaA2, kLambdaMinus1));
  h(kLambdaPlus1, kLambdaA2) = std::conj(h(kLambdaA2, kLambdaPlus1));
  h(kLambdaA2, kLambdaA2) = -d.delta;
  return h;
}

std::vector<ExcitedEigenpair> excited_eigensystem(const FineStructureParams& p, const StrainParams& s) {
  const Mat9 h = h_excited(p, s);
  Eigen::Matrix<Complex, 6, 6> block;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) block(a, b) = h(kExcitedIndices[a], kExcitedIndices[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, 6, 6>> es(block);

  std::array<Vec9, 6> refs;
  for (int k = 0; k < 6; ++k) refs[k] = eigenstate_vector(kSymmetryStates[k]);

  std::vector<ExcitedEigenpair> out;
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double degeneracy_tol = 1e-9 * scale;
  int start = 0;
  while (start < 6) {
    int end = start + 1;
    while (end < 6 && es.eigenvalues()(end) - es.eigenvalues()(end - 1) < degeneracy_tol) ++end;
    const int n = end - start;

    std::vector<Vec9> vecs;
    for (int k = start; k < end; ++k) {
      Vec9 v = Vec9::Zero();
      for (int a = 0; a < 6; ++a) v(kExcitedIndices[a]) = es.eigenvectors()(a, k);
      vecs.push_back(v);
    }
    if (n > 1) {
      // Rotate the degenerate cluster onto the symmetry states that live in it.
      std::vector<Vec9> adapted;
      for (const Vec9& r : refs) {
        Vec9 proj = Vec9::Zero();
        for (const Vec9& v : vecs) proj += v * v.dot(r);
        for (const Vec9& a : adapted) proj -= a * a.dot(proj);
        if (proj.norm() > std::sqrt(0.5)) adapted.push_back(proj.normalized());
      }
      if (static_cast<int>(adapted.size()) == n) vecs = adapted;
    }
    const double mean = es.eigenvalues().segment(start, n).mean();
    for (int k = 0; k < n; ++k) {
      Vec9 v = vecs[k];
      int best = 0;
      double best_ov = -1.0;
      for (int r = 0; r < 6; ++r) {
        const double ov = std::norm(refs[r].dot(v));
        if (ov > best_ov) {
          best_ov = ov;
          best = r;
        }
      }
      const Complex c = refs[best].dot(v);
      if (std::abs(c) > 1e-14) v *= std::conj(c) / std::abs(c);
      out.push_back({n > 1 ? mean : es.eigenvalues()(start + k), v, kSymmetryStates[best], best_ov});
    }
    start = end;
  }
  return out;
}

ExcitedEigenpair a2_like_state(const FineStructureParams& p, const StrainParams& s) {
  const Vec9 a2 = eigenstate_vector(SymmetryState::A2);
  const auto eig = excited_eigensystem(p, s);
  const ExcitedEigenpair* best = nullptr;
  double best_ov = -1.0;
  for (const auto& e : eig) {
    const double ov = std::norm(a2.dot(e.state));
    if (ov > best_ov) {
      best_ov = ov;
      best = &e;
    }
  }
  if (best_ov < 0.5) throw std::domain_error("A2-like eigenstate is ambiguous (overlap below 0.5)");
  ExcitedEigenpair out = *best;
  out.label = SymmetryState::A2;
  out.overlap = best_ov;
  const Complex c = a2.dot(out.state);
  out.state *= std::conj(c) / std::abs(c);
  return out;
}

Mat9 h_total_rotating(const NVEnvironment& env, const LambdaDrive& d) {
  env.validate();
  const ExcitedEigenpair a2 = a2_like_state(env.fine, env.strain);
  const Mat9 exc = excited_projector();
  const Mat9 gnd = ground_orbital_projector();
  Mat9 h = h_excited(env.fine, env.strain) - (a2.energy + d.delta) * exc;
  h += h_ground(env.fine) - ghz_to_angular(env.fine.d_gs) * gnd;
  h += h_drive(d);
  return h;
}

double ex_ey_splitting_ghz(const FineStructureParams& p, const StrainParams& s) {
  const Mat9 h = h_excited(p, s);
  Mat2 block;
  const int idx[2] = {1, 7};  // |+1>_L|0>_S, |-1>_L|0>_S
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) block(a, b) = h(idx[a], idx[b]);
  const Eigen::VectorXd ev = hermitian_eigenvalues(block);
  return angular_to_ghz(ev(1) - ev(0));
}

}  // namespace nvholo

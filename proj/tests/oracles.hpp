#pragma once

// Test-side reference implementations. Nothing here calls into the library's
// numerics, so agreement is an independent check.

#include "nvholo/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using nvholo::Complex;
using nvholo::kI;
using nvholo::kPi;

inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) { return a.exp(); }

/// exp(-i h t) by Pade scaling and squaring.
inline Eigen::MatrixXcd propagator(const Eigen::MatrixXcd& h, double t) { return expm(Complex(0, -t) * h); }

/// Right-hand side of the Lindblad equation, evaluated directly on rho.
inline Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                                     const std::vector<Eigen::MatrixXcd>& ls) {
  Eigen::MatrixXcd d = -kI * (h * rho - rho * h);
  for (const auto& l : ls) {
    const Eigen::MatrixXcd ld = l.adjoint() * l;
    d += l * rho * l.adjoint() - 0.5 * (ld * rho + rho * ld);
  }
  return d;
}

/// Row-major Liouvillian of the same equation, exponentiated.
inline Eigen::MatrixXcd lindblad_exact(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                                       const std::vector<Eigen::MatrixXcd>& ls, double t) {
  const long n = rho.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
      for (long j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  Eigen::MatrixXcd sup = -kI * (kron(h, id) - kron(id, h.transpose()));
  for (const auto& l : ls) {
    const Eigen::MatrixXcd ld = l.adjoint() * l;
    sup += kron(l, l.conjugate()) - 0.5 * kron(ld, id) - 0.5 * kron(id, ld.transpose());
  }
  Eigen::VectorXcd v(n * n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
  const Eigen::VectorXcd w = expm(sup * t) * v;
  Eigen::MatrixXcd out(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) out(i, j) = w(i * n + j);
  return out;
}

/// Half the sum of singular values of a - b.
inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

/// exp(-i angle n.sigma/2) from the half-angle formula.
inline Eigen::Matrix2cd axis_rotation(const Eigen::Vector3d& n, double angle) {
  Eigen::Matrix2cd ns;
  ns << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
  return std::cos(angle / 2) * Eigen::Matrix2cd::Identity() - kI * std::sin(angle / 2) * ns;
}

inline double phase_distance(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v) {
  const Complex ov = (v.adjoint() * u).trace();
  const double phase = std::arg(ov);
  return (u - std::polar(1.0, phase) * v).norm();
}

/// <sigma> for a qubit density matrix in (|-1>, |+1>) order.
inline Eigen::Vector3d bloch(const Eigen::Matrix2cd& rho) {
  return {2 * rho(1, 0).real(), 2 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector3d v(g(rng), g(rng), g(rng));
  return v.normalized();
}

inline Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
  return qr.householderQ();
}

}  // namespace oracle

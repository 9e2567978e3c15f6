#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace nvholo {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3cd;
using Vec9 = Eigen::Matrix<Complex, 9, 1>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using Mat4 = Eigen::Matrix4cd;
using Mat9 = Eigen::Matrix<Complex, 9, 9>;
using VecX = Eigen::VectorXcd;
using MatX = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Tolerances shared across modules: state-level checks and derived quantities.
inline constexpr double kStateTol = 1e-9;
inline constexpr double kDerivedTol = 1e-6;

// Hamiltonian parameters enter in ordinary frequency (GHz / MHz) and are
// carried internally as angular frequency in rad/ns.
constexpr double ghz_to_angular(double ghz) { return kTwoPi * ghz; }
constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e-3; }
constexpr double angular_to_ghz(double w) { return w / kTwoPi; }
constexpr double angular_to_mhz(double w) { return w / kTwoPi * 1e3; }

double hermiticity_defect(const MatX& m);
bool is_hermitian(const MatX& m, double tol = 1e-12);
double unitarity_defect(const MatX& m);

/// Largest absolute eigenvalue of a Hermitian matrix.
double hermitian_norm(const MatX& h);

/// exp(-i h t) for Hermitian h via eigendecomposition.
MatX hermitian_propagator(const MatX& h, double t);

/// Principal square root of a positive semidefinite Hermitian matrix.
MatX psd_sqrt(const MatX& m);

/// Eigenvalues (ascending) of a Hermitian matrix.
Eigen::VectorXd hermitian_eigenvalues(const MatX& m);

Mat2 pauli(int k);  // 0 = I, 1 = X, 2 = Y, 3 = Z

}  // namespace nvholo

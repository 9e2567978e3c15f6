#include "nvholo/linalg.hpp"

#include <stdexcept>

namespace nvholo {

double hermiticity_defect(const MatX& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  return (m - m.adjoint()).norm();
}

bool is_hermitian(const MatX& m, double tol) { return hermiticity_defect(m) < tol; }

double unitarity_defect(const MatX& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  return (m.adjoint() * m - MatX::Identity(m.rows(), m.cols())).norm();
}

double hermitian_norm(const MatX& h) {
  Eigen::SelfAdjointEigenSolver<MatX> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatX hermitian_propagator(const MatX& h, double t) {
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  const VecX phases = (es.eigenvalues().cast<Complex>() * (-kI * t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatX psd_sqrt(const MatX& m) {
  Eigen::SelfAdjointEigenSolver<MatX> es(m);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::VectorXd hermitian_eigenvalues(const MatX& m) {
  Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Mat2 pauli(int k) {
  Mat2 p;
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -kI, kI, 0; break;
    case 3: p << 1, 0, 0, -1; break;
    default: throw std::out_of_range("pauli index must be 0..3");
  }
  return p;
}

}  // namespace nvholo

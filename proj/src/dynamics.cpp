#include "nvholo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace nvholo {

namespace {

MatX kron(const MatX& a, const MatX& b) {
  MatX out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat3 lambda_projector(int idx) {
  Mat3 p = Mat3::Zero();
  p(idx, idx) = 1.0;
  return p;
}

std::vector<MatX> to_dynamic(const std::vector<Mat3>& ops) { return {ops.begin(), ops.end()}; }

}  // namespace

void TimeSeries::validate(bool population) const {
  if (times.size() != values.size()) throw std::invalid_argument("time series length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("time series times must strictly increase");
  if (population)
    for (double v : values)
      if (v < -1e-9 || v > 1.0 + 1e-9) throw std::invalid_argument("population outside [0, 1]");
}

std::vector<Mat3> collapse_operators(const RelaxationParams& r) {
  r.validate();
  std::vector<Mat3> ops;
  const double decay = r.decay_rate();
  if (decay > 0.0) {
    const double a = std::sqrt(decay / 2.0);
    for (int g : {kLambdaPlus1, kLambdaMinus1}) {
      Mat3 l = Mat3::Zero();
      l(g, kLambdaA2) = a;
      ops.push_back(l);
    }
  }
  const double gphi = r.pure_dephasing_rate();
  if (gphi > 0.0) {
    if (r.mode == DephasingMode::OpticalDephasing) {
      ops.push_back(std::sqrt(gphi) * lambda_projector(kLambdaA2));
    } else {
      ops.push_back(std::sqrt(gphi) * (lambda_projector(kLambdaPlus1) - lambda_projector(kLambdaMinus1)));
    }
  }
  return ops;
}

double default_dt(const LambdaDrive& d) { return std::min(1e-3, d.cycle_time() / 2000.0); }

MatX vectorize(const MatX& m) { return m.reshaped(m.size(), 1); }

MatX unvectorize(const MatX& v, int dim) { return v.reshaped(dim, dim); }

LindbladSolver::LindbladSolver(const MatX& h, const std::vector<MatX>& collapse, double dt_max)
    : dim_(static_cast<int>(h.rows())), dt_max_(dt_max) {
  if (h.rows() != h.cols()) throw std::invalid_argument("Hamiltonian must be square");
  if (!is_hermitian(h, 1e-12 * std::max(1.0, h.norm()))) throw std::invalid_argument("Hamiltonian is not Hermitian");
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt must be positive");
  const double hn = hermitian_norm(h);
  if (dt_max * hn > 0.1) throw std::invalid_argument("dt exceeds stability bound: dt*||H|| > 0.1");
  const MatX id = MatX::Identity(dim_, dim_);
  liouvillian_ = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const MatX& l : collapse) {
    if (l.rows() != dim_ || l.cols() != dim_) throw std::invalid_argument("collapse operator size mismatch");
    const MatX ldl = l.adjoint() * l;
    liouvillian_ += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
}

MatX LindbladSolver::step_operator(double h) const {
  if (!(h > 0.0) || h > dt_max_ * (1.0 + 1e-12)) throw std::invalid_argument("step outside (0, dt_max]");
  const MatX hl = h * liouvillian_;
  const MatX id = MatX::Identity(hl.rows(), hl.cols());
  // Horner form of 1 + x + x^2/2 + x^3/6 + x^4/24.
  return id + hl * (id + hl * (id + hl * (id + hl / 4.0) / 3.0) / 2.0);
}

MatX LindbladSolver::propagator(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
  const MatX id = MatX::Identity(liouvillian_.rows(), liouvillian_.cols());
  if (t == 0.0) return id;
  const long n = static_cast<long>(std::ceil(t / dt_max_ - 1e-9));
  const MatX step = step_operator(t / static_cast<double>(n));
  // Exponentiation by squaring: same product of identical steps, fewer matmuls.
  MatX result = id, base = step;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) result = base * result;
    if (k > 1) base = base * base;
  }
  return result;
}

MatX LindbladSolver::evolve(const MatX& rho, double t) const {
  return unvectorize(propagator(t) * vectorize(rho), dim_);
}

QuantumState lindblad_evolve(const QuantumState& rho0, const MatX& h, const std::vector<MatX>& collapse, double t,
                             double dt) {
  if (h.rows() != rho0.dim()) throw std::invalid_argument("Hamiltonian and state dimensions differ");
  const LindbladSolver solver(h, collapse, dt);
  MatX rho = solver.evolve(rho0.density_matrix(), t);
  rho = 0.5 * (rho + rho.adjoint());
  return QuantumState::density(rho0.space(), rho);
}

TimeSeries simulate_rabi(const LambdaDrive& d, const RelaxationParams& r, double t_max, std::optional<double> dt,
                         double sample_interval) {
  d.validate();
  if (!(t_max > 0.0) || !(sample_interval > 0.0)) throw std::invalid_argument("t_max and sample interval must be positive");
  const double dt_max = dt.value_or(default_dt(d));
  const LindbladSolver solver(h_lambda(d), to_dynamic(collapse_operators(r)), dt_max);
  const MatX step = solver.propagator(sample_interval);

  const Vec3 b = embed_qubit_ket_in_lambda(bright_dark(d.theta, d.phi).bright);
  MatX v = vectorize(MatX(b * b.adjoint()));
  const long samples = static_cast<long>(std::floor(t_max / sample_interval + 1e-9));
  TimeSeries ts;
  ts.times.reserve(samples + 1);
  ts.values.reserve(samples + 1);
  for (long k = 0; k <= samples; ++k) {
    const MatX rho = unvectorize(v, 3);
    ts.times.push_back(k * sample_interval);
    ts.values.push_back(std::clamp(std::real(b.dot(rho * b)), 0.0, 1.0));
    v = step * v;
  }
  return ts;
}

RabiFit fit_rabi(const TimeSeries& ts) {
  const auto& t = ts.times;
  const auto& p = ts.values;
  std::vector<std::size_t> maxima, minima;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] > p[i - 1] && p[i] >= p[i + 1]) maxima.push_back(i);
    if (p[i] < p[i - 1] && p[i] <= p[i + 1]) minima.push_back(i);
  }
  if (minima.size() < 2 || maxima.size() < 2) throw std::runtime_error("fewer than two Rabi cycles resolved");

  RabiFit fit{};
  fit.period_ns = (t[minima.back()] - t[minima.front()]) / static_cast<double>(minima.size() - 1);

  // Contrast at each peak: peak minus the trough envelope interpolated there.
  const auto trough_at = [&](double tm) {
    if (tm <= t[minima.front()]) return p[minima.front()];
    for (std::size_t k = 1; k < minima.size(); ++k) {
      const double t0 = t[minima[k - 1]], t1 = t[minima[k]];
      if (tm <= t1) return p[minima[k - 1]] + (p[minima[k]] - p[minima[k - 1]]) * (tm - t0) / (t1 - t0);
    }
    return p[minima.back()];
  };
  std::vector<double> xs, ys;
  for (std::size_t i : maxima) {
    const double c = p[i] - trough_at(t[i]);
    if (c > 1e-6) {
      xs.push_back(t[i]);
      ys.push_back(std::log(c));
    }
  }
  if (xs.size() < 2) throw std::runtime_error("Rabi contrast envelope not resolved");
  fit.contrast = std::exp(ys.front());
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.damping_ns = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  return fit;
}

Mat3 evolve_drive(const Mat3& rho, const LambdaDrive& d, const RelaxationParams& r, std::optional<double> dt) {
  d.validate();
  if (r.is_closed()) {
    const Mat3 u = evolution_operator(d, d.duration);
    return u * rho * u.adjoint();
  }
  const LindbladSolver solver(h_lambda(d), to_dynamic(collapse_operators(r)), dt.value_or(default_dt(d)));
  return solver.evolve(rho, d.duration);
}

Mat2 fold_excited_population(const Mat3& rho) {
  Mat2 q = qubit_block(rho);
  // Complex on purpose: the fold must stay linear on non-Hermitian basis elements.
  q += 0.5 * rho(kLambdaA2, kLambdaA2) * Mat2::Identity();
  return q;
}

Mat2 apply_drive_noisy(const Mat2& rho, const LambdaDrive& d, const RelaxationParams& r, std::optional<double> dt) {
  return fold_excited_population(evolve_drive(embed_qubit_in_lambda(rho), d, r, dt));
}

QuantumState apply_gate_noisy(const QuantumState& rho, const PulsePlan& plan, const RelaxationParams& r,
                              std::optional<double> dt) {
  if (rho.space() != Space::Qubit) throw std::invalid_argument("apply_gate_noisy expects a qubit state");
  return QuantumState::density(Space::Qubit, apply_drive_noisy(rho.density_matrix(), plan.drive, r, dt));
}

Mat4 noisy_drive_channel(const LambdaDrive& d, const RelaxationParams& r, std::optional<double> dt) {
  Mat4 s = Mat4::Zero();
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      Mat2 e = Mat2::Zero();
      e(i, j) = 1.0;
      const Mat2 out = fold_excited_population(evolve_drive(embed_qubit_in_lambda(e), d, r, dt));
      s.col(2 * j + i) = out.reshaped(4, 1);
    }
  return s;
}

Mat2 apply_channel(const Mat4& superop, const Mat2& rho) {
  const Eigen::Vector4cd v = superop * rho.reshaped(4, 1);
  return v.reshaped(2, 2);
}

Mat4 unitary_superop(const Mat2& u) {
  Mat4 s;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) s.block<2, 2>(2 * a, 2 * b) = u.conjugate()(a, b) * u;
  return s;
}

double readout(const Mat2& rho, double theta, double phi) {
  const Vec2 b = bright_dark(theta, phi).bright;
  return std::clamp(std::real(b.dot(rho * b)), 0.0, 1.0);
}

double readout(const QuantumState& rho, double theta, double phi) {
  if (rho.space() != Space::Qubit) throw std::invalid_argument("readout expects a qubit state");
  return readout(Mat2(rho.density_matrix()), theta, phi);
}

std::uint64_t readout_sampled(const Mat2& rho, double theta, double phi, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> dist(shots, readout(rho, theta, phi));
  return dist(rng);
}

Mat2 dynamic_rotation_unitary(double omega, double t) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  return rotation(Eigen::Vector3d::UnitX(), omega * t);
}

QuantumState dynamic_rotation(double omega, double t, const QuantumState& rho0) {
  if (rho0.space() != Space::Qubit) throw std::invalid_argument("dynamic rotation acts on a qubit");
  const Mat2 u = dynamic_rotation_unitary(omega, t);
  const Mat2 rho = u * Mat2(rho0.density_matrix()) * u.adjoint();
  return QuantumState::density(Space::Qubit, rho);
}

double process_fidelity(const Mat4& superop, const Mat2& u) {
  Complex acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat2 e = Mat2::Zero();
      e(i, j) = 1.0;
      const Mat2 out = u.adjoint() * apply_channel(superop, e) * u;
      acc += out(i, j);
    }
  return std::clamp(std::real(acc) / 4.0, 0.0, 1.0);
}

double subspace_gate_fidelity(const Mat2& m, const Mat2& u) {
  const double norm = std::real((m.adjoint() * m).trace());
  if (!(norm > 1e-15)) return 0.0;
  return std::clamp(std::norm((u.adjoint() * m).trace()) / (2.0 * norm), 0.0, 1.0);
}

double leaky_gate_fidelity(const Mat2& m, const Mat2& u) {
  return std::clamp(std::norm((u.adjoint() * m).trace()) / 4.0, 0.0, 1.0);
}

std::string_view to_string(ShiftTarget s) {
  switch (s) {
    case ShiftTarget::A2Level: return "A2_level";
    case ShiftTarget::Plus1Level: return "plus1_level";
    case ShiftTarget::Minus1Level: return "minus1_level";
    case ShiftTarget::Detuning: return "detuning";
  }
  return "detuning";
}

ShiftTarget shift_target_from_string(std::string_view s) {
  if (s == "A2_level") return ShiftTarget::A2Level;
  if (s == "plus1_level") return ShiftTarget::Plus1Level;
  if (s == "minus1_level") return ShiftTarget::Minus1Level;
  if (s == "detuning") return ShiftTarget::Detuning;
  throw std::invalid_argument("unknown shift target: " + std::string(s));
}

Mat3 shifted_h_lambda(const LambdaDrive& d, ShiftTarget target, double shift) {
  Mat3 h = h_lambda(d);
  switch (target) {
    case ShiftTarget::A2Level: h(kLambdaA2, kLambdaA2) += shift; break;
    case ShiftTarget::Plus1Level: h(kLambdaPlus1, kLambdaPlus1) += shift; break;
    case ShiftTarget::Minus1Level: h(kLambdaMinus1, kLambdaMinus1) += shift; break;
    case ShiftTarget::Detuning: h(kLambdaA2, kLambdaA2) -= shift; break;
  }
  return h;
}

TimeSeries energy_shift_tolerance(const PulsePlan& plan, ShiftTarget target, double range_ghz, int steps) {
  if (steps < 2) throw std::invalid_argument("energy sweep needs at least two steps");
  if (!(range_ghz > 0.0)) throw std::invalid_argument("energy sweep range must be positive");
  const Mat2 ideal = qubit_block(evolution_operator(plan.drive, plan.drive.duration));
  TimeSeries ts;
  for (int k = 0; k < steps; ++k) {
    // Symmetric grid: index k and steps-1-k give exactly opposite shifts.
    const double s = range_ghz * (2.0 * k - (steps - 1)) / (steps - 1);
    const Mat3 u = hermitian_propagator(shifted_h_lambda(plan.drive, target, ghz_to_angular(s)), plan.drive.duration);
    ts.times.push_back(s);
    ts.values.push_back(subspace_gate_fidelity(qubit_block(u), ideal));
  }
  return ts;
}

}  // namespace nvholo

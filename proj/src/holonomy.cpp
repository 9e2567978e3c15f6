#include "nvholo/holonomy.hpp"

#include "nvholo/spinspace.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace nvholo {

BrightDarkPair bright_dark(double theta, double phi) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const Complex e = std::polar(1.0, phi);
  BrightDarkPair p;
  p.bright = Vec2(e * c, s);
  p.dark = Vec2(-e * s, c);
  return p;
}

PolarizationAngles angles_from_bright(const Vec2& bright) {
  const double n = bright.norm();
  if (!(n > 1e-12)) throw std::invalid_argument("bright state has zero norm");
  const Vec2 b = bright / n;
  const double a0 = std::abs(b(kQubitMinus1)), a1 = std::abs(b(kQubitPlus1));
  const double theta = 2.0 * std::atan2(a1, a0);
  double phi = 0.0;
  if (a0 > 1e-12 && a1 > 1e-12) phi = wrap_angle(std::arg(b(kQubitMinus1)) - std::arg(b(kQubitPlus1)));
  return {theta, phi};
}

Eigen::Vector3d bright_axis(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), -std::sin(theta) * std::sin(phi), std::cos(theta)};
}

PolarizationAngles angles_from_axis(const Eigen::Vector3d& axis) {
  const double n = axis.norm();
  if (std::abs(n - 1.0) > 1e-9) throw std::invalid_argument("axis must be a unit vector");
  const Eigen::Vector3d a = axis / n;
  const double theta = std::acos(std::clamp(a.z(), -1.0, 1.0));
  const double rho = std::hypot(a.x(), a.y());
  const double phi = rho > 1e-14 ? wrap_angle(std::atan2(-a.y(), a.x())) : 0.0;
  return {theta, phi};
}

double geometric_phase(double omega, double delta) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  return kPi * (1.0 - delta / std::hypot(omega, delta));
}

double cycle_time(double omega, double delta) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  return kTwoPi / std::hypot(omega, delta);
}

Mat3 evolution_operator(const LambdaDrive& d, double t) {
  d.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
  const BrightDarkPair bd = bright_dark(d.theta, d.phi);
  Vec3 a = Vec3::Zero();
  a(kLambdaA2) = std::polar(1.0, d.phi);
  const Vec3 b = embed_qubit_ket_in_lambda(bd.bright);
  const Vec3 dk = embed_qubit_ket_in_lambda(bd.dark);

  // Pseudo-spin {|a>, |B>}: H = -delta/2 + (omega_eff/2) n.sigma.
  const double w = d.omega_eff();
  const double nx = d.omega / w, nz = -d.delta / w;
  const double c = std::cos(w * t / 2.0), s = std::sin(w * t / 2.0);
  const Complex g = std::polar(1.0, d.delta * t / 2.0);
  const Complex uaa = g * Complex(c, -s * nz);
  const Complex ubb = g * Complex(c, s * nz);
  const Complex uab = g * Complex(0.0, -s * nx);
  return uaa * a * a.adjoint() + ubb * b * b.adjoint() + uab * (a * b.adjoint() + b * a.adjoint()) +
         dk * dk.adjoint();
}

Mat2 holonomy_unitary(const LambdaDrive& d) {
  d.validate();
  const BrightDarkPair bd = bright_dark(d.theta, d.phi);
  const double gamma = geometric_phase(d.omega, d.delta);
  return std::polar(1.0, -gamma) * bd.bright * bd.bright.adjoint() + bd.dark * bd.dark.adjoint();
}

Mat2 rotation(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d n = axis.normalized();
  return std::cos(angle / 2.0) * pauli(0) -
         kI * std::sin(angle / 2.0) * (n.x() * pauli(1) + n.y() * pauli(2) + n.z() * pauli(3));
}

HolonomicGateSpec HolonomicGateSpec::named(Kind kind, int k) {
  const Eigen::Vector3d x(1, 0, 0), y(0, 1, 0), z(0, 0, 1);
  switch (kind) {
    case Kind::X: return {kind, 0, x, kPi};
    case Kind::Y: return {kind, 0, y, kPi};
    case Kind::Z: return {kind, 0, z, kPi};
    case Kind::H: return {kind, 0, (x + z).normalized(), kPi};
    case Kind::S: return {kind, 0, z, kPi / 2.0};
    case Kind::T: return {kind, 0, z, kPi / 4.0};
    case Kind::Rk:
      if (k < 1 || k > 60) throw std::invalid_argument("R_k requires 1 <= k <= 60");
      return {kind, k, z, kTwoPi / std::ldexp(1.0, k)};
    case Kind::Explicit: break;
  }
  throw std::invalid_argument("explicit rotations need an axis and an angle");
}

HolonomicGateSpec HolonomicGateSpec::named(std::string_view name, std::optional<int> k) {
  std::string n;
  for (char c : name)
    if (c != '_') n.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (n == "X") return named(Kind::X);
  if (n == "Y") return named(Kind::Y);
  if (n == "Z") return named(Kind::Z);
  if (n == "H") return named(Kind::H);
  if (n == "S") return named(Kind::S);
  if (n == "T") return named(Kind::T);
  if (n == "RK") {
    if (!k) throw std::invalid_argument("R_k requires k");
    return named(Kind::Rk, *k);
  }
  if (n.size() > 1 && n[0] == 'R' && n.find_first_not_of("0123456789", 1) == std::string::npos)
    return named(Kind::Rk, std::stoi(n.substr(1)));
  throw std::invalid_argument("unknown gate name: " + std::string(name));
}

HolonomicGateSpec HolonomicGateSpec::explicit_rotation(const Eigen::Vector3d& axis, double angle) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("rotation axis must be a unit vector");
  if (!std::isfinite(angle)) throw std::invalid_argument("rotation angle must be finite");
  Eigen::Vector3d n = axis.normalized();
  if (angle < 0.0) {
    n = -n;
    angle = -angle;
  }
  if (!(angle > 0.0 && angle < kTwoPi))
    throw std::invalid_argument("rotation angle must lie strictly inside (0, 2 pi)");
  return {Kind::Explicit, 0, n, angle};
}

std::string HolonomicGateSpec::name() const {
  switch (kind_) {
    case Kind::X: return "X";
    case Kind::Y: return "Y";
    case Kind::Z: return "Z";
    case Kind::H: return "H";
    case Kind::S: return "S";
    case Kind::T: return "T";
    case Kind::Rk: return "R" + std::to_string(k_);
    case Kind::Explicit: return "explicit";
  }
  return "explicit";
}

Mat2 gate_matrix(const HolonomicGateSpec& spec) {
  Mat2 m;
  switch (spec.kind()) {
    case HolonomicGateSpec::Kind::X: return pauli(1);
    case HolonomicGateSpec::Kind::Y: return pauli(2);
    case HolonomicGateSpec::Kind::Z: return pauli(3);
    case HolonomicGateSpec::Kind::H: m << 1, 1, 1, -1; return m / std::sqrt(2.0);
    case HolonomicGateSpec::Kind::S: m << 1, 0, 0, kI; return m;
    case HolonomicGateSpec::Kind::T: m << 1, 0, 0, std::polar(1.0, kPi / 4.0); return m;
    case HolonomicGateSpec::Kind::Rk: m << 1, 0, 0, std::polar(1.0, spec.angle()); return m;
    case HolonomicGateSpec::Kind::Explicit: break;
  }
  return rotation(spec.axis(), spec.angle());
}

PulsePlan plan_from_drive(LambdaDrive drive, int turns) {
  if (turns < 1) throw std::invalid_argument("turns must be >= 1");
  drive.validate();
  PulsePlan p;
  p.omega_eff = drive.omega_eff();
  p.turns = turns;
  drive.duration = turns * (kTwoPi / p.omega_eff);
  p.gamma = std::fmod(turns * geometric_phase(drive.omega, drive.delta), kTwoPi);
  p.drive = drive;
  return p;
}

PulsePlan synthesize(const HolonomicGateSpec& spec, double omega, int turns) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive");
  const double gamma = spec.angle();
  if (!(gamma > 0.0 && gamma < kTwoPi)) throw std::invalid_argument("angle needs infinite detuning");
  const double c = 1.0 - gamma / kPi;
  const double root = std::sqrt(1.0 - c * c);
  const PolarizationAngles ang = angles_from_axis(spec.axis());
  LambdaDrive d;
  d.theta = ang.theta;
  d.phi = ang.phi;
  d.omega = omega;
  d.delta = omega * c / root;
  d.duration = 0.0;
  PulsePlan p = plan_from_drive(d, turns);
  if (turns == 1) {
    p.drive.duration = kTwoPi * root / omega;
    p.gamma = gamma;
  }
  return p;
}

PhaseComparison phase_unitary_equal(const Mat2& u, const Mat2& v, double tol) {
  if (unitarity_defect(u) > 1e-6 || unitarity_defect(v) > 1e-6)
    throw std::invalid_argument("phase comparison needs unitary inputs");
  // The optimal phase aligns Tr(V^dag U); the residual is formed directly to avoid cancellation.
  const Complex ov = (v.adjoint() * u).trace();
  const Complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex(1.0);
  const double dist = (u - phase * v).norm();
  return {dist < tol, dist};
}

void to_json(nlohmann::json& j, const PulsePlan& p) {
  j = nlohmann::json{{"theta_rad", p.drive.theta},
                     {"phi_rad", p.drive.phi},
                     {"delta_mhz", angular_to_mhz(p.drive.delta)},
                     {"omega_mhz", angular_to_mhz(p.drive.omega)},
                     {"duration_ns", p.drive.duration},
                     {"gamma_rad", p.gamma}};
  if (p.turns != 1) j["turns"] = p.turns;
}

void from_json(const nlohmann::json& j, PulsePlan& p) {
  LambdaDrive d;
  d.theta = j.at("theta_rad").get<double>();
  d.phi = j.at("phi_rad").get<double>();
  d.delta = mhz_to_angular(j.at("delta_mhz").get<double>());
  d.omega = mhz_to_angular(j.at("omega_mhz").get<double>());
  d.duration = j.at("duration_ns").get<double>();
  d.validate();
  p.drive = d;
  p.omega_eff = d.omega_eff();
  p.gamma = j.at("gamma_rad").get<double>();
  p.turns = j.value("turns", 1);
}

}  // namespace nvholo

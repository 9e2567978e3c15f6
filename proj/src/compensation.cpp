#include "nvholo/compensation.hpp"

#include "nvholo/dynamics.hpp"
#include "nvholo/hamiltonian.hpp"
#include "nvholo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace nvholo {

namespace {

struct LabFrame {
  Eigen::Vector3d h, v;        // lab horizontal / vertical
  Eigen::Vector3d x_nv, y_nv;  // NV transverse frame
};

LabFrame lab_frame(const NVOrientation& o) {
  o.validate();
  const double t = o.tilt, a = o.azimuth, r = o.lab_reference;
  return {{std::cos(r), std::sin(r), 0.0},
          {-std::sin(r), std::cos(r), 0.0},
          {std::cos(t) * std::cos(a), std::cos(t) * std::sin(a), -std::sin(t)},
          {-std::sin(a), std::cos(a), 0.0}};
}

// Drive coupling of the qubit states into excited eigenstates, cached per environment.
class EffectiveModel {
 public:
  explicit EffectiveModel(const NVEnvironment& env) : orientation_(env.orientation) {
    const auto eig = excited_eigensystem(env.fine, env.strain);
    a2_ = a2_like_state(env.fine, env.strain);
    for (const auto& e : eig)
      if (std::norm(e.state.dot(a2_.state)) < 0.5) others_.push_back(e.state);
  }

  EffectiveDrive drive(const IncidentPolarization& p) const {
    const ProjectedPolarization proj = project_polarization(p, orientation_);
    LambdaDrive d;
    d.theta = proj.theta_eff;
    d.phi = proj.phi_eff;
    d.omega = proj.amplitude_scale * p.power_scale;
    const Mat9 h = h_drive(d);
    // <q_j| H |A2'> with q = (|-1>, |+1>) in qubit order.
    const Vec9 ha = h * a2_.state;
    const Vec2 c(ha(kFullMinus1), ha(kFullPlus1));
    const double cn = c.norm();
    if (!(cn > 1e-12)) throw std::domain_error("drive does not couple the qubit to the A2-like level");
    EffectiveDrive out{};
    out.angles = angles_from_bright(c / cn);
    out.pair = bright_dark(out.angles.theta, out.angles.phi);
    out.omega_ratio = 2.0 * cn;
    out.a2_overlap = a2_.overlap;
    double leak = 0.0;
    for (const Vec9& e : others_) {
      const Vec9 he = h * e;
      leak += std::norm(he(kFullMinus1)) + std::norm(he(kFullPlus1));
    }
    out.leakage = std::sqrt(leak) / cn;
    return out;
  }

 private:
  NVOrientation orientation_;
  ExcitedEigenpair a2_;
  std::vector<Vec9> others_;
};

double pair_infidelity(const BrightDarkPair& target, const EffectiveDrive& got) {
  return std::max(0.0, 1.0 - std::norm(target.dark.dot(got.pair.dark)));
}

CompensationResult compensate_with(const EffectiveModel& model, const BrightDarkPair& target,
                                   const OptimizerConfig& cfg_in, double max_infidelity) {
  OptimizerConfig cfg = cfg_in;
  cfg.bounds = {{0.0, kPi}, {0.0, kTwoPi}};
  const auto objective = [&](const std::vector<double>& x) {
    return pair_infidelity(target, model.drive(IncidentPolarization::from_poincare(x[0], x[1])));
  };
  CompensationResult res{};
  res.optimizer = de_minimize(objective, cfg);
  res.polarization = IncidentPolarization::from_poincare(res.optimizer.x[0], res.optimizer.x[1]);
  res.achieved = model.drive(res.polarization);
  res.infidelity = pair_infidelity(target, res.achieved);
  if (res.infidelity > max_infidelity)
    throw std::runtime_error("compensation did not reach the infidelity threshold: " + std::to_string(res.infidelity));
  return res;
}

IncidentPolarization naive_light(double theta, double phi) { return IncidentPolarization::from_poincare(theta, phi); }

IncidentPolarization naive_light_for_bright(const Eigen::Vector3d& bright_axis_vec) {
  const PolarizationAngles a = angles_from_axis(bright_axis_vec);
  return naive_light(a.theta, a.phi);
}

BrightDarkPair pair_for_bright(const Eigen::Vector3d& bright_axis_vec) {
  const PolarizationAngles a = angles_from_axis(bright_axis_vec);
  return bright_dark(a.theta, a.phi);
}

Eigen::Vector3d readout_axis(int i) { return Eigen::Vector3d::Unit(i); }

TrajectoryLights lights_with(const EffectiveModel& model, RotationAxis axis, const TrajectoryConfig& cfg) {
  const Eigen::Vector3d prep_bright = -start_state(axis).vec();
  const Eigen::Vector3d rot_bright = axis_vector(axis);
  TrajectoryLights l;
  IncidentPolarization rot;
  if (cfg.compensated) {
    l.prep = compensate_with(model, pair_for_bright(prep_bright), cfg.optimizer, 1e-4).polarization;
    rot = compensate_with(model, pair_for_bright(rot_bright), cfg.optimizer, 1e-4).polarization;
    for (int i = 0; i < 3; ++i)
      l.readout[i] = compensate_with(model, pair_for_bright(readout_axis(i)), cfg.optimizer, 1e-4).polarization;
  } else {
    l.prep = naive_light_for_bright(prep_bright);
    rot = naive_light_for_bright(rot_bright);
    for (int i = 0; i < 3; ++i) {
      const auto a = readout_angles(i);
      l.readout[i] = naive_light(a[0], a[1]);
    }
  }
  l.rotation.assign(std::max(0, cfg.angle_steps - 1), rot);
  return l;
}

std::vector<TrajectoryPoint> simulate_with(const EffectiveModel& model, RotationAxis axis,
                                           const TrajectoryLights& lights, const NVEnvironment& env,
                                           const TrajectoryConfig& cfg) {
  if (cfg.angle_steps < 2) throw std::invalid_argument("trajectory needs at least two angle steps");
  if (static_cast<int>(lights.rotation.size()) != cfg.angle_steps - 1)
    throw std::invalid_argument("one rotation light per nonzero angle step is required");
  const RelaxationParams relax = cfg.with_relaxation ? env.relaxation : RelaxationParams::none();

  const Vec2 prepared = model.drive(lights.prep).pair.dark;
  const Mat2 rho0 = prepared * prepared.adjoint();
  std::array<Vec2, 3> readout_bright;
  for (int i = 0; i < 3; ++i) readout_bright[i] = model.drive(lights.readout[i]).pair.bright;

  const Eigen::Vector3d n = axis_vector(axis);
  const BlochVector s0 = start_state(axis);
  const Mat2 ideal0 = density_from_bloch(s0);
  std::vector<TrajectoryPoint> out;
  for (int k = 0; k < cfg.angle_steps; ++k) {
    const double gamma = kTwoPi * k / cfg.angle_steps;
    Mat2 rho = rho0;
    if (k > 0) {
      const EffectiveDrive eff = model.drive(lights.rotation[k - 1]);
      // Pulse length and detuning calibrated against the coupling actually seen.
      const double omega_c = cfg.omega * eff.omega_ratio;
      const double c = 1.0 - gamma / kPi;
      const double root = std::sqrt(1.0 - c * c);
      LambdaDrive d;
      d.theta = eff.angles.theta;
      d.phi = eff.angles.phi;
      d.omega = omega_c;
      d.delta = omega_c * c / root;
      d.duration = kTwoPi * root / omega_c;
      rho = apply_drive_noisy(rho, d, relax);
    }
    std::array<double, 3> pops;
    for (int i = 0; i < 3; ++i)
      pops[i] = std::clamp(std::real(readout_bright[i].dot(rho * readout_bright[i])), 0.0, 1.0);
    const StateTomography tomo = state_tomography(pops);
    const Mat2 u = rotation(n, gamma);
    TrajectoryPoint pt{};
    pt.axis = axis;
    pt.step = k;
    pt.angle = gamma;
    pt.measured = tomo.bloch;
    pt.ideal = bloch_from_density(u * ideal0 * u.adjoint());
    pt.deviation = circle_deviation(tomo.bloch.vec(), s0.vec(), n);
    out.push_back(pt);
  }
  return out;
}

}  // namespace

IncidentPolarization IncidentPolarization::from_poincare(double theta, double phi, double power_scale) {
  if (!(power_scale > 0.0)) throw std::invalid_argument("power scale must be positive");
  const Vec2 plus = Vec2(1.0, kI) / std::sqrt(2.0), minus = Vec2(1.0, -kI) / std::sqrt(2.0);
  IncidentPolarization p;
  p.jones = std::cos(theta / 2.0) * plus + std::polar(std::sin(theta / 2.0), phi) * minus;
  p.power_scale = power_scale;
  return p;
}

PolarizationAngles IncidentPolarization::poincare() const {
  const double n = jones.norm();
  if (!(n > 1e-14)) throw std::invalid_argument("Jones vector has zero norm");
  const Vec2 j = jones / n;
  const Complex ap = (j(0) - kI * j(1)) / std::sqrt(2.0), am = (j(0) + kI * j(1)) / std::sqrt(2.0);
  const double theta = 2.0 * std::atan2(std::abs(am), std::abs(ap));
  const double phi = (std::abs(ap) > 1e-12 && std::abs(am) > 1e-12) ? wrap_angle(std::arg(am) - std::arg(ap)) : 0.0;
  return {theta, phi};
}

ProjectedPolarization project_polarization(const IncidentPolarization& p, const NVOrientation& o) {
  const LabFrame f = lab_frame(o);
  const double n = p.jones.norm();
  if (!(n > 1e-14)) throw std::invalid_argument("Jones vector has zero norm");
  const Vec2 j = p.jones / n;
  const Eigen::Vector3cd e = j(0) * f.h.cast<Complex>() + j(1) * f.v.cast<Complex>();
  const Complex ex = f.x_nv.cast<Complex>().dot(e), ey = f.y_nv.cast<Complex>().dot(e);
  const double scale = std::sqrt(std::norm(ex) + std::norm(ey));
  if (!(scale > 1e-9)) throw std::domain_error("field is parallel to the NV axis");
  const Complex ap = (ex - kI * ey) / std::sqrt(2.0), am = (ex + kI * ey) / std::sqrt(2.0);
  ProjectedPolarization out{};
  out.theta_eff = 2.0 * std::atan2(std::abs(am), std::abs(ap));
  out.phi_eff = (std::abs(ap) > 1e-12 && std::abs(am) > 1e-12) ? wrap_angle(std::arg(am) - std::arg(ap)) : 0.0;
  out.amplitude_scale = std::min(1.0, scale);
  return out;
}

EffectiveDrive effective_bright_dark(const NVEnvironment& env, const IncidentPolarization& p) {
  return EffectiveModel(env).drive(p);
}

CompensationResult compensate(const BrightDarkPair& target, const NVEnvironment& env, const OptimizerConfig& cfg,
                              double max_infidelity) {
  return compensate_with(EffectiveModel(env), target, cfg, max_infidelity);
}

std::string_view to_string(RotationAxis a) {
  switch (a) {
    case RotationAxis::PlusX: return "+X";
    case RotationAxis::MinusX: return "-X";
    case RotationAxis::PlusY: return "+Y";
    case RotationAxis::MinusY: return "-Y";
    case RotationAxis::PlusZ: return "+Z";
    case RotationAxis::MinusZ: return "-Z";
  }
  return "+X";
}

RotationAxis rotation_axis_from_string(std::string_view s) {
  for (RotationAxis a : kRotationAxes)
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown rotation axis: " + std::string(s));
}

Eigen::Vector3d axis_vector(RotationAxis a) {
  switch (a) {
    case RotationAxis::PlusX: return {1, 0, 0};
    case RotationAxis::MinusX: return {-1, 0, 0};
    case RotationAxis::PlusY: return {0, 1, 0};
    case RotationAxis::MinusY: return {0, -1, 0};
    case RotationAxis::PlusZ: return {0, 0, 1};
    case RotationAxis::MinusZ: return {0, 0, -1};
  }
  return {0, 0, 1};
}

BlochVector start_state(RotationAxis a) {
  if (a == RotationAxis::PlusX || a == RotationAxis::MinusX) return {0, 1, 0};
  return {1, 0, 0};
}

TrajectoryLights trajectory_lights(RotationAxis axis, const NVEnvironment& env, const TrajectoryConfig& cfg) {
  return lights_with(EffectiveModel(env), axis, cfg);
}

std::vector<TrajectoryPoint> simulate_trajectory(RotationAxis axis, const TrajectoryLights& lights,
                                                 const NVEnvironment& env, const TrajectoryConfig& cfg) {
  return simulate_with(EffectiveModel(env), axis, lights, env, cfg);
}

std::vector<TrajectoryPoint> bloch_trajectories(const NVEnvironment& env, const TrajectoryConfig& cfg) {
  const EffectiveModel model(env);
  std::vector<TrajectoryPoint> all;
  for (RotationAxis a : kRotationAxes) {
    const auto pts = simulate_with(model, a, lights_with(model, a, cfg), env, cfg);
    all.insert(all.end(), pts.begin(), pts.end());
  }
  return all;
}

double circle_deviation(const Eigen::Vector3d& r, const Eigen::Vector3d& start, const Eigen::Vector3d& axis) {
  const Eigen::Vector3d n = axis.normalized();
  const Eigen::Vector3d c = start.dot(n) * n;
  const double radius = (start - c).norm();
  const Eigen::Vector3d perp = (r - c) - (r - c).dot(n) * n;
  Eigen::Vector3d closest = c;
  if (perp.norm() > 1e-14) closest += radius * perp.normalized();
  else if (radius > 0.0) closest += (start - c);  // on the axis: every circle point is equidistant
  return 0.5 * (r - closest).norm();
}

StrainFit fit_strain(const std::vector<ObservedTrajectory>& data, const NVEnvironment& env0,
                     const TrajectoryConfig& traj_in, const OptimizerConfig& cfg_in) {
  std::set<int> families;
  for (const auto& t : data) families.insert(static_cast<int>(t.axis) / 2);
  if (families.size() < 2) throw std::invalid_argument("strain fit is underdetermined: need two distinct rotation axes");
  TrajectoryConfig traj = traj_in;
  traj.compensated = false;
  std::vector<TrajectoryLights> lights;
  for (const auto& t : data) {
    if (static_cast<int>(t.points.size()) != traj.angle_steps)
      throw std::invalid_argument("observed trajectory length differs from angle_steps");
    lights.push_back(lights_with(EffectiveModel(env0), t.axis, traj));  // naive lights ignore strain
  }
  const auto residual = [&](const std::vector<double>& x) {
    NVEnvironment env = env0;
    env.strain = {x[0], x[1]};
    double acc = 0.0;
    try {
      const EffectiveModel model(env);
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto pts = simulate_with(model, data[i].axis, lights[i], env, traj);
        for (std::size_t k = 0; k < pts.size(); ++k) acc += (pts[k].measured.vec() - data[i].points[k].vec()).squaredNorm();
      }
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
    return acc;
  };
  OptimizerConfig cfg = cfg_in;
  if (cfg.bounds.empty()) cfg.bounds = {{-3.0, 3.0}, {-3.0, 3.0}};
  if (cfg.bounds.size() != 2) throw std::invalid_argument("strain fit has two parameters");
  StrainFit fit{};
  fit.optimizer = de_minimize(residual, cfg);
  fit.strain = {fit.optimizer.x[0], fit.optimizer.x[1]};
  fit.residual = fit.optimizer.value;
  return fit;
}

}  // namespace nvholo

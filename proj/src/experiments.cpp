#include "nvholo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace nvholo {

namespace {

double omega_of(const ExperimentConfig& cfg) { return mhz_to_angular(cfg.omega_mhz); }

OptimizerConfig seeded(const ExperimentConfig& cfg, std::initializer_list<std::uint64_t> tags) {
  OptimizerConfig o = cfg.optimizer;
  o.seed = derive_seed(cfg.seed, tags);
  return o;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::uint64_t sample_counts(double p, std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> dist(shots, std::clamp(p, 0.0, 1.0));
  return dist(rng);
}

std::vector<TomographyRecord> records_from_counts(const std::array<std::array<std::uint64_t, 3>, 4>& counts,
                                                  std::uint64_t shots) {
  std::vector<TomographyRecord> recs;
  for (int k = 0; k < 4; ++k) {
    std::array<double, 3> p;
    for (int i = 0; i < 3; ++i) p[i] = static_cast<double>(counts[k][i]) / static_cast<double>(shots);
    TomographyRecord r{kTomoInputs[k], state_tomography(p).bloch, counts[k], shots};
    recs.push_back(r);
  }
  return recs;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (v.size() - 1));
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t t = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += t) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  const auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (std::uint64_t t : tags) h = mix(h ^ mix(t));
  return h;
}

double omega_for_cycle(double cycle_ns, double delta) {
  const double w = kTwoPi / cycle_ns;
  if (!(w > std::abs(delta))) throw std::invalid_argument("detuning exceeds the requested effective Rabi frequency");
  return std::sqrt(w * w - delta * delta);
}

RabiResult run_rabi(const ExperimentConfig& cfg, const OutputWriter* out) {
  LambdaDrive d;
  d.theta = cfg.rabi.theta_rad;
  d.phi = wrap_angle(cfg.rabi.phi_rad);
  d.delta = mhz_to_angular(cfg.rabi.delta_mhz);
  d.omega = omega_for_cycle(cfg.rabi.cycle_ns, d.delta);
  RabiResult r;
  r.expected_period_ns = d.cycle_time();
  r.noisy = simulate_rabi(d, cfg.env.relaxation, cfg.rabi.t_max_ns, {}, cfg.rabi.sample_ns);
  r.closed = simulate_rabi(d, RelaxationParams::none(), cfg.rabi.t_max_ns, {}, cfg.rabi.sample_ns);
  r.fit = fit_rabi(r.noisy);
  r.fit_closed = fit_rabi(r.closed);
  if (out) {
    const auto table = [](const TimeSeries& ts) {
      Table t{{"t_ns", "value"}, {}};
      for (std::size_t i = 0; i < ts.times.size(); ++i) t.add({ts.times[i], ts.values[i]});
      return t;
    };
    const nlohmann::json drive = {{"theta_rad", d.theta},
                                  {"phi_rad", d.phi},
                                  {"omega_mhz", angular_to_mhz(d.omega)},
                                  {"delta_mhz", cfg.rabi.delta_mhz}};
    out->write_table("rabi", table(r.noisy),
                     {{"observable", "bright_population"},
                      {"drive", drive},
                      {"relaxation", cfg.env.relaxation},
                      {"expected_period_ns", r.expected_period_ns},
                      {"fitted_period_ns", r.fit.period_ns},
                      {"damping_time_ns", finite_or_null(r.fit.damping_ns)},
                      {"first_contrast", r.fit.contrast}});
    out->write_table("rabi_closed", table(r.closed),
                     {{"observable", "bright_population"},
                      {"drive", drive},
                      {"relaxation", "none"},
                      {"expected_period_ns", r.expected_period_ns},
                      {"fitted_period_ns", r.fit_closed.period_ns},
                      {"first_contrast", r.fit_closed.contrast}});
  }
  return r;
}

std::vector<AngleSweepRow> run_angle_vs_detuning(const ExperimentConfig& cfg, const OutputWriter* out) {
  const double omega = omega_of(cfg);
  std::vector<AngleSweepRow> rows;
  for (double dm : cfg.fidelity_map.detuning_mhz.points()) {
    const double delta = mhz_to_angular(dm);
    rows.push_back({dm, geometric_phase(omega, delta), cycle_time(omega, delta)});
  }
  if (out) {
    Table t{{"detuning_mhz", "gamma_rad", "t2pi_ns"}, {}};
    for (const auto& r : rows) t.add({r.detuning_mhz, r.gamma_rad, r.t2pi_ns});
    out->write_table("angle_vs_detuning", t, {{"omega_mhz", cfg.omega_mhz}});
  }
  return rows;
}

std::vector<CompensationRow> compensation_table(const ExperimentConfig& cfg) {
  std::vector<CompensationRow> rows(kRotationAxes.size());
  parallel_for(kRotationAxes.size(), cfg.threads, [&](std::size_t i) {
    const RotationAxis a = kRotationAxes[i];
    const PolarizationAngles in = angles_from_axis(axis_vector(a));
    OptimizerConfig oc = seeded(cfg, {0xC0, i});
    oc.polish = true;
    const CompensationResult res = compensate(bright_dark(in.theta, in.phi), cfg.env, oc);
    rows[i] = {a, in, res.polarization.poincare(), res.infidelity};
  });
  return rows;
}

BlochResult run_bloch_trajectories(const ExperimentConfig& cfg, bool compensated, const OutputWriter* out) {
  TrajectoryConfig tc;
  tc.omega = omega_of(cfg);
  tc.angle_steps = cfg.bloch.angle_steps;
  tc.compensated = compensated;
  tc.with_relaxation = cfg.bloch.with_relaxation;
  tc.optimizer = seeded(cfg, {0xB1});
  tc.optimizer.polish = true;
  BlochResult r;
  r.points = bloch_trajectories(cfg.env, tc);
  r.max_deviation = 0.0;
  for (const auto& p : r.points) r.max_deviation = std::max(r.max_deviation, p.deviation);
  if (compensated) r.table = compensation_table(cfg);
  if (out) {
    Table t{{"axis", "step", "angle_rad", "bx", "by", "bz", "ideal_bx", "ideal_by", "ideal_bz", "deviation"}, {}};
    for (const auto& p : r.points)
      t.add({std::string(to_string(p.axis)), static_cast<long long>(p.step), p.angle, p.measured.x, p.measured.y,
             p.measured.z, p.ideal.x, p.ideal.y, p.ideal.z, p.deviation});
    out->write_table(compensated ? "bloch_compensated" : "bloch_uncompensated", t,
                     {{"compensated", compensated},
                      {"max_deviation", r.max_deviation},
                      {"strain", cfg.env.strain},
                      {"orientation", cfg.env.orientation}});
    if (compensated) {
      Table ct{{"target_axis", "theta_in_rad", "phi_in_rad", "theta_comp_rad", "phi_comp_rad", "infidelity"}, {}};
      for (const auto& row : r.table)
        ct.add({std::string(to_string(row.target)), row.incident.theta, row.incident.phi, row.compensated.theta,
                row.compensated.phi, row.infidelity});
      out->write_table("compensation_table", ct, {{"strain", cfg.env.strain}, {"orientation", cfg.env.orientation}});
    }
  }
  return r;
}

std::vector<QptGateResult> run_qpt(const ExperimentConfig& cfg, const OutputWriter* out) {
  std::vector<QptGateResult> results;
  const std::uint64_t shots = cfg.qpt.shots;
  for (std::size_t g = 0; g < cfg.qpt.gates.size(); ++g) {
    const std::string& name = cfg.qpt.gates[g];
    const HolonomicGateSpec spec = HolonomicGateSpec::named(name);
    const double c = 1.0 - spec.angle() / kPi;
    const double omega = (kTwoPi / cfg.qpt.cycle_ns) * std::sqrt(1.0 - c * c);
    const PulsePlan plan = synthesize(spec, omega);
    const Mat4 channel = noisy_drive_channel(plan.drive, cfg.env.relaxation);

    std::array<std::array<double, 3>, 4> probs;
    for (int k = 0; k < 4; ++k) {
      const Mat2 rho = apply_channel(channel, input_density(kTomoInputs[k]));
      for (int i = 0; i < 3; ++i) {
        const auto a = readout_angles(i);
        probs[k][i] = readout(rho, a[0], a[1]);
      }
    }
    std::vector<TomographyRecord> records;
    std::array<std::array<std::uint64_t, 3>, 4> counts{};
    if (cfg.qpt.exact_populations) {
      for (int k = 0; k < 4; ++k) records.push_back({kTomoInputs[k], state_tomography(probs[k]).bloch, {}, 0});
    } else {
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 3; ++i) counts[k][i] = sample_counts(probs[k][i], shots, derive_seed(cfg.seed, {g, 0, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)}));
      records = records_from_counts(counts, shots);
    }
    const MleResult mle = mle_chi(records, seeded(cfg, {0x9E, g}));
    const Mat2 ideal = gate_matrix(spec);

    std::vector<double> boot(cfg.qpt.exact_populations ? 0 : cfg.qpt.bootstrap);
    parallel_for(boot.size(), cfg.threads, [&](std::size_t b) {
      std::array<std::array<std::uint64_t, 3>, 4> resampled{};
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 3; ++i)
          resampled[k][i] = sample_counts(static_cast<double>(counts[k][i]) / shots, shots,
                                          derive_seed(cfg.seed, {g, b + 1, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)}));
      const MleResult m = mle_chi(records_from_counts(resampled, shots), seeded(cfg, {0x9E, g, b + 1}));
      boot[b] = process_fidelity(m.chi, ideal);
    });

    QptGateResult r{name, mle.chi, qpt_linear(records), process_fidelity(mle.chi, ideal),
                    boot.empty() ? process_fidelity(mle.chi, ideal) : mean_of(boot), std_of(boot),
                    dominant_element(mle.chi), records};
    results.push_back(r);
  }
  if (out) {
    nlohmann::json report = nlohmann::json::object();
    for (const auto& r : results) {
      out->write_json("chi_" + r.gate, r.chi, {{"gate", r.gate}, {"kind", "mle"}});
      Table t{{"input_label", "bx", "by", "bz"}, {}};
      for (const auto& rec : r.records) t.add({std::string(to_string(rec.input)), rec.bloch.x, rec.bloch.y, rec.bloch.z});
      out->write_table("qpt_records_" + r.gate, t, {{"gate", r.gate}, {"shots", cfg.qpt.exact_populations ? 0 : shots}});
      report[r.gate] = {{"process_fidelity", r.fidelity},
                        {"bootstrap_mean", r.bootstrap_mean},
                        {"bootstrap_std", r.bootstrap_std},
                        {"bootstrap_samples", cfg.qpt.exact_populations ? 0 : cfg.qpt.bootstrap},
                        {"dominant_element", std::string(1, "IXYZ"[r.dominant])},
                        {"linear_chi_trace", std::real(r.chi_linear.matrix().trace())}};
    }
    out->write_json("qpt_report", report,
                    {{"cycle_ns", cfg.qpt.cycle_ns}, {"relaxation", cfg.env.relaxation}, {"shots", shots}});
  }
  return results;
}

Mat4 x_drive_channel(double omega, double delta, double t, const RelaxationParams& r) {
  LambdaDrive d;
  d.theta = kPi / 2.0;
  d.phi = 0.0;
  d.omega = omega;
  d.delta = delta;
  d.duration = t;
  return noisy_drive_channel(d, r);
}

Mat2 achieved_x_rotation(double omega, double delta, double t, int* turns) {
  const double t2pi = cycle_time(omega, delta);
  const int m = std::max(1, static_cast<int>(std::lround(t / t2pi)));
  if (turns) *turns = m;
  const BrightDarkPair bd = bright_dark(kPi / 2.0, 0.0);
  return std::polar(1.0, -m * geometric_phase(omega, delta)) * bd.bright * bd.bright.adjoint() +
         bd.dark * bd.dark.adjoint();
}

FidelityMapResult run_fidelity_map(const ExperimentConfig& cfg, const OutputWriter* out) {
  const double omega = omega_of(cfg);
  const RelaxationParams& relax = cfg.env.relaxation;
  const std::vector<double> deltas = cfg.fidelity_map.detuning_mhz.points();
  const std::vector<double> pulses = cfg.fidelity_map.pulse_ns.points();
  const double step = cfg.fidelity_map.pulse_ns.step;
  std::vector<std::vector<FidelityMapPoint>> rows(deltas.size());

  parallel_for(deltas.size(), cfg.threads, [&](std::size_t i) {
    LambdaDrive d;
    d.theta = kPi / 2.0;
    d.omega = omega;
    d.delta = mhz_to_angular(deltas[i]);
    std::vector<MatX> ops;
    for (const Mat3& l : collapse_operators(relax)) ops.push_back(l);
    const LindbladSolver solver(h_lambda(d), ops, default_dt(d));
    const MatX advance = solver.propagator(step);
    // Columns: vec of the Lambda embedding of |i><j|, column-major order of (i, j).
    MatX state(9, 4);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Mat2 e = Mat2::Zero();
        e(k, j) = 1.0;
        state.col(2 * j + k) = vectorize(MatX(embed_qubit_in_lambda(e)));
      }
    state = solver.propagator(pulses.front()) * state;
    for (std::size_t p = 0; p < pulses.size(); ++p) {
      if (p > 0) state = advance * state;
      Mat4 s;
      for (int c = 0; c < 4; ++c) s.col(c) = fold_excited_population(Mat3(unvectorize(state.col(c), 3))).reshaped(4, 1);
      int m = 1;
      const Mat2 target = achieved_x_rotation(omega, d.delta, pulses[p], &m);
      rows[i].push_back({deltas[i], pulses[p], process_fidelity(s, target), m});
    }
  });

  FidelityMapResult res;
  res.near_resonant_single_turn_best = 0.0;
  std::set<int> turns;
  for (const auto& row : rows) {
    for (std::size_t p = 0; p < row.size(); ++p) {
      res.grid.push_back(row[p]);
      if (std::abs(mhz_to_angular(row[p].detuning_mhz)) < omega && row[p].turns == 1)
        res.near_resonant_single_turn_best = std::max(res.near_resonant_single_turn_best, row[p].fidelity);
      const bool peak = p > 0 && p + 1 < row.size() && row[p].fidelity > row[p - 1].fidelity &&
                        row[p].fidelity >= row[p + 1].fidelity;
      if (peak && row[p].fidelity >= cfg.fidelity_map.ridge_threshold) {
        res.ridges.push_back(row[p]);
        turns.insert(row[p].turns);
      }
    }
  }
  res.ridge_turns.assign(turns.begin(), turns.end());

  // Far-detuned pi rotations: m cycles of a pi/m (or 2 pi - pi/m) single-cycle angle.
  std::vector<std::pair<int, double>> raman_plans;
  for (int m = cfg.fidelity_map.raman_min_turns; m <= cfg.fidelity_map.raman_max_turns; ++m)
    for (double sign : {1.0, -1.0}) {
      const double c = sign * (1.0 - 1.0 / m);
      const double delta = omega * c / std::sqrt(1.0 - c * c);
      if (std::abs(delta) > 4.0 * omega) raman_plans.push_back({m, delta});
    }
  res.raman.resize(raman_plans.size());
  parallel_for(raman_plans.size(), cfg.threads, [&](std::size_t i) {
    const auto [m, delta] = raman_plans[i];
    const double t = m * cycle_time(omega, delta);
    const double f = process_fidelity(x_drive_channel(omega, delta, t, relax), pauli(1));
    res.raman[i] = {m, angular_to_mhz(delta), t, f};
  });
  res.far_detuned_best = 0.0;
  for (const auto& r : res.raman) res.far_detuned_best = std::max(res.far_detuned_best, r.fidelity);

  if (out) {
    Table t{{"detuning_mhz", "pulse_ns", "fidelity"}, {}};
    for (const auto& p : res.grid) t.add({p.detuning_mhz, p.pulse_ns, p.fidelity});
    nlohmann::json rt = nlohmann::json::array();
    for (int m : res.ridge_turns) rt.push_back(m);
    out->write_table("fidelity_map", t,
                     {{"omega_mhz", cfg.omega_mhz},
                      {"relaxation", relax},
                      {"target", "achieved X-axis rotation, m = max(1, round(t / t_2pi)) cycles"},
                      {"near_resonant_single_turn_best", res.near_resonant_single_turn_best},
                      {"far_detuned_best", res.far_detuned_best},
                      {"ridge_turns", rt}});
    Table rg{{"detuning_mhz", "pulse_ns", "fidelity", "turns"}, {}};
    for (const auto& p : res.ridges) rg.add({p.detuning_mhz, p.pulse_ns, p.fidelity, static_cast<long long>(p.turns)});
    out->write_table("fidelity_ridges", rg, {{"ridge_threshold", cfg.fidelity_map.ridge_threshold}});
    Table rm{{"turns", "detuning_mhz", "pulse_ns", "fidelity"}, {}};
    for (const auto& p : res.raman) rm.add({static_cast<long long>(p.turns), p.detuning_mhz, p.pulse_ns, p.fidelity});
    out->write_table("raman_baseline", rm, {{"target", "X"}, {"min_abs_detuning_over_omega", 4.0}});
  }
  return res;
}

double geometric_length_fidelity(double angle, double eps) {
  const PulsePlan plan = synthesize(HolonomicGateSpec::explicit_rotation(Eigen::Vector3d::UnitX(), angle), 1.0);
  const Mat2 m = qubit_block(evolution_operator(plan.drive, (1.0 + eps) * plan.drive.duration));
  return subspace_gate_fidelity(m, rotation(Eigen::Vector3d::UnitX(), angle));
}

double dynamic_length_fidelity(double angle, double eps) {
  return leaky_gate_fidelity(dynamic_rotation_unitary(1.0, angle * (1.0 + eps)), dynamic_rotation_unitary(1.0, angle));
}

std::array<double, 3> quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("quadratic fit needs >= 3 points");
  Eigen::MatrixXd a(x.size(), 3);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    a(i, 2) = x[i] * x[i];
    b(i) = y[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  return {c(0), c(1), c(2)};
}

ToleranceResult run_pulse_tolerance(const ExperimentConfig& cfg, const OutputWriter* out) {
  ToleranceResult res;
  const std::vector<double> eps = cfg.tolerance.relative_error.points();
  for (const std::string scheme : {"geometric", "dynamic"}) {
    for (double angle : cfg.tolerance.angles_rad) {
      std::vector<double> fx, fy;
      for (double e : eps) {
        const double f = scheme == "geometric" ? geometric_length_fidelity(angle, e) : dynamic_length_fidelity(angle, e);
        res.rows.push_back({scheme, angle, e, f});
        if (std::abs(e) <= cfg.tolerance.fit_halfwidth + 1e-9) {
          fx.push_back(e);
          fy.push_back(f);
        }
      }
      res.summary.push_back({scheme, angle, 2.0 * std::abs(quadratic_fit(fx, fy)[2])});
    }
  }
  if (out) {
    Table t{{"scheme", "target_angle", "relative_length_error", "fidelity"}, {}};
    for (const auto& r : res.rows) t.add({r.scheme, r.target_angle, r.relative_length_error, r.fidelity});
    nlohmann::json sens = nlohmann::json::array();
    for (const auto& s : res.summary)
      sens.push_back({{"scheme", s.scheme}, {"target_angle", s.target_angle}, {"quadratic_sensitivity", s.sensitivity}});
    out->write_table("pulse_tolerance", t,
                     {{"metric", "subspace-normalized gate fidelity, closed system"},
                      {"fit_halfwidth", cfg.tolerance.fit_halfwidth},
                      {"sensitivity", sens}});
  }
  return res;
}

std::vector<EnergyCurve> run_energy_tolerance(const ExperimentConfig& cfg, const OutputWriter* out) {
  const double omega = omega_of(cfg);
  const double range_ghz = cfg.energy_tolerance.range_omega * cfg.omega_mhz * 1e-3;
  std::vector<std::pair<std::string, ShiftTarget>> jobs;
  for (const auto& g : cfg.energy_tolerance.gates)
    for (const auto& t : cfg.energy_tolerance.targets) jobs.push_back({g, shift_target_from_string(t)});
  std::vector<EnergyCurve> curves(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const PulsePlan plan = synthesize(HolonomicGateSpec::named(jobs[i].first), omega);
    curves[i] = {jobs[i].first, jobs[i].second,
                 energy_shift_tolerance(plan, jobs[i].second, range_ghz, cfg.energy_tolerance.steps)};
  });
  if (out) {
    for (const auto& c : curves) {
      Table t{{"shift_ghz", "fidelity"}, {}};
      for (std::size_t k = 0; k < c.curve.times.size(); ++k) t.add({c.curve.times[k], c.curve.values[k]});
      out->write_table("energy_tolerance_" + c.gate + "_" + std::string(to_string(c.target)), t,
                       {{"gate", c.gate}, {"shift_target", std::string(to_string(c.target))}, {"omega_mhz", cfg.omega_mhz}});
    }
  }
  return curves;
}

SynthesisReport run_synthesize(const ExperimentConfig& cfg, const HolonomicGateSpec& spec, const OutputWriter* out) {
  const PulsePlan plan = synthesize(spec, omega_of(cfg));
  const double dist = phase_unitary_equal(holonomy_unitary(plan.drive), gate_matrix(spec)).distance;
  SynthesisReport r{spec, plan, dist};
  if (out) {
    nlohmann::json j = plan;
    j["gate"] = spec.name();
    j["verification_distance"] = dist;
    out->write_json("synthesize_" + spec.name(), j, {{"gate", spec.name()}});
  }
  return r;
}

}  // namespace nvholo

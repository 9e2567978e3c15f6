// Command-line front end: one subcommand per experiment, all outputs under --out.

#include "nvholo/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

namespace {

struct Globals {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

nvholo::ExperimentConfig load(const Globals& g) {
  nvholo::ExperimentConfig cfg =
      nvholo::load_config(g.config.empty() ? nvholo::default_config_path() : std::filesystem::path(g.config));
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.optimizer.seed = *g.seed;
  }
  return cfg;
}

nvholo::OutputWriter writer(const Globals& g, const nvholo::ExperimentConfig& cfg, const std::string& cmd) {
  return nvholo::OutputWriter(g.out, nvholo::output_format_from_string(g.format), nvholo::config_hash(cfg), cfg.seed,
                              cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holonomic single-qubit gates in the NV-center Lambda system"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment config JSON (defaults to the committed config/default.json)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* rabi = app.add_subcommand("rabi", "Optically driven Rabi oscillation with and without relaxation");
  auto* sweep = app.add_subcommand("angle-sweep", "Geometric angle and cycle time versus detuning");
  auto* bloch = app.add_subcommand("bloch", "Bloch trajectories about +/-X, +/-Y, +/-Z");
  std::string bloch_mode = "both";
  bloch->add_option("--mode", bloch_mode, "compensated, uncompensated or both")
      ->check(CLI::IsMember({"compensated", "uncompensated", "both"}))
      ->capture_default_str();
  auto* qpt = app.add_subcommand("qpt", "Process tomography of noisy holonomic gates");
  std::vector<std::string> qpt_gates;
  qpt->add_option("--gates", qpt_gates, "Gates to reconstruct (default from config)");
  bool exact = false;
  qpt->add_flag("--exact", exact, "Use exact populations instead of sampled counts");
  auto* fmap = app.add_subcommand("fidelity-map", "X-gate fidelity versus detuning and pulse length");
  auto* tol = app.add_subcommand("tolerance", "Pulse-length tolerance of geometric and dynamic rotations");
  auto* etol = app.add_subcommand("energy-tolerance", "Gate fidelity versus energy-level shifts");
  auto* synth = app.add_subcommand("synthesize", "Pulse parameters for a named gate or explicit rotation");
  std::string gate;
  std::optional<int> k;
  std::vector<double> axis;
  std::optional<double> angle;
  synth->add_option("gate", gate, "X, Y, Z, H, S, T, R_k or 'explicit'")->required();
  synth->add_option("--k", k, "k for R_k");
  synth->add_option("--axis", axis, "Explicit rotation axis (three components)")->expected(3);
  synth->add_option("--angle", angle, "Explicit rotation angle in rad");

  CLI11_PARSE(app, argc, argv);

  try {
    nvholo::ExperimentConfig cfg = load(g);
    if (*rabi) {
      const auto w = writer(g, cfg, "rabi");
      const auto r = nvholo::run_rabi(cfg, &w);
      fmt::print("period {:.4f} ns (expected {:.4f}), damping {:.3f} ns\n", r.fit.period_ns, r.expected_period_ns,
                 r.fit.damping_ns);
    } else if (*sweep) {
      const auto w = writer(g, cfg, "angle-sweep");
      const auto rows = nvholo::run_angle_vs_detuning(cfg, &w);
      fmt::print("{} detuning points written\n", rows.size());
    } else if (*bloch) {
      const auto w = writer(g, cfg, "bloch");
      for (bool comp : {false, true}) {
        if ((comp && bloch_mode == "uncompensated") || (!comp && bloch_mode == "compensated")) continue;
        const auto r = nvholo::run_bloch_trajectories(cfg, comp, &w);
        fmt::print("{}: max deviation from ideal circles {:.3e}\n", comp ? "compensated" : "uncompensated",
                   r.max_deviation);
      }
    } else if (*qpt) {
      if (!qpt_gates.empty()) cfg.qpt.gates = qpt_gates;
      if (exact) cfg.qpt.exact_populations = true;
      const auto w = writer(g, cfg, "qpt");
      for (const auto& r : nvholo::run_qpt(cfg, &w))
        fmt::print("{}: process fidelity {:.4f} (bootstrap {:.4f} +/- {:.4f}), dominant chi_{}{}\n", r.gate,
                   r.fidelity, r.bootstrap_mean, r.bootstrap_std, "IXYZ"[r.dominant], "IXYZ"[r.dominant]);
    } else if (*fmap) {
      const auto w = writer(g, cfg, "fidelity-map");
      const auto r = nvholo::run_fidelity_map(cfg, &w);
      fmt::print("near-resonant single-turn best {:.4f}, far-detuned best {:.4f}, ridge turns {}\n",
                 r.near_resonant_single_turn_best, r.far_detuned_best, fmt::join(r.ridge_turns, ","));
    } else if (*tol) {
      const auto w = writer(g, cfg, "tolerance");
      for (const auto& s : nvholo::run_pulse_tolerance(cfg, &w).summary)
        fmt::print("{} angle {:.4f}: quadratic sensitivity {:.4e}\n", s.scheme, s.target_angle, s.sensitivity);
    } else if (*etol) {
      const auto w = writer(g, cfg, "energy-tolerance");
      fmt::print("{} curves written\n", nvholo::run_energy_tolerance(cfg, &w).size());
    } else if (*synth) {
      const auto spec = (gate == "explicit")
                            ? nvholo::HolonomicGateSpec::explicit_rotation(
                                  axis.size() == 3 ? Eigen::Vector3d(axis[0], axis[1], axis[2]).normalized()
                                                   : throw std::invalid_argument("explicit needs --axis x y z"),
                                  angle ? *angle : throw std::invalid_argument("explicit needs --angle"))
                            : nvholo::HolonomicGateSpec::named(gate, k);
      const auto w = writer(g, cfg, "synthesize");
      const auto r = nvholo::run_synthesize(cfg, spec, &w);
      nlohmann::json j = r.plan;
      j["gate"] = spec.name();
      j["verification_distance"] = r.verification_distance;
      std::cout << j.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

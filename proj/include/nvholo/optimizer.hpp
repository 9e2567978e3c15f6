#pragma once

// Bounded global minimization: differential evolution (rand/1/bin) with an
// optional Nelder-Mead polish of the best member.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nvholo {

struct OptimizerConfig {
  double population_factor = 15.0;  // population = factor * dimension (at least 5)
  double crossover_prob = 0.9;
  double weight_min = 0.5;  // mutation weight sampled per generation from [min, max]
  double weight_max = 1.0;
  int max_generations = 1000;
  std::optional<std::uint64_t> seed;  // required
  std::vector<std::pair<double, double>> bounds;
  // Stops once max - min population fitness <= abs_tol + rel_tol * |best|.
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;
  bool polish = false;
  int threads = 1;
  // Replace the first population members (clamped into bounds).
  std::vector<std::vector<double>> initial_points;

  void validate() const;
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  int generations = 0;
  long evaluations = 0;
  bool converged = false;  // false when the generation budget ran out
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Deterministic for a fixed seed and independent of `threads`: trial vectors
/// are drawn serially, evaluated in parallel, then selected in index order.
OptimizerResult de_minimize(const Objective& f, const OptimizerConfig& cfg);

/// Nelder-Mead with iterates clamped into the box.
OptimizerResult nelder_mead(const Objective& f, std::vector<double> x0,
                            const std::vector<std::pair<double, double>>& bounds, int max_iterations = 4000,
                            double ftol = 1e-15);

void to_json(nlohmann::json& j, const OptimizerConfig& c);
void from_json(const nlohmann::json& j, OptimizerConfig& c);

}  // namespace nvholo

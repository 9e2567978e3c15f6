#include "nvholo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace nvholo {

namespace {

void evaluate_all(const Objective& f, const std::vector<std::vector<double>>& xs, std::vector<double>& out,
                  int threads) {
  out.assign(xs.size(), 0.0);
  const auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double v = f(xs[i]);
      out[i] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    }
  };
  const std::size_t n = xs.size();
  const std::size_t t = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), 1, n);
  if (t == 1) {
    run(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t b = k * chunk, e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back(run, b, e);
  }
  for (auto& th : pool) th.join();
}

std::vector<double> clamp_into(std::vector<double> x, const std::vector<std::pair<double, double>>& bounds) {
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], bounds[d].first, bounds[d].second);
  return x;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!seed) throw std::invalid_argument("optimizer seed is mandatory");
  if (!(population_factor > 0.0)) throw std::invalid_argument("population_factor must be positive");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw std::invalid_argument("crossover_prob outside [0, 1]");
  if (!(weight_min > 0.0 && weight_max < 2.0 && weight_min <= weight_max))
    throw std::invalid_argument("differential weight range must lie in (0, 2)");
  if (max_generations < 1) throw std::invalid_argument("max_generations must be >= 1");
  if (bounds.empty()) throw std::invalid_argument("optimizer needs at least one bounded parameter");
  for (const auto& x : initial_points)
    if (x.size() != bounds.size()) throw std::invalid_argument("initial point dimension differs from bounds");
  for (const auto& [lo, hi] : bounds)
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi)) throw std::invalid_argument("bounds must be finite with lo <= hi");
}

OptimizerResult de_minimize(const Objective& f, const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.bounds.size();
  const std::size_t np = std::max<std::size_t>(5, static_cast<std::size_t>(std::lround(cfg.population_factor * dim)));
  std::mt19937_64 rng(*cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto lo = [&](std::size_t d) { return cfg.bounds[d].first; };
  const auto span = [&](std::size_t d) { return cfg.bounds[d].second - cfg.bounds[d].first; };

  // Latin hypercube initialization.
  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  for (std::size_t d = 0; d < dim; ++d) {
    std::vector<std::size_t> perm(np);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < np; ++i) pop[i][d] = lo(d) + span(d) * (perm[i] + unit(rng)) / static_cast<double>(np);
  }
  for (std::size_t i = 0; i < std::min(np, cfg.initial_points.size()); ++i) pop[i] = clamp_into(cfg.initial_points[i], cfg.bounds);
  std::vector<double> fit;
  evaluate_all(f, pop, fit, cfg.threads);
  OptimizerResult res;
  res.evaluations = static_cast<long>(np);

  std::uniform_int_distribution<std::size_t> pick(0, np - 1), pick_dim(0, dim - 1);
  std::vector<std::vector<double>> trials(np, std::vector<double>(dim));
  std::vector<double> trial_fit;
  int gen = 0;
  bool converged = false;
  while (gen < cfg.max_generations) {
    const auto [mn, mx] = std::minmax_element(fit.begin(), fit.end());
    if (std::isfinite(*mx) && *mx - *mn <= cfg.abs_tol + cfg.rel_tol * std::abs(*mn)) {
      converged = true;
      break;
    }
    ++gen;
    const double w = cfg.weight_min + (cfg.weight_max - cfg.weight_min) * unit(rng);
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const std::size_t jrand = pick_dim(rng);
      for (std::size_t d = 0; d < dim; ++d) {
        double v = pop[i][d];
        if (d == jrand || unit(rng) < cfg.crossover_prob) {
          v = pop[r1][d] + w * (pop[r2][d] - pop[r3][d]);
          if (v < cfg.bounds[d].first || v > cfg.bounds[d].second) v = lo(d) + span(d) * unit(rng);
        }
        trials[i][d] = v;
      }
    }
    evaluate_all(f, trials, trial_fit, cfg.threads);
    res.evaluations += static_cast<long>(np);
    for (std::size_t i = 0; i < np; ++i) {
      if (trial_fit[i] <= fit[i]) {
        pop[i] = trials[i];
        fit[i] = trial_fit[i];
      }
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  res.x = pop[best];
  res.value = fit[best];
  res.generations = gen;
  res.converged = converged;
  if (cfg.polish) {
    const OptimizerResult nm = nelder_mead(f, res.x, cfg.bounds);
    res.evaluations += nm.evaluations;
    if (nm.value < res.value) {
      res.x = nm.x;
      res.value = nm.value;
    }
  }
  return res;
}

OptimizerResult nelder_mead(const Objective& f, std::vector<double> x0,
                            const std::vector<std::pair<double, double>>& bounds, int max_iterations, double ftol) {
  const std::size_t n = x0.size();
  if (bounds.size() != n) throw std::invalid_argument("bounds and start point dimensions differ");
  OptimizerResult res;
  std::vector<std::vector<double>> simplex(n + 1, clamp_into(x0, bounds));
  for (std::size_t d = 0; d < n; ++d) {
    const double step = 0.05 * (bounds[d].second - bounds[d].first);
    simplex[d + 1][d] += (simplex[d + 1][d] + step <= bounds[d].second) ? step : -step;
    simplex[d + 1] = clamp_into(simplex[d + 1], bounds);
  }
  std::vector<double> fv(n + 1);
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  int it = 0;
  for (; it < max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::abs(fv[worst] - fv[best]) <= ftol * (1.0 + std::abs(fv[best]))) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[order[k]][d] / static_cast<double>(n);
    const auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return clamp_into(x, bounds);
    };
    const std::vector<double> xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const std::vector<double> xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
    } else {
      const std::vector<double> xc = fr < fv[worst] ? along(-0.5) : along(0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          const std::size_t idx = order[k];
          for (std::size_t d = 0; d < n; ++d) simplex[idx][d] = simplex[best][d] + 0.5 * (simplex[idx][d] - simplex[best][d]);
          fv[idx] = eval(simplex[idx]);
        }
      }
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.value = fv[best];
  res.generations = it;
  return res;
}

void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = nlohmann::json{{"population_factor", c.population_factor},
                     {"crossover_prob", c.crossover_prob},
                     {"differential_weight_range", {c.weight_min, c.weight_max}},
                     {"max_generations", c.max_generations},
                     {"abs_tol", c.abs_tol},
                     {"rel_tol", c.rel_tol},
                     {"polish", c.polish},
                     {"threads", c.threads}};
  if (c.seed) j["seed"] = *c.seed;
  if (!c.bounds.empty()) j["bounds"] = c.bounds;
}

void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  c.population_factor = j.value("population_factor", c.population_factor);
  c.crossover_prob = j.value("crossover_prob", c.crossover_prob);
  if (j.contains("differential_weight_range")) {
    const auto& w = j.at("differential_weight_range");
    c.weight_min = w.at(0).get<double>();
    c.weight_max = w.at(1).get<double>();
  }
  c.max_generations = j.value("max_generations", c.max_generations);
  c.abs_tol = j.value("abs_tol", c.abs_tol);
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.polish = j.value("polish", c.polish);
  c.threads = j.value("threads", c.threads);
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("bounds")) c.bounds = j.at("bounds").get<std::vector<std::pair<double, double>>>();
}

}  // namespace nvholo

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ouq/common.hpp"
#include "ouq/measure.hpp"

namespace ouq {

/// Differential-evolution settings. Defaults follow the classic rand/1/bin
/// scheme with a modest population and stagnation-based termination.
struct OptimizerConfig {
  std::size_t population = 40;
  double mutation = 0.7;          // in (0, 2)
  double crossover = 0.9;         // in [0, 1]
  std::size_t max_generations = 2000;
  std::size_t stagnation_window = 100;  // generations
  double stagnation_tol = 1e-6;
  std::uint64_t seed = 0;
  double constraint_tol = 1e-6;   // absolute, on moment residuals
  std::size_t repair_rounds = 6;  // penalty-weight escalations
  std::size_t repair_iters = 60;  // pattern-search sweeps per round

  void validate() const {
    if (population < 4) throw InvalidArgument("OptimizerConfig: population must be >= 4");
    if (!(mutation > 0.0 && mutation < 2.0))
      throw InvalidArgument("OptimizerConfig: mutation must be in (0,2)");
    if (!(crossover >= 0.0 && crossover <= 1.0))
      throw InvalidArgument("OptimizerConfig: crossover must be in [0,1]");
    if (!(constraint_tol > 0.0 && stagnation_tol > 0.0))
      throw InvalidArgument("OptimizerConfig: tolerances must be positive");
  }
};

/// Per-generation progress record. Best objective is monotone
/// non-decreasing across generations for a maximization run.
struct ConvergenceTrace {
  struct Row {
    std::size_t generation = 0;
    double best_value = 0.0;
    double residual = 0.0;
    std::size_t evals = 0;  // cumulative objective evaluations
    double seconds = 0.0;
  };
  std::vector<Row> rows;
};

/// Constraint evaluator: residual(x) is the worst absolute violation of the
/// decoded candidate, zero when admissible.
using Feasibility = std::function<double(const std::vector<double>&)>;

/// Flat-vector objective; called only on candidates whose residual is
/// within tolerance.
using Objective = std::function<double(const std::vector<double>&)>;

enum class SolveStatus { Converged, MaxGenerations, Infeasible };

struct MaximizeResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> best;        // flat parameter vector
  double best_value = -std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  ConvergenceTrace trace;
  std::size_t evals = 0;
};

namespace detail {

/// Proximal quadratic-penalty repair: starting from the candidate, pattern
/// search on ||z - z0||^2 + w * residual(z)^2 with the weight escalated
/// until the residual meets tolerance or the budget runs out. The weight-only
/// coordinates are tried first so a pure weight imbalance never moves
/// positions.
class Repairer {
 public:
  Repairer(const Feasibility& residual, const std::vector<std::pair<double, double>>& bounds,
           const OptimizerConfig& cfg)
      : residual_(residual), bounds_(bounds), cfg_(cfg) {}

  /// Returns true when the returned vector is feasible.
  bool repair(std::vector<double>& z, const std::vector<std::size_t>& soft_dims_first) const {
    double r = residual_(z);
    if (r <= cfg_.constraint_tol) return true;
    const std::vector<double> anchor = z;
    double weight = 10.0;
    for (std::size_t round = 0; round < cfg_.repair_rounds; ++round, weight *= 10.0) {
      if (!soft_dims_first.empty() && descend(z, anchor, weight, soft_dims_first)) return true;
      std::vector<std::size_t> all(z.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      if (descend(z, anchor, weight, all)) return true;
    }
    return residual_(z) <= cfg_.constraint_tol;
  }

 private:
  double penalty(const std::vector<double>& z, const std::vector<double>& anchor,
                 double weight) const {
    double prox = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double scale = std::max(1e-12, bounds_[i].second - bounds_[i].first);
      const double d = (z[i] - anchor[i]) / scale;
      prox += d * d;
    }
    const double r = residual_(z);
    return prox + weight * r * r;
  }

  bool descend(std::vector<double>& z, const std::vector<double>& anchor, double weight,
               const std::vector<std::size_t>& dims) const {
    double cur = penalty(z, anchor, weight);
    std::vector<double> step(z.size());
    for (std::size_t i : dims) step[i] = 0.25 * (bounds_[i].second - bounds_[i].first);
    for (std::size_t it = 0; it < cfg_.repair_iters; ++it) {
      bool improved = false;
      for (std::size_t i : dims) {
        for (double dir : {+1.0, -1.0}) {
          const double old = z[i];
          z[i] = std::clamp(old + dir * step[i], bounds_[i].first, bounds_[i].second);
          const double cand = penalty(z, anchor, weight);
          if (cand < cur) {
            cur = cand;
            improved = true;
            break;
          }
          z[i] = old;
        }
      }
      if (residual_(z) <= cfg_.constraint_tol) return true;
      if (!improved)
        for (std::size_t i : dims) step[i] *= 0.5;
    }
    return residual_(z) <= cfg_.constraint_tol;
  }

  const Feasibility& residual_;
  const std::vector<std::pair<double, double>>& bounds_;
  const OptimizerConfig& cfg_;
};

}  // namespace detail

/// Repairs a single candidate against the constraints; the vector is
/// returned unchanged when already feasible. `soft_dims` lists parameter
/// indices to adjust first (the raw weights of a measure layout); pass an
/// empty list to go straight to full-space repair.
inline bool repair(std::vector<double>& candidate, const Feasibility& residual,
                   const std::vector<std::pair<double, double>>& bounds,
                   const OptimizerConfig& cfg, const std::vector<std::size_t>& soft_dims = {}) {
  return detail::Repairer(residual, bounds, cfg).repair(candidate, soft_dims);
}

/// Global maximization by differential evolution (rand/1/bin) with
/// repair-before-evaluate constraint handling: the objective is only ever
/// called on candidates whose constraint residual meets tolerance.
/// Deterministic for a fixed seed.
inline MaximizeResult maximize(const Objective& objective, const Feasibility& residual,
                               const std::vector<std::pair<double, double>>& bounds,
                               const OptimizerConfig& cfg,
                               const std::vector<std::size_t>& soft_dims = {}) {
  cfg.validate();
  const std::size_t dim = bounds.size();
  if (dim == 0) throw InvalidArgument("maximize: empty parameter space");
  Rng rng(cfg.seed);
  detail::Repairer repairer(residual, bounds, cfg);
  const auto t0 = std::chrono::steady_clock::now();

  MaximizeResult out;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> pop(cfg.population, std::vector<double>(dim));
  std::vector<double> fitness(cfg.population, neg_inf);
  std::vector<char> feasible(cfg.population, 0);

  for (std::size_t i = 0; i < cfg.population; ++i) {
    for (std::size_t j = 0; j < dim; ++j) pop[i][j] = rng.uniform(bounds[j].first, bounds[j].second);
    if (repairer.repair(pop[i], soft_dims)) {
      feasible[i] = 1;
      fitness[i] = objective(pop[i]);
      ++out.evals;
    }
    const double r = residual(pop[i]);
    out.best_residual = std::min(out.best_residual, r);
  }

  auto record = [&](std::size_t gen) {
    std::size_t bi = 0;
    for (std::size_t i = 1; i < cfg.population; ++i)
      if (fitness[i] > fitness[bi]) bi = i;
    ConvergenceTrace::Row row;
    row.generation = gen;
    row.best_value = fitness[bi];
    row.residual = feasible[bi] ? residual(pop[bi]) : out.best_residual;
    row.evals = out.evals;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.trace.rows.push_back(row);
    return bi;
  };

  std::size_t best_i = record(0);
  if (!feasible[best_i]) {
    out.status = SolveStatus::Infeasible;
    out.best = pop[best_i];
    return out;
  }

  std::vector<double> trial(dim);
  out.status = SolveStatus::MaxGenerations;
  for (std::size_t gen = 1; gen <= cfg.max_generations; ++gen) {
    for (std::size_t i = 0; i < cfg.population; ++i) {
      std::size_t r1, r2, r3;
      do r1 = rng.index(cfg.population); while (r1 == i);
      do r2 = rng.index(cfg.population); while (r2 == i || r2 == r1);
      do r3 = rng.index(cfg.population); while (r3 == i || r3 == r1 || r3 == r2);
      const std::size_t jrand = rng.index(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        if (j == jrand || rng.uniform() < cfg.crossover) {
          double v = pop[r1][j] + cfg.mutation * (pop[r2][j] - pop[r3][j]);
          trial[j] = std::clamp(v, bounds[j].first, bounds[j].second);
        } else {
          trial[j] = pop[i][j];
        }
      }
      if (!repairer.repair(trial, soft_dims)) continue;  // excluded from selection
      const double f = objective(trial);
      ++out.evals;
      if (f >= fitness[i]) {
        pop[i] = trial;
        fitness[i] = f;
        feasible[i] = 1;
      }
    }
    best_i = record(gen);
    const auto& rows = out.trace.rows;
    if (rows.size() > cfg.stagnation_window) {
      const double then = rows[rows.size() - 1 - cfg.stagnation_window].best_value;
      if (rows.back().best_value - then <= cfg.stagnation_tol) {
        out.status = SolveStatus::Converged;
        break;
      }
    }
  }

  out.best = pop[best_i];
  out.best_value = fitness[best_i];
  out.best_residual = residual(pop[best_i]);
  if (out.best_residual > cfg.constraint_tol) out.status = SolveStatus::Infeasible;
  return out;
}

/// Convenience overload working over a measure layout: parameter bounds come
/// from the layout and constraint repair adjusts raw weights before
/// positions.
inline MaximizeResult maximize(const Objective& objective, const Feasibility& residual,
                               const ParamLayout& layout, const OptimizerConfig& cfg) {
  return maximize(objective, residual, layout.parameter_bounds(), cfg,
                  layout.weight_parameter_indices());
}

/// Writes a trace as CSV: generation, best_value, residual, evals, seconds.
inline std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::string s = "generation,best_value,residual,evals,seconds\n";
  char buf[160];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%zu,%.6f\n", r.generation, r.best_value,
                  r.residual, r.evals, r.seconds);
    s += buf;
  }
  return s;
}

}  // namespace ouq

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ouq/problem.hpp"
#include "ouq/solve.hpp"

namespace ouq {

/// A measurable quantity a proposed experiment would determine: the
/// probability of an input event, the mean of an input expression, or the
/// variance or median of one axis. Evaluable exactly on finite-support
/// measures; each outcome value converts to moment constraints so the
/// what-if problems stay reducible.
struct ExperimentFunctional {
  struct InputEventProbability {
    std::size_t axis = 0;
    Direction dir = Direction::GreaterEqual;
    double threshold = 0.0;
  };
  struct MeanOfExpression {
    std::shared_ptr<const ExpressionAst> expr;
  };
  struct VarianceOfAxis {
    std::size_t axis = 0;
  };
  struct MedianOfAxis {
    std::size_t axis = 0;
  };
  using Kind = std::variant<InputEventProbability, MeanOfExpression, VarianceOfAxis, MedianOfAxis>;

  std::string name;
  Kind kind;
  std::vector<double> outcome_grid;  // what-if scan values; may be empty

  double evaluate(const ProductMeasure& pm) const {
    if (const auto* ev = std::get_if<InputEventProbability>(&kind)) {
      const Marginal& mg = pm.marginal(ev->axis);
      double p = 0.0;
      for (std::size_t j = 0; j < mg.size(); ++j) {
        const bool hit = ev->dir == Direction::LessEqual ? mg.positions()[j] <= ev->threshold
                                                         : mg.positions()[j] >= ev->threshold;
        if (hit) p += mg.weights()[j];
      }
      return p;
    }
    if (const auto* me = std::get_if<MeanOfExpression>(&kind))
      return expectation(pm, [&](const std::vector<double>& x) { return me->expr->evaluate(x); });
    if (const auto* va = std::get_if<VarianceOfAxis>(&kind)) {
      const Marginal& mg = pm.marginal(va->axis);
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t j = 0; j < mg.size(); ++j) {
        const double x = mg.positions()[j];
        m1 += mg.weights()[j] * x;
        m2 += mg.weights()[j] * x * x;
      }
      return m2 - m1 * m1;
    }
    const auto& md = std::get<MedianOfAxis>(kind);
    const Marginal& mg = pm.marginal(md.axis);
    std::vector<std::size_t> order(mg.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mg.positions()[a] < mg.positions()[b];
    });
    double cum = 0.0;
    for (std::size_t j : order) {
      cum += mg.weights()[j];
      if (cum >= 0.5) return mg.positions()[j];
    }
    return mg.positions()[order.back()];
  }

  /// The moment constraints pinning this functional to the outcome c.
  std::vector<MomentConstraint> outcome_constraints(double c) const {
    if (const auto* ev = std::get_if<InputEventProbability>(&kind))
      return {MomentConstraint::input_event(ev->axis, ev->dir, ev->threshold, c, c)};
    if (const auto* me = std::get_if<MeanOfExpression>(&kind))
      return {MomentConstraint::expression(me->expr, c, c, name + " = outcome")};
    if (const auto* va = std::get_if<VarianceOfAxis>(&kind))
      return {MomentConstraint::variance(va->axis, c, c)};
    return MomentConstraint::median(std::get<MedianOfAxis>(kind).axis, c);
  }

  /// A default what-if grid over the attainable range of the functional.
  std::vector<double> default_grid(const BoxDomain& box, std::size_t n = 11) const {
    double lo = 0.0, hi = 1.0;
    if (const auto* me = std::get_if<MeanOfExpression>(&kind)) {
      // single-axis expressions scan the axis range; general expressions
      // need an explicit grid
      const std::size_t top = me->expr->max_variable();
      if (top >= 1 && me->expr->depends_only_on(top - 1)) {
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double t = static_cast<double>(i) / static_cast<double>(n - 1);
          const double x = box.axis(top - 1).lo + t * box.axis(top - 1).width();
          g[i] = me->expr->evaluate(std::vector<double>(box.dimension(), x));
        }
        std::sort(g.begin(), g.end());
        return g;
      }
      throw InvalidArgument("ExperimentFunctional: general expression needs an explicit grid");
    }
    if (const auto* va = std::get_if<VarianceOfAxis>(&kind)) {
      const double w = box.axis(va->axis).width();
      lo = 0.0;
      hi = 0.25 * w * w;
    } else if (const auto* md = std::get_if<MedianOfAxis>(&kind)) {
      lo = box.axis(md->axis).lo;
      hi = box.axis(md->axis).hi;
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
  }
};

/// Closed interval of functional values; empty when the partition it spans
/// is itself empty.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct SafeUnsafeIntervals {
  std::optional<Interval> safe;
  std::optional<Interval> unsafe;
};

namespace detail {

inline std::optional<double> optimize_functional(const AdmissibleProblem& problem,
                                                 const ExperimentFunctional& phi, bool maximize_phi,
                                                 const OptimizerConfig& cfg) {
  ReducedProblem rp = reduce(problem);
  if (rp.route != ReductionRoute::DiracProduct)
    throw InvalidArgument("experiment intervals need a known response (product-measure route)");
  ProblemEvaluator eval(rp);
  const double sign = maximize_phi ? 1.0 : -1.0;
  Objective objective = [&](const std::vector<double>& v) {
    return sign * phi.evaluate(rp.layout.decode(v));
  };
  Feasibility residual = [&](const std::vector<double>& v) {
    return eval.residual(rp.layout.decode(v));
  };
  MaximizeResult r = maximize(objective, residual, rp.layout, cfg);
  if (r.status == SolveStatus::Infeasible) return std::nullopt;
  return sign * r.best_value;
}

}  // namespace detail

/// The closed convex hulls of the functional's range over the safe and the
/// unsafe partitions of the admissible set (four optimizations). The unsafe
/// side's strict inequality is realized as >= epsilon + 1e-9.
inline SafeUnsafeIntervals safe_unsafe_intervals(const AdmissibleProblem& problem,
                                                 const ExperimentFunctional& phi, double epsilon,
                                                 const OptimizerConfig& cfg) {
  const auto side_problem = [&](bool safe) {
    AdmissibleProblem p = problem;
    const auto& f = problem.failure;
    const double lo = safe ? 0.0 : epsilon + 1e-9;
    const double hi = safe ? epsilon : 1.0;
    p.constraints.push_back(MomentConstraint::response_event(
        f.dir, f.threshold, lo, hi, safe ? "P(fail) <= eps" : "P(fail) > eps"));
    return p;
  };

  SafeUnsafeIntervals out;
  for (bool safe : {true, false}) {
    const AdmissibleProblem p = side_problem(safe);
    OptimizerConfig c = cfg;
    auto lo = detail::optimize_functional(p, phi, false, c);
    ++c.seed;
    auto hi = detail::optimize_functional(p, phi, true, c);
    std::optional<Interval> iv;
    if (lo && hi) iv = Interval{std::min(*lo, *hi), std::max(*lo, *hi)};
    (safe ? out.safe : out.unsafe) = iv;
  }
  if (!out.safe && !out.unsafe)
    throw Error("safe_unsafe_intervals: both partitions are empty (contradictory epsilon)");
  return out;
}

/// Outcome classification against the two intervals (closed membership).
enum class OutcomeClass { NoConclusion, Safe, Unsafe, FaultyAssumptions };

inline const char* to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::NoConclusion: return "no-conclusion";
    case OutcomeClass::Safe: return "safe";
    case OutcomeClass::Unsafe: return "unsafe";
    default: return "faulty-assumptions";
  }
}

inline OutcomeClass classify_outcome(double value, const std::optional<Interval>& safe,
                                     const std::optional<Interval>& unsafe) {
  const bool in_safe = safe && safe->contains(value);
  const bool in_unsafe = unsafe && unsafe->contains(value);
  if (in_safe && in_unsafe) return OutcomeClass::NoConclusion;
  if (in_safe) return OutcomeClass::Safe;
  if (in_unsafe) return OutcomeClass::Unsafe;
  return OutcomeClass::FaultyAssumptions;
}

/// Worst-case prediction-interval width of one candidate experiment, with
/// the per-outcome bound curves kept for plotting.
struct ExperimentScore {
  std::string name;
  double score = 0.0;  // sup over outcomes of (U - L)
  std::vector<double> outcomes;
  std::vector<double> upper;
  std::vector<double> lower;
};

/// Ranks candidate experiments by their worst-case post-outcome prediction
/// gap sup_c (U(A_{E,c}) - L(A_{E,c})), most predictive (smallest) first.
/// Infeasible outcome cells are impossible under the admissible set and
/// contribute gap zero.
inline std::vector<ExperimentScore> most_predictive_experiment(
    const AdmissibleProblem& problem, const std::vector<ExperimentFunctional>& experiments,
    const OptimizerConfig& cfg) {
  std::vector<ExperimentScore> scores;
  for (const auto& phi : experiments) {
    ExperimentScore s;
    s.name = phi.name;
    s.outcomes = phi.outcome_grid.empty() ? phi.default_grid(problem.domain) : phi.outcome_grid;
    for (double c : s.outcomes) {
      AdmissibleProblem p = problem;
      for (auto& mc : phi.outcome_constraints(c)) p.constraints.push_back(std::move(mc));
      OptimizerConfig cu = cfg;
      BoundResult u = solve_upper(p, cu);
      OptimizerConfig cl = cfg;
      ++cl.seed;
      BoundResult l = solve_lower(p, cl);
      if (u.status == SolveStatus::Infeasible || l.status == SolveStatus::Infeasible) {
        s.upper.push_back(0.0);
        s.lower.push_back(0.0);
      } else {
        s.upper.push_back(u.value);
        s.lower.push_back(l.value);
      }
      s.score = std::max(s.score, s.upper.back() - s.lower.back());
    }
    scores.push_back(std::move(s));
  }
  std::stable_sort(scores.begin(), scores.end(), [](const ExperimentScore& a, const ExperimentScore& b) {
    return a.score < b.score;
  });
  return scores;
}

}  // namespace ouq

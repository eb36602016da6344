#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ouq/inequalities.hpp"
#include "ouq/optimizer.hpp"
#include "ouq/problem.hpp"

namespace ouq {

enum class BoundDirection { Upper, Lower };

inline const char* to_string(BoundDirection d) {
  return d == BoundDirection::Upper ? "upper" : "lower";
}

/// One optimal-bound solve: the value, the extremal measure that attains it
/// (product-measure route only), and the run's trace and seed.
struct BoundResult {
  double value = 0.0;
  BoundDirection direction = BoundDirection::Upper;
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<ProductMeasure> extremal;
  ConvergenceTrace trace;
  std::uint64_t seed = 0;
  std::string regime;  // closed-form branch when the hypercube route fired
};

namespace detail {

/// Shared evaluation engine for a reduced product-measure problem: decodes
/// candidates and computes the failure probability and all constraint
/// moments with a single pass over the support atoms.
class ProblemEvaluator {
 public:
  explicit ProblemEvaluator(const ReducedProblem& rp) : rp_(rp) {
    if (rp.route != ReductionRoute::DiracProduct)
      throw InvalidArgument("ProblemEvaluator: product-measure route only");
  }

  const ParamLayout& layout() const { return rp_.layout; }

  double failure_probability(const ProductMeasure& pm) const {
    const auto& model = rp_.problem.model();
    const auto& fail = rp_.problem.failure;
    return event_probability(pm, [&](const std::vector<double>& x) { return fail.holds(model(x)); });
  }

  /// Worst absolute violation over all constraints; 0 when admissible.
  double residual(const ProductMeasure& pm) const {
    double worst = 0.0;
    // response-dependent moments share one sweep over the atoms
    std::vector<const MomentConstraint*> response_cs;
    for (const auto& c : rp_.problem.constraints) {
      if (std::holds_alternative<MomentConstraint::ResponseValue>(c.integrand) ||
          std::holds_alternative<MomentConstraint::ResponseEvent>(c.integrand) ||
          std::holds_alternative<MomentConstraint::InputExpression>(c.integrand))
        response_cs.push_back(&c);
    }
    if (!response_cs.empty()) {
      std::vector<double> acc(response_cs.size(), 0.0);
      const ResponseModel* model =
          rp_.problem.has_known_response() ? &rp_.problem.model() : nullptr;
      for_each_atom(pm, [&](const std::vector<double>& x, double w) {
        double fx = 0.0;
        bool have_fx = false;
        for (std::size_t i = 0; i < response_cs.size(); ++i) {
          const auto& c = *response_cs[i];
          if (const auto* rv = std::get_if<MomentConstraint::ResponseValue>(&c.integrand)) {
            (void)rv;
            if (!have_fx) {
              fx = (*model)(x);
              have_fx = true;
            }
            acc[i] += w * fx;
          } else if (const auto* re = std::get_if<MomentConstraint::ResponseEvent>(&c.integrand)) {
            if (!have_fx) {
              fx = (*model)(x);
              have_fx = true;
            }
            const bool hit = re->dir == Direction::LessEqual ? fx <= re->threshold
                                                             : fx >= re->threshold;
            acc[i] += hit ? w : 0.0;
          } else {
            const auto& xe = std::get<MomentConstraint::InputExpression>(c.integrand);
            acc[i] += w * xe.expr->evaluate(x);
          }
        }
      });
      for (std::size_t i = 0; i < response_cs.size(); ++i)
        worst = std::max(worst, violation(*response_cs[i], acc[i]));
    }
    // factor-scoped moments work on single marginals
    for (const auto& c : rp_.problem.constraints) {
      if (const auto* ev = std::get_if<MomentConstraint::InputEvent>(&c.integrand)) {
        const Marginal& mg = pm.marginal(ev->axis);
        double p = 0.0;
        for (std::size_t j = 0; j < mg.size(); ++j) {
          const bool hit = ev->dir == Direction::LessEqual ? mg.positions()[j] <= ev->threshold
                                                           : mg.positions()[j] >= ev->threshold;
          if (hit) p += mg.weights()[j];
        }
        worst = std::max(worst, violation(c, p));
      } else if (const auto* mo = std::get_if<MomentConstraint::InputMoment>(&c.integrand)) {
        const Marginal& mg = pm.marginal(mo->axis);
        double s = 0.0;
        for (std::size_t j = 0; j < mg.size(); ++j) {
          const double x = mg.positions()[j];
          s += mg.weights()[j] * (mo->power == 2 ? x * x : x);
        }
        worst = std::max(worst, violation(c, s));
      } else if (const auto* va = std::get_if<MomentConstraint::AxisVariance>(&c.integrand)) {
        const Marginal& mg = pm.marginal(va->axis);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < mg.size(); ++j) {
          const double x = mg.positions()[j];
          m1 += mg.weights()[j] * x;
          m2 += mg.weights()[j] * x * x;
        }
        worst = std::max(worst, violation(c, m2 - m1 * m1));
      }
    }
    return worst;
  }

  static double violation(const MomentConstraint& c, double value) {
    double v = 0.0;
    if (std::isfinite(c.lo)) v = std::max(v, c.lo - value);
    if (std::isfinite(c.hi)) v = std::max(v, value - c.hi);
    return v;
  }

 private:
  const ReducedProblem& rp_;
};

/// Upper/lower bound for the oscillation-class (hypercube) route via the
/// closed-form optimal inequalities.
inline BoundResult solve_hypercube(const ReducedProblem& rp, BoundDirection dir) {
  const auto& oc = rp.problem.oscillation_class();
  if (!rp.problem.constraints.empty())
    throw InvalidArgument("solve: extra constraints on an oscillation-class problem are not "
                          "supported on the hypercube route (offending: '" +
                          rp.problem.constraints.front().label + "')");
  const auto& fail = rp.problem.failure;
  BoundResult out;
  out.direction = dir;
  out.status = SolveStatus::Converged;
  // Normalize the failure event to g >= t with E[g] in [b_lo, b_hi].
  const bool ge = fail.dir == Direction::GreaterEqual;
  const double t = ge ? fail.threshold : -fail.threshold;
  const double blo = ge ? oc.mean_lo : -oc.mean_hi;
  const double bhi = ge ? oc.mean_hi : -oc.mean_lo;
  if (dir == BoundDirection::Upper) {
    OptimalBoundResult r = optimal_mcdiarmid(t, oc.diameters, bhi);
    out.value = r.value;
    out.regime = r.regime;
  } else {
    // inf mu[g >= t] = 1 - sup mu[g < t]; the complement is the mirrored
    // problem with the most favorable admissible mean.
    OptimalBoundResult r = optimal_mcdiarmid(-t, oc.diameters, -blo);
    out.value = std::clamp(1.0 - r.value, 0.0, 1.0);
    out.regime = "complement-of-" + r.regime;
  }
  return out;
}

}  // namespace detail

/// Optimal bound on the failure probability over the admissible set, by
/// differential evolution over the reduced measure parameters (known
/// response) or by the closed-form inequalities (oscillation class).
inline BoundResult solve_bound(const AdmissibleProblem& problem, BoundDirection dir,
                               const OptimizerConfig& cfg) {
  ReducedProblem rp = reduce(problem);
  if (rp.route == ReductionRoute::Hypercube) return detail::solve_hypercube(rp, dir);

  detail::ProblemEvaluator eval(rp);
  const double sign = dir == BoundDirection::Upper ? 1.0 : -1.0;
  Objective objective = [&](const std::vector<double>& v) {
    return sign * eval.failure_probability(rp.layout.decode(v));
  };
  Feasibility residual = [&](const std::vector<double>& v) {
    return eval.residual(rp.layout.decode(v));
  };
  MaximizeResult r = maximize(objective, residual, rp.layout, cfg);

  BoundResult out;
  out.direction = dir;
  out.status = r.status;
  out.trace = std::move(r.trace);
  out.seed = cfg.seed;
  if (r.status == SolveStatus::Infeasible) return out;
  out.value = std::clamp(sign * r.best_value, 0.0, 1.0);
  out.extremal = rp.layout.decode(r.best);
  return out;
}

inline BoundResult solve_upper(const AdmissibleProblem& problem, const OptimizerConfig& cfg) {
  return solve_bound(problem, BoundDirection::Upper, cfg);
}

inline BoundResult solve_lower(const AdmissibleProblem& problem, const OptimizerConfig& cfg) {
  return solve_bound(problem, BoundDirection::Lower, cfg);
}

/// Repeats a solve over consecutive seeds and keeps the extreme result
/// (max for upper bounds, min for lower bounds).
inline BoundResult solve_multi_seed(const AdmissibleProblem& problem, BoundDirection dir,
                                    OptimizerConfig cfg, std::size_t seeds) {
  std::optional<BoundResult> best;
  for (std::size_t i = 0; i < seeds; ++i, ++cfg.seed) {
    BoundResult r = solve_bound(problem, dir, cfg);
    if (r.status == SolveStatus::Infeasible) {
      if (!best) best = std::move(r);
      continue;
    }
    const bool better = !best || best->status == SolveStatus::Infeasible ||
                        (dir == BoundDirection::Upper ? r.value > best->value
                                                      : r.value < best->value);
    if (better) best = std::move(r);
  }
  return *best;
}

/// Certification trichotomy.
enum class Verdict { Certify, Decertify, CannotDecide };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certify: return "certify";
    case Verdict::Decertify: return "decertify";
    default: return "cannot-decide";
  }
}

struct CertificationVerdict {
  Verdict verdict = Verdict::CannotDecide;
  double lower = 0.0;
  double upper = 1.0;
  double epsilon = 0.0;
};

/// The optimal certification rule: safe when even the worst case meets
/// epsilon, unsafe when even the best case exceeds it, undecidable in
/// between (boundary L = epsilon is conservatively undecidable).
inline CertificationVerdict certify(double lower, double upper, double epsilon) {
  if (!(lower >= 0.0 && lower <= upper && upper <= 1.0))
    throw InvalidArgument("certify: need 0 <= L <= U <= 1");
  CertificationVerdict out{Verdict::CannotDecide, lower, upper, epsilon};
  if (upper <= epsilon)
    out.verdict = Verdict::Certify;
  else if (epsilon < lower)
    out.verdict = Verdict::Decertify;
  return out;
}

/// Support-collapse schedule: solve with growing per-axis support until the
/// extremal measure uses strictly fewer atoms than allowed on every axis.
struct CoagulationResult {
  BoundResult final_result;
  std::vector<std::size_t> detected_support;  // per axis
  std::size_t stopped_at_atoms = 0;
  bool coagulated = false;  // false: schedule exhausted, no reduction found
};

inline CoagulationResult coagulation_fragmentation(const AdmissibleProblem& problem,
                                                   const std::vector<std::size_t>& k_schedule,
                                                   double weight_tol, const OptimizerConfig& cfg,
                                                   BoundDirection dir = BoundDirection::Upper) {
  if (k_schedule.empty()) throw InvalidArgument("coagulation_fragmentation: empty schedule");
  for (std::size_t i = 1; i < k_schedule.size(); ++i)
    if (k_schedule[i] <= k_schedule[i - 1])
      throw InvalidArgument("coagulation_fragmentation: schedule must be strictly increasing");

  ReducedProblem base = reduce(problem);
  if (base.route != ReductionRoute::DiracProduct)
    throw InvalidArgument("coagulation_fragmentation: product-measure problems only");

  CoagulationResult out;
  for (std::size_t atoms : k_schedule) {
    // Same problem, support forced to `atoms` per free axis.
    std::vector<ParamLayout::AxisSpec> specs;
    for (std::size_t i = 0; i < base.layout.axis_count(); ++i) {
      ParamLayout::AxisSpec s = base.layout.axis_spec(i);
      if (s.atoms > 0) s.atoms = atoms;
      specs.push_back(s);
    }
    ReducedProblem rp{ReductionRoute::DiracProduct, base.support_counts,
                      ParamLayout(std::move(specs)), problem};
    detail::ProblemEvaluator eval(rp);
    const double sign = dir == BoundDirection::Upper ? 1.0 : -1.0;
    Objective objective = [&](const std::vector<double>& v) {
      return sign * eval.failure_probability(rp.layout.decode(v));
    };
    Feasibility residual = [&](const std::vector<double>& v) {
      return eval.residual(rp.layout.decode(v));
    };
    MaximizeResult r = maximize(objective, residual, rp.layout, cfg);

    out.final_result.direction = dir;
    out.final_result.status = r.status;
    out.final_result.seed = cfg.seed;
    out.final_result.trace = std::move(r.trace);
    out.stopped_at_atoms = atoms;
    if (r.status == SolveStatus::Infeasible) return out;
    out.final_result.value = std::clamp(sign * r.best_value, 0.0, 1.0);
    out.final_result.extremal = rp.layout.decode(r.best);
    out.detected_support = effective_support(*out.final_result.extremal, problem.domain, weight_tol);

    // Per-marginal criterion: an axis coagulated when it uses fewer atoms
    // than allowed; a single-atom axis cannot shrink further.
    bool all = true;
    for (std::size_t i = 0; i < out.detected_support.size(); ++i) {
      const std::size_t declared = rp.layout.axis_spec(i).atoms == 0 ? 1 : atoms;
      if (!(declared == 1 || out.detected_support[i] < declared)) all = false;
    }
    if (all) {
      out.coagulated = true;
      return out;
    }
  }
  return out;  // schedule exhausted, no reduction detected
}

}  // namespace ouq

#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ouq/box.hpp"
#include "ouq/common.hpp"
#include "ouq/expr.hpp"
#include "ouq/inequalities.hpp"
#include "ouq/measure.hpp"
#include "ouq/response.hpp"

namespace ouq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Direction of a comparison event.
enum class Direction { LessEqual, GreaterEqual };

inline const char* to_string(Direction d) { return d == Direction::LessEqual ? "le" : "ge"; }

/// One generalized-moment constraint E_mu[g] in [lo, hi] (either side may be
/// infinite), or an almost-sure axis fixing as a special case. The integrand
/// g is one of: the response itself, an indicator event on the response, an
/// expression over the inputs, an indicator event on one input axis, a raw
/// input moment, or the variance of one axis (a function of two input
/// moments, so it costs two support points in the reduction).
struct MomentConstraint {
  struct ResponseValue {};
  struct ResponseEvent {
    Direction dir = Direction::LessEqual;
    double threshold = 0.0;
  };
  struct InputExpression {
    std::shared_ptr<const ExpressionAst> expr;  // shared: constraints are copied around
  };
  struct InputEvent {
    std::size_t axis = 0;
    Direction dir = Direction::LessEqual;
    double threshold = 0.0;
  };
  struct InputMoment {
    std::size_t axis = 0;
    unsigned power = 1;  // 1 or 2
  };
  struct AxisVariance {
    std::size_t axis = 0;
  };
  struct PinAxis {
    std::size_t axis = 0;
    double value = 0.0;
  };
  using Integrand = std::variant<ResponseValue, ResponseEvent, InputExpression, InputEvent,
                                 InputMoment, AxisVariance, PinAxis>;

  Integrand integrand;
  double lo = -kInf;
  double hi = kInf;
  std::string label;  // used in error messages and reports

  static MomentConstraint mean_response(double lo, double hi) {
    return {ResponseValue{}, lo, hi, "mean(response)"};
  }
  static MomentConstraint response_event(Direction dir, double threshold, double lo, double hi,
                                         std::string label = "P(response event)") {
    return {ResponseEvent{dir, threshold}, lo, hi, std::move(label)};
  }
  static MomentConstraint expression(std::shared_ptr<const ExpressionAst> e, double lo, double hi,
                                     std::string label = "E[expr]") {
    return {InputExpression{std::move(e)}, lo, hi, std::move(label)};
  }
  static MomentConstraint input_event(std::size_t axis, Direction dir, double threshold, double lo,
                                      double hi) {
    return {InputEvent{axis, dir, threshold}, lo, hi,
            "P(x" + std::to_string(axis + 1) + (dir == Direction::LessEqual ? " <= " : " >= ") +
                std::to_string(threshold) + ")"};
  }
  static MomentConstraint input_moment(std::size_t axis, unsigned power, double lo, double hi) {
    return {InputMoment{axis, power}, lo, hi,
            "E[x" + std::to_string(axis + 1) + (power == 2 ? "^2]" : "]")};
  }
  static MomentConstraint variance(std::size_t axis, double lo, double hi) {
    return {AxisVariance{axis}, lo, hi, "var(x" + std::to_string(axis + 1) + ")"};
  }
  static MomentConstraint pin(std::size_t axis, double value) {
    return {PinAxis{axis, value}, value, value,
            "x" + std::to_string(axis + 1) + " = " + std::to_string(value) + " a.s."};
  }

  /// Expands a median constraint into its two event-probability halves.
  static std::vector<MomentConstraint> median(std::size_t axis, double value) {
    return {input_event(axis, Direction::LessEqual, value, 0.5, kInf),
            input_event(axis, Direction::GreaterEqual, value, 0.5, kInf)};
  }

  bool is_pin() const { return std::holds_alternative<PinAxis>(integrand); }

  /// Axis index when the integrand is factor-scoped; nullopt for
  /// global-scope integrands (response moments, multi-axis expressions).
  std::optional<std::size_t> factor_axis() const {
    if (const auto* e = std::get_if<InputEvent>(&integrand)) return e->axis;
    if (const auto* p = std::get_if<InputMoment>(&integrand)) return p->axis;
    if (const auto* v = std::get_if<AxisVariance>(&integrand)) return v->axis;
    if (const auto* pin = std::get_if<PinAxis>(&integrand)) return pin->axis;
    if (const auto* x = std::get_if<InputExpression>(&integrand)) {
      const std::size_t top = x->expr->max_variable();
      if (top >= 1 && x->expr->depends_only_on(top - 1)) return top - 1;
      return std::nullopt;
    }
    return std::nullopt;
  }

  /// Support points the constraint costs in the reduction theorem
  /// (an interval pair counts once; variance is a function of two moments).
  std::size_t reduction_cost() const {
    return std::holds_alternative<AxisVariance>(integrand) ? 2 : 1;
  }
};

/// Failure event: comparison of the response against a threshold. Ties
/// count as failures (the conservative convention for upper bounds).
struct FailureEvent {
  Direction dir = Direction::GreaterEqual;
  double threshold = 0.0;
  bool strict = false;  // strict comparisons are recorded but solved as closed

  bool holds(double response_value) const {
    return dir == Direction::GreaterEqual ? response_value >= threshold
                                          : response_value <= threshold;
  }
};

/// How the response is known: exactly, or only through its component-wise
/// oscillations and a mean interval.
struct OscillationClass {
  DiameterVector diameters;
  double mean_lo = 0.0;
  double mean_hi = 0.0;
};

/// The full information set: domain, response knowledge, moment
/// constraints, failure event and (optionally) the acceptable failure
/// probability. Immutable in spirit; treat as a value.
struct AdmissibleProblem {
  BoxDomain domain;
  std::variant<ResponseModel, OscillationClass> response;
  std::vector<MomentConstraint> constraints;
  FailureEvent failure;
  std::optional<double> epsilon;

  bool has_known_response() const { return std::holds_alternative<ResponseModel>(response); }
  const ResponseModel& model() const { return std::get<ResponseModel>(response); }
  const OscillationClass& oscillation_class() const { return std::get<OscillationClass>(response); }

  void validate() const {
    if (!std::isfinite(failure.threshold))
      throw InvalidArgument("AdmissibleProblem: failure threshold must be finite");
    const std::size_t m = domain.dimension();
    if (has_known_response() && model().dimension() != m)
      throw InvalidArgument("AdmissibleProblem: response and domain dimensions differ");
    if (!has_known_response() && oscillation_class().diameters.size() != m)
      throw InvalidArgument("AdmissibleProblem: diameter vector and domain dimensions differ");
    for (const auto& c : constraints) {
      if (c.lo > c.hi) throw InvalidArgument("constraint '" + c.label + "': lo > hi");
      if (auto ax = c.factor_axis(); ax && *ax >= m)
        throw InvalidArgument("constraint '" + c.label + "' references axis " +
                              std::to_string(*ax + 1) + " beyond dimension " + std::to_string(m));
      if (const auto* x = std::get_if<MomentConstraint::InputExpression>(&c.integrand)) {
        if (x->expr->max_variable() > m)
          throw InvalidArgument("constraint '" + c.label + "' references a variable beyond x" +
                                std::to_string(m));
      }
      if (const auto* p = std::get_if<MomentConstraint::InputMoment>(&c.integrand)) {
        if (p->power != 1 && p->power != 2)
          throw InvalidArgument("constraint '" + c.label + "': moment power must be 1 or 2");
      }
      if (const auto* pin = std::get_if<MomentConstraint::PinAxis>(&c.integrand)) {
        if (!domain.axis(pin->axis).contains(pin->value))
          throw InvalidArgument("constraint '" + c.label + "': pinned value outside the axis");
      }
    }
  }
};

/// Which finite-dimensional form a problem reduces to.
enum class ReductionRoute { DiracProduct, Hypercube };

/// Outcome of the reduction theorem: per-axis support counts
/// k_i = n' + n_i + 1, the induced parameter layout, and the route.
struct ReducedProblem {
  ReductionRoute route = ReductionRoute::DiracProduct;
  std::vector<std::size_t> support_counts;  // k_i (1 for pinned axes)
  ParamLayout layout;
  AdmissibleProblem problem;
};

/// Applies the finite-reduction theorem. Product-measure problems with a
/// known response reduce to per-axis Dirac combinations with
/// k_i = n' + n_i + 1 support points; oscillation-class problems whose
/// constraints are all moments of the response reduce further to the
/// discrete hypercube and are routed to the closed-form module.
inline ReducedProblem reduce(const AdmissibleProblem& problem) {
  problem.validate();
  const std::size_t m = problem.domain.dimension();

  if (!problem.has_known_response()) {
    // Hypercube route: every constraint must be a moment of a function of
    // the response; the built-in mean interval already is, anything
    // factor- or input-scoped is not.
    for (const auto& c : problem.constraints) {
      if (!std::holds_alternative<MomentConstraint::ResponseValue>(c.integrand) &&
          !std::holds_alternative<MomentConstraint::ResponseEvent>(c.integrand))
        throw InvalidArgument("reduce: constraint '" + c.label +
                              "' is not a moment of the response; the oscillation-class "
                              "problem does not reduce to the hypercube");
    }
    std::vector<ParamLayout::AxisSpec> specs;
    for (const auto& ax : problem.domain.axes()) specs.push_back({ax, 2, 0.0});
    return ReducedProblem{ReductionRoute::Hypercube, std::vector<std::size_t>(m, 2),
                          ParamLayout(std::move(specs)), problem};
  }

  std::size_t global = 0;                  // n'
  std::vector<std::size_t> factor(m, 0);   // n_i
  std::vector<std::optional<double>> pins(m);
  for (const auto& c : problem.constraints) {
    if (const auto* pin = std::get_if<MomentConstraint::PinAxis>(&c.integrand)) {
      pins[pin->axis] = pin->value;
      continue;
    }
    if (auto ax = c.factor_axis())
      factor[*ax] += c.reduction_cost();
    else
      global += c.reduction_cost();
  }

  std::vector<ParamLayout::AxisSpec> specs;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < m; ++i) {
    if (pins[i]) {
      specs.push_back({problem.domain.axis(i), 0, *pins[i]});
      counts.push_back(1);
    } else {
      const std::size_t k = global + factor[i] + 1;
      specs.push_back({problem.domain.axis(i), k, 0.0});
      counts.push_back(k);
    }
  }
  return ReducedProblem{ReductionRoute::DiracProduct, std::move(counts),
                        ParamLayout(std::move(specs)), problem};
}

}  // namespace ouq

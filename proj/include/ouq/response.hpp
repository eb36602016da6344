#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ouq/box.hpp"
#include "ouq/common.hpp"
#include "ouq/expr.hpp"

namespace ouq {

/// Fitted coefficients of the hypervelocity-impact perforation surrogate.
/// Defaults are the published least-squares fit against 56 experiments.
struct SurrogateParams {
  double H0 = 0.5794;   // km/s
  double s = 1.4004;
  double n = 0.4482;
  double K = 10.3936;   // mm^2
  double p = 0.4757;
  double u = 1.0275;
  double m = 0.4682;
  double Dp = 1.778;    // projectile diameter, mm

  void validate() const {
    const double vals[] = {H0, s, n, K, p, u, m, Dp};
    for (double v : vals)
      if (!(v > 0.0)) throw InvalidArgument("SurrogateParams: all parameters must be positive");
  }
};

/// Impact speed below which the surrogate predicts zero perforation area.
/// h in mm, theta in radians.
inline double ballistic_limit(double h, double theta, const SurrogateParams& prm = {}) {
  if (!(h > 0.0)) throw InvalidArgument("ballistic_limit: h must be positive");
  const double c = std::cos(theta);
  if (!(std::abs(theta) < 1.5707963267948966 && c > 0.0))
    throw DomainError("ballistic_limit: cos(theta) must be positive");
  return prm.H0 * std::pow(h / std::pow(c, prm.n), prm.s);
}

/// Perforation area in mm^2 for plate thickness h [mm], obliquity theta
/// [rad] and impact speed v [km/s]. Non-negative on the whole box; zero
/// exactly when v does not exceed the ballistic limit.
inline double perforation_area(double h, double theta, double v, const SurrogateParams& prm = {}) {
  const double vbl = ballistic_limit(h, theta, prm);
  const double gate = pos(std::tanh(v / vbl - 1.0));
  return prm.K * std::pow(h / prm.Dp, prm.p) * std::pow(std::cos(theta), prm.u) *
         std::pow(gate, prm.m);
}

/// Evaluatable response function over a box domain: either the built-in
/// surrogate or a parsed arithmetic expression. Immutable and reentrant.
class ResponseModel {
 public:
  static ResponseModel surrogate(SurrogateParams prm = {}, BoxDomain box = impact_box()) {
    prm.validate();
    if (box.dimension() != 3)
      throw InvalidArgument("ResponseModel: surrogate needs a 3-axis domain (h, theta, v)");
    return ResponseModel(std::move(box), Surrogate{prm});
  }

  static ResponseModel expression(const std::string& text, BoxDomain box) {
    ExpressionAst ast = ExpressionAst::parse(text, box.dimension());
    return ResponseModel(std::move(box), std::move(ast));
  }

  static ResponseModel expression(ExpressionAst ast, BoxDomain box) {
    if (ast.max_variable() > box.dimension())
      throw InvalidArgument("ResponseModel: expression uses more variables than the domain has axes");
    return ResponseModel(std::move(box), std::move(ast));
  }

  const BoxDomain& box() const { return box_; }
  std::size_t dimension() const { return box_.dimension(); }

  bool is_surrogate() const { return std::holds_alternative<Surrogate>(impl_); }
  const SurrogateParams& surrogate_params() const { return std::get<Surrogate>(impl_).prm; }
  const ExpressionAst& ast() const { return std::get<ExpressionAst>(impl_); }

  double operator()(const std::vector<double>& x) const {
    if (const auto* s = std::get_if<Surrogate>(&impl_))
      return perforation_area(x.at(0), x.at(1), x.at(2), s->prm);
    return std::get<ExpressionAst>(impl_).evaluate(x);
  }

 private:
  struct Surrogate {
    SurrogateParams prm;
  };

  ResponseModel(BoxDomain box, Surrogate s) : box_(std::move(box)), impl_(std::move(s)) {}
  ResponseModel(BoxDomain box, ExpressionAst ast) : box_(std::move(box)), impl_(std::move(ast)) {}

  BoxDomain box_;
  std::variant<Surrogate, ExpressionAst> impl_;
};

}  // namespace ouq

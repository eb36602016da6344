#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ouq/experiments.hpp"
#include "ouq/problem.hpp"
#include "ouq/solve.hpp"

namespace ouq {

using nlohmann::json;

/// Input-file error with the JSON pointer (or byte offset) of the problem.
class SpecError : public Error {
 public:
  SpecError(const std::string& where, const std::string& what)
      : Error("spec error at " + where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// ---------------------------------------------------------------------------
// measures

inline json to_json(const ProductMeasure& pm) {
  json marginals = json::array();
  for (const auto& mg : pm.marginals())
    marginals.push_back(json{{"positions", mg.positions()}, {"weights", mg.weights()}});
  return json{{"marginals", marginals}};
}

inline ProductMeasure measure_from_json(const json& j) {
  if (!j.contains("marginals") || !j["marginals"].is_array() || j["marginals"].empty())
    throw SpecError("/marginals", "expected a non-empty array");
  std::vector<Marginal> marginals;
  for (std::size_t i = 0; i < j["marginals"].size(); ++i) {
    const json& m = j["marginals"][i];
    const std::string at = "/marginals/" + std::to_string(i);
    if (!m.contains("positions") || !m.contains("weights"))
      throw SpecError(at, "marginal needs positions and weights");
    marginals.emplace_back(m["positions"].get<std::vector<double>>(),
                           m["weights"].get<std::vector<double>>());
  }
  return ProductMeasure(std::move(marginals));
}

// ---------------------------------------------------------------------------
// problems

inline Direction direction_from_json(const json& j, const std::string& at) {
  const std::string s = j.get<std::string>();
  if (s == "le" || s == "<=") return Direction::LessEqual;
  if (s == "ge" || s == ">=") return Direction::GreaterEqual;
  throw SpecError(at, "direction must be 'le' or 'ge'");
}

inline BoxDomain box_from_json(const json& j, const std::string& at) {
  if (!j.contains("axes") || !j["axes"].is_array())
    throw SpecError(at + "/axes", "expected an array of {lo, hi, unit}");
  std::vector<Axis> axes;
  for (const auto& a : j["axes"])
    axes.push_back(Axis{a.at("lo").get<double>(), a.at("hi").get<double>(),
                        a.value("unit", std::string{})});
  return BoxDomain(std::move(axes));
}

inline std::vector<MomentConstraint> constraint_from_json(const json& c, const std::string& at,
                                                          std::size_t arity) {
  const std::string kind = c.value("kind", std::string{});
  const double lo = c.value("lo", -kInf);
  const double hi = c.value("hi", kInf);
  if (kind == "mean_response") return {MomentConstraint::mean_response(lo, hi)};
  if (kind == "response_event")
    return {MomentConstraint::response_event(direction_from_json(c.at("direction"), at),
                                             c.at("threshold").get<double>(), lo, hi)};
  if (kind == "expression") {
    auto expr = std::make_shared<ExpressionAst>(
        ExpressionAst::parse(c.at("text").get<std::string>(), arity));
    return {MomentConstraint::expression(std::move(expr), lo, hi,
                                         "E[" + c.at("text").get<std::string>() + "]")};
  }
  if (kind == "input_event")
    return {MomentConstraint::input_event(c.at("axis").get<std::size_t>(),
                                          direction_from_json(c.at("direction"), at),
                                          c.at("threshold").get<double>(), lo, hi)};
  if (kind == "input_moment")
    return {MomentConstraint::input_moment(c.at("axis").get<std::size_t>(),
                                           c.value("power", 1u), lo, hi)};
  if (kind == "variance")
    return {MomentConstraint::variance(c.at("axis").get<std::size_t>(), lo, hi)};
  if (kind == "median")
    return MomentConstraint::median(c.at("axis").get<std::size_t>(), c.at("value").get<double>());
  if (kind == "pin")
    return {MomentConstraint::pin(c.at("axis").get<std::size_t>(), c.at("value").get<double>())};
  throw SpecError(at + "/kind", "unknown constraint kind '" + kind + "'");
}

inline AdmissibleProblem problem_from_json(const json& j) {
  if (!j.contains("domain")) throw SpecError("/domain", "missing");
  BoxDomain box = box_from_json(j["domain"], "/domain");
  if (!j.contains("response") || !j["response"].contains("kind"))
    throw SpecError("/response/kind", "missing");
  const json& r = j["response"];
  const std::string kind = r["kind"].get<std::string>();

  AdmissibleProblem p{box, ResponseModel::expression("0", box), {}, {}, std::nullopt};
  if (kind == "surrogate") {
    SurrogateParams prm;
    if (r.contains("params")) {
      const json& q = r["params"];
      prm.H0 = q.value("H0", prm.H0);
      prm.s = q.value("s", prm.s);
      prm.n = q.value("n", prm.n);
      prm.K = q.value("K", prm.K);
      prm.p = q.value("p", prm.p);
      prm.u = q.value("u", prm.u);
      prm.m = q.value("m", prm.m);
      prm.Dp = q.value("Dp", prm.Dp);
    }
    p.response = ResponseModel::surrogate(prm, box);
  } else if (kind == "expression") {
    p.response = ResponseModel::expression(r.at("text").get<std::string>(), box);
  } else if (kind == "oscillation_class") {
    DiameterVector d(r.at("diameters").get<std::vector<double>>());
    const auto mean = r.at("mean").get<std::vector<double>>();
    if (mean.size() != 2) throw SpecError("/response/mean", "expected [lo, hi]");
    p.response = OscillationClass{std::move(d), mean[0], mean[1]};
  } else {
    throw SpecError("/response/kind", "unknown response kind '" + kind + "'");
  }

  if (j.contains("constraints")) {
    for (std::size_t i = 0; i < j["constraints"].size(); ++i) {
      for (auto& mc : constraint_from_json(j["constraints"][i],
                                           "/constraints/" + std::to_string(i), box.dimension()))
        p.constraints.push_back(std::move(mc));
    }
  }

  if (!j.contains("failure")) throw SpecError("/failure", "missing");
  p.failure.dir = direction_from_json(j["failure"].at("direction"), "/failure/direction");
  p.failure.threshold = j["failure"].at("threshold").get<double>();
  p.failure.strict = j["failure"].value("strict", false);
  if (j.contains("epsilon")) p.epsilon = j["epsilon"].get<double>();
  p.validate();
  return p;
}

inline AdmissibleProblem problem_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, "cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path + " (byte " + std::to_string(e.byte) + ")", e.what());
  }
  return problem_from_json(j);
}

// ---------------------------------------------------------------------------
// experiment functionals

inline ExperimentFunctional functional_from_json(const json& j, std::size_t arity) {
  ExperimentFunctional phi;
  phi.name = j.value("name", std::string{});
  const std::string kind = j.value("kind", std::string{});
  if (kind == "input_event_probability") {
    phi.kind = ExperimentFunctional::InputEventProbability{
        j.at("axis").get<std::size_t>(), direction_from_json(j.at("direction"), "/direction"),
        j.at("threshold").get<double>()};
    if (phi.name.empty()) phi.name = "P(x" + std::to_string(j.at("axis").get<std::size_t>() + 1) + " event)";
  } else if (kind == "mean_expression") {
    auto expr = std::make_shared<ExpressionAst>(
        ExpressionAst::parse(j.at("text").get<std::string>(), arity));
    phi.kind = ExperimentFunctional::MeanOfExpression{std::move(expr)};
    if (phi.name.empty()) phi.name = "E[" + j.at("text").get<std::string>() + "]";
  } else if (kind == "variance") {
    phi.kind = ExperimentFunctional::VarianceOfAxis{j.at("axis").get<std::size_t>()};
    if (phi.name.empty()) phi.name = "var(x" + std::to_string(j.at("axis").get<std::size_t>() + 1) + ")";
  } else if (kind == "median") {
    phi.kind = ExperimentFunctional::MedianOfAxis{j.at("axis").get<std::size_t>()};
    if (phi.name.empty()) phi.name = "median(x" + std::to_string(j.at("axis").get<std::size_t>() + 1) + ")";
  } else {
    throw SpecError("/kind", "unknown functional kind '" + kind + "'");
  }
  if (j.contains("grid")) phi.outcome_grid = j["grid"].get<std::vector<double>>();
  return phi;
}

// ---------------------------------------------------------------------------
// results and manifests

struct RunManifest {
  std::string subcommand;
  std::string spec_path;
  std::vector<std::uint64_t> seeds;
  json config_overrides = json::object();
  std::string output_dir;

  json to_json() const {
    return json{{"tool", "ouq"},          {"version", kVersion},
                {"subcommand", subcommand}, {"spec", spec_path},
                {"seeds", seeds},         {"config", config_overrides},
                {"output_dir", output_dir}};
  }
};

inline json to_json(const BoundResult& r) {
  json j{{"value", r.value},
         {"direction", to_string(r.direction)},
         {"seed", r.seed},
         {"status", r.status == SolveStatus::Infeasible
                        ? "infeasible"
                        : (r.status == SolveStatus::Converged ? "converged" : "max-generations")}};
  if (r.extremal) j["extremal_measure"] = to_json(*r.extremal);
  if (!r.regime.empty()) j["regime"] = r.regime;
  return j;
}

/// Writes a file atomically (temp file in the same directory, then rename).
inline void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << contents;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename " + tmp);
}

}  // namespace ouq

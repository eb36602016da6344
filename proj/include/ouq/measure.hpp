#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "ouq/box.hpp"
#include "ouq/common.hpp"

namespace ouq {

/// Convex combination of Dirac masses on one input axis.
class Marginal {
 public:
  Marginal(std::vector<double> positions, std::vector<double> weights)
      : positions_(std::move(positions)), weights_(std::move(weights)) {
    if (positions_.empty() || positions_.size() != weights_.size())
      throw InvalidArgument("Marginal: positions/weights must be non-empty and equal length");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw InvalidArgument("Marginal: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InvalidArgument("Marginal: weights sum to " + std::to_string(sum) + ", expected 1");
  }

  /// A single Dirac mass.
  static Marginal dirac(double x) { return Marginal({x}, {1.0}); }

  std::size_t size() const { return positions_.size(); }
  const std::vector<double>& positions() const { return positions_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> positions_;
  std::vector<double> weights_;
};

/// Finite-support product probability measure, one Marginal per axis.
/// Immutable after construction; all queries are pure.
class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
    if (marginals_.empty()) throw InvalidArgument("ProductMeasure: needs at least one marginal");
  }

  std::size_t dimension() const { return marginals_.size(); }
  const Marginal& marginal(std::size_t i) const { return marginals_.at(i); }
  const std::vector<Marginal>& marginals() const { return marginals_; }

  /// Total number of support points of the product grid.
  std::size_t support_size() const {
    std::size_t n = 1;
    for (const auto& m : marginals_) n *= m.size();
    return n;
  }

 private:
  std::vector<Marginal> marginals_;
};

/// Visits every support point of the product grid with its product weight.
/// Visitor signature: void(const std::vector<double>& point, double weight).
template <class Visitor>
void for_each_atom(const ProductMeasure& pm, Visitor&& visit) {
  const std::size_t m = pm.dimension();
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> point(m);
  for (;;) {
    double w = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      point[i] = pm.marginal(i).positions()[idx[i]];
      w *= pm.marginal(i).weights()[idx[i]];
    }
    visit(point, w);
    // odometer increment
    std::size_t i = 0;
    while (i < m && ++idx[i] == pm.marginal(i).size()) idx[i++] = 0;
    if (i == m) break;
  }
}

/// Exact expectation of f under the product measure (finite sum, no
/// sampling). A throwing f is re-raised with the offending support point
/// attached.
template <class F>
double expectation(const ProductMeasure& pm, F&& f) {
  double acc = 0.0;
  for_each_atom(pm, [&](const std::vector<double>& x, double w) {
    double v;
    try {
      v = f(x);
    } catch (const std::exception& e) {
      throw EvalError(std::string("expectation: evaluation failed at support point ") +
                      detail::format_point(x) + ": " + e.what());
    }
    acc += w * v;
  });
  return acc;
}

/// Probability of the event defined by `pred` (expectation of its indicator).
template <class Pred>
double event_probability(const ProductMeasure& pm, Pred&& pred) {
  return expectation(pm, [&](const std::vector<double>& x) { return pred(x) ? 1.0 : 0.0; });
}

/// Maps flat optimizer vectors to product measures and back.
///
/// Per axis with k atoms the flat vector holds k raw positions followed by
/// k raw weights. Decoding clamps positions into the axis interval and sends
/// raw weights through exponentiate-then-normalize, so every finite real
/// vector decodes to a valid measure. An axis may be pinned (zero free
/// atoms), in which case it contributes no parameters and decodes to a
/// single Dirac mass.
class ParamLayout {
 public:
  struct AxisSpec {
    Axis axis;
    std::size_t atoms = 1;   // 0 means pinned
    double pinned_at = 0.0;  // used when atoms == 0
  };

  explicit ParamLayout(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw InvalidArgument("ParamLayout: needs at least one axis");
    dim_ = 0;
    for (const auto& a : axes_) dim_ += 2 * a.atoms;
  }

  static ParamLayout uniform(const BoxDomain& box, std::size_t atoms_per_axis) {
    std::vector<AxisSpec> specs;
    specs.reserve(box.dimension());
    for (const auto& ax : box.axes()) specs.push_back({ax, atoms_per_axis, 0.0});
    return ParamLayout(std::move(specs));
  }

  std::size_t dimension() const { return dim_; }
  std::size_t axis_count() const { return axes_.size(); }
  const AxisSpec& axis_spec(std::size_t i) const { return axes_.at(i); }

  std::vector<std::size_t> support_counts() const {
    std::vector<std::size_t> k;
    k.reserve(axes_.size());
    for (const auto& a : axes_) k.push_back(a.atoms == 0 ? 1 : a.atoms);
    return k;
  }

  /// Flat indices of the raw-weight parameters (the cheap coordinates to
  /// adjust when repairing a constraint violation).
  std::vector<std::size_t> weight_parameter_indices() const {
    std::vector<std::size_t> idx;
    std::size_t at = 0;
    for (const auto& a : axes_) {
      for (std::size_t j = 0; j < a.atoms; ++j) idx.push_back(at + a.atoms + j);
      at += 2 * a.atoms;
    }
    return idx;
  }

  /// Box bounds handed to the optimizer: axis interval for positions,
  /// a saturating range for raw weights.
  std::vector<std::pair<double, double>> parameter_bounds() const {
    std::vector<std::pair<double, double>> b;
    b.reserve(dim_);
    for (const auto& a : axes_) {
      for (std::size_t j = 0; j < a.atoms; ++j) b.emplace_back(a.axis.lo, a.axis.hi);
      for (std::size_t j = 0; j < a.atoms; ++j) b.emplace_back(-kRawWeightRange, kRawWeightRange);
    }
    return b;
  }

  ProductMeasure decode(const std::vector<double>& v) const {
    if (v.size() != dim_)
      throw InvalidArgument("ParamLayout::decode: expected " + std::to_string(dim_) +
                            " parameters, got " + std::to_string(v.size()));
    std::vector<Marginal> marginals;
    marginals.reserve(axes_.size());
    std::size_t at = 0;
    for (const auto& a : axes_) {
      if (a.atoms == 0) {
        marginals.push_back(Marginal::dirac(a.pinned_at));
        continue;
      }
      std::vector<double> pos(a.atoms), wts(a.atoms);
      for (std::size_t j = 0; j < a.atoms; ++j) pos[j] = a.axis.clamp(v[at + j]);
      double mx = v[at + a.atoms];
      for (std::size_t j = 1; j < a.atoms; ++j) mx = std::max(mx, v[at + a.atoms + j]);
      double sum = 0.0;
      for (std::size_t j = 0; j < a.atoms; ++j) {
        wts[j] = std::exp(v[at + a.atoms + j] - mx);
        sum += wts[j];
      }
      for (double& w : wts) w /= sum;
      // kill residual rounding so the simplex invariant holds exactly enough
      double total = std::accumulate(wts.begin(), wts.end(), 0.0);
      wts.back() += 1.0 - total;
      if (wts.back() < 0.0) wts.back() = 0.0;
      marginals.emplace_back(std::move(pos), std::move(wts));
      at += 2 * a.atoms;
    }
    return ProductMeasure(std::move(marginals));
  }

  std::vector<double> encode(const ProductMeasure& pm) const {
    if (pm.dimension() != axes_.size())
      throw InvalidArgument("ParamLayout::encode: dimension mismatch");
    std::vector<double> v;
    v.reserve(dim_);
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      const auto& a = axes_[i];
      if (a.atoms == 0) continue;
      const Marginal& mg = pm.marginal(i);
      if (mg.size() != a.atoms)
        throw InvalidArgument("ParamLayout::encode: marginal " + std::to_string(i) + " has " +
                              std::to_string(mg.size()) + " atoms, layout expects " +
                              std::to_string(a.atoms));
      for (double p : mg.positions()) v.push_back(a.axis.clamp(p));
      for (double w : mg.weights()) v.push_back(std::log(std::max(w, 1e-300)));
    }
    return v;
  }

  static constexpr double kRawWeightRange = 12.0;

 private:
  std::vector<AxisSpec> axes_;
  std::size_t dim_ = 0;
};

/// Number of effectively distinct atoms per axis: positions closer than the
/// merge radius (1e-3 of the axis width) are pooled, then clusters with
/// pooled weight <= tol are discounted.
inline std::vector<std::size_t> effective_support(const ProductMeasure& pm, const BoxDomain& box,
                                                  double tol = 1e-4) {
  if (!(tol >= 0.0 && tol < 1.0)) throw InvalidArgument("effective_support: tol must be in [0,1)");
  if (pm.dimension() != box.dimension())
    throw InvalidArgument("effective_support: dimension mismatch");
  std::vector<std::size_t> counts;
  counts.reserve(pm.dimension());
  for (std::size_t i = 0; i < pm.dimension(); ++i) {
    const Marginal& mg = pm.marginal(i);
    const double radius = 1e-3 * box.axis(i).width();
    std::vector<std::size_t> order(mg.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mg.positions()[a] < mg.positions()[b];
    });
    std::size_t n = 0;
    std::size_t j = 0;
    while (j < order.size()) {
      const double start = mg.positions()[order[j]];
      double weight = 0.0;
      while (j < order.size() && mg.positions()[order[j]] - start <= radius)
        weight += mg.weights()[order[j++]];
      if (weight > tol) ++n;
    }
    counts.push_back(n);
  }
  return counts;
}

}  // namespace ouq

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ouq/common.hpp"
#include "ouq/hypercube.hpp"

namespace ouq {

/// Component-wise oscillation bounds D_i of a response, all non-negative.
class DiameterVector {
 public:
  explicit DiameterVector(std::vector<double> d) : d_(std::move(d)) {
    if (d_.empty()) throw InvalidArgument("DiameterVector: needs at least one entry");
    for (double v : d_)
      if (!(v >= 0.0)) throw InvalidArgument("DiameterVector: negative sub-diameter");
  }
  DiameterVector(std::initializer_list<double> d) : DiameterVector(std::vector<double>(d)) {}

  std::size_t size() const { return d_.size(); }
  double operator[](std::size_t i) const { return d_.at(i); }
  const std::vector<double>& values() const { return d_; }

  std::vector<double> sorted_desc() const {
    std::vector<double> s = d_;
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  }

  /// Euclidean diameter squared, sum of D_i^2.
  double norm_sq() const {
    double s = 0.0;
    for (double v : d_) s += v * v;
    return s;
  }

 private:
  std::vector<double> d_;
};

/// The classical (non-optimal) bound exp(-2 a^2 / sum D_i^2), clamped to 1.
/// Degenerate conventions: 1 for a <= 0; 0 for a > 0 with all D_i = 0.
inline double classic_mcdiarmid(double a, const DiameterVector& D) {
  if (a <= 0.0) return 1.0;
  const double d2 = D.norm_sq();
  if (d2 == 0.0) return 0.0;
  return std::min(1.0, std::exp(-2.0 * a * a / d2));
}

/// Diagnostics of the depressed cubic (1+gamma)^3 - A (1+gamma)^2 + B = 0
/// driving the three-variable interior regime.
struct CubicAnalysis {
  struct Root {
    double gamma = 0.0;
    double theta = 0.0;  // interior weight of the third coordinate
    bool gate = false;   // gamma and theta both strictly inside (0,1)
    double psi = 0.0;    // candidate probability value at this root
  };
  double A = 0.0;
  double B = 0.0;
  std::vector<Root> roots;  // real roots, deduplicated
};

/// Result of an optimal concentration bound: the value, which formula
/// branch produced it, and (when available) the extremal hypercube measure.
struct OptimalBoundResult {
  double value = 0.0;
  std::string regime;
  std::optional<std::vector<Vertex>> extremal_C;     // in original axis order
  std::optional<std::vector<double>> extremal_alpha; // per original axis
  std::optional<CubicAnalysis> cubic;                // three-variable case only
};

namespace detail {

/// Real roots of x^3 - A x^2 + B = 0, Newton-polished, deduplicated.
inline std::vector<double> cubic_real_roots(double A, double B) {
  // depress with x = y + A/3
  const double p = -A * A / 3.0;
  const double q = B - 2.0 * A * A * A / 27.0;
  std::vector<double> roots;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (p == 0.0) {
    roots.push_back(std::cbrt(-q));
  } else if (disc > 0.0) {
    // three real roots, trigonometric form
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(r * std::cos(phi / 3.0 - 2.0 * M_PI * static_cast<double>(k) / 3.0));
  } else {
    // one real root, Cardano
    const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
  }
  for (double& y : roots) {
    double x = y + A / 3.0;
    for (int it = 0; it < 3; ++it) {  // Newton polish on the original cubic
      const double f = x * x * x - A * x * x + B;
      const double df = 3.0 * x * x - 2.0 * A * x;
      if (df != 0.0) x -= f / df;
    }
    y = x;
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || std::abs(r - out.back()) > 1e-9 * std::max(1.0, std::abs(r))) out.push_back(r);
  return out;
}

/// Single-vertex value for C = {(1,...,1)}: the recursive closed form over
/// sorted-descending positive sub-diameters. Returns the branch index k
/// (0 means the zero regime) and fills the interior weights.
inline std::size_t single_vertex_bound(double a, const std::vector<double>& ds, double& value,
                                       std::vector<double>& alpha) {
  const std::size_t m = ds.size();
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + ds[i];
  alpha.assign(m, 1.0);
  if (a >= prefix[m]) {
    value = 0.0;
    for (std::size_t i = 0; i < m; ++i) alpha[i] = 0.0;
    return 0;
  }
  // thresholds T_k = sum_{j<=k} D_j - k D_k are non-decreasing in k
  std::size_t k = m;
  while (k > 1 && prefix[k] - static_cast<double>(k) * ds[k - 1] > a) --k;
  const double margin = prefix[k] - a;
  double prod = 1.0;
  for (std::size_t j = 0; j < k; ++j) prod *= ds[j];
  value = std::pow(margin / static_cast<double>(k), static_cast<double>(k)) / prod;
  for (std::size_t j = 0; j < k; ++j) alpha[j] = margin / (static_cast<double>(k) * ds[j]);
  return k;
}

}  // namespace detail

/// Evaluates the interior (four-vertex) candidate of the three-variable
/// problem: cubic roots, gates and candidate probabilities. d2 >= d3 > 0.
inline CubicAnalysis cubic_analysis(double a, double d2, double d3) {
  CubicAnalysis out;
  out.A = (5.0 * d2 - 2.0 * d3) / (2.0 * d2 - d3);
  out.B = (4.0 * d2 - a) / (2.0 * d2 - d3);
  const double r23 = d2 / d3;
  for (double x : detail::cubic_real_roots(out.A, out.B)) {
    CubicAnalysis::Root root;
    root.gamma = x - 1.0;
    const double g = root.gamma;
    const bool gamma_open = g > 1e-12 && g < 1.0 - 1e-12;
    root.theta = gamma_open ? 1.0 - a / (d3 * (1.0 - g * g)) + r23 * (1.0 - g) / (1.0 + g) : 0.0;
    root.gate = gamma_open && root.theta > 1e-12 && root.theta < 1.0 - 1e-12;
    root.psi = g * g * (2.0 * r23 - 1.0) - 2.0 * g * (3.0 * r23 - 1.0) +
               g / (1.0 + g) * (8.0 * r23 - 2.0 * a / d3);
    out.roots.push_back(root);
  }
  return out;
}

/// Optimal concentration bound under independence, mean and component-wise
/// oscillation constraints: the least upper bound on mu[f >= a + b] over
/// all response/measure pairs with E[f] <= b and Osc_i(f) <= D_i.
///
/// Exact closed forms for one, two and three variables; for four and more
/// variables the tail regime is exact and the interior regime is numerical
/// (nested-family search plus, when tractable, the exhaustive oracle) and
/// tagged as such.
inline OptimalBoundResult optimal_mcdiarmid(double a, const DiameterVector& D, double b = 0.0) {
  OptimalBoundResult out;
  const double margin = a - b;
  if (margin <= 0.0) {
    out.value = 1.0;
    out.regime = "trivial-nonpositive-margin";
    return out;
  }

  // Sort descending and drop zero diameters; those axes take weight one at
  // the extremal vertex and do not affect the value.
  const std::size_t m_all = D.size();
  std::vector<std::size_t> order(m_all);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return D[i] > D[j]; });
  std::vector<double> ds;
  std::vector<std::size_t> kept;  // original axis of each sorted coordinate
  for (std::size_t i : order) {
    if (D[i] > 0.0) {
      ds.push_back(D[i]);
      kept.push_back(i);
    }
  }
  const std::size_t m = ds.size();

  // Maps sorted-coordinate extremal data back to the original axis order,
  // dropped axes pinned at alpha = 1 / vertex bit 1.
  auto publish = [&](const std::vector<double>& alpha_sorted, const std::vector<Vertex>& C_sorted) {
    std::vector<double> alpha(m_all, 1.0);
    for (std::size_t i = 0; i < m; ++i) alpha[kept[i]] = alpha_sorted[i];
    std::vector<Vertex> C;
    for (Vertex cs : C_sorted) {
      Vertex v = 0;
      for (std::size_t i = 0; i < m_all; ++i) v |= Vertex{1} << i;  // dropped axes at 1
      for (std::size_t i = 0; i < m; ++i) {
        if (!((cs >> i) & 1)) v &= ~(Vertex{1} << kept[i]);
      }
      C.push_back(v);
    }
    out.extremal_alpha = std::move(alpha);
    out.extremal_C = std::move(C);
  };

  if (m == 0) {
    out.value = 0.0;
    out.regime = "degenerate-zero-diameters";
    return out;
  }

  std::vector<double> alpha1;
  double f1 = 0.0;
  const std::size_t branch = detail::single_vertex_bound(margin, ds, f1, alpha1);
  const Vertex ones = static_cast<Vertex>((std::size_t{1} << m) - 1);

  if (m <= 2) {
    out.value = std::clamp(f1, 0.0, 1.0);
    if (branch == 0)
      out.regime = "m" + std::to_string(m) + "-zero";
    else
      out.regime = "m" + std::to_string(m) + (branch == m ? "-interior" : "-edge");
    publish(alpha1, {ones});
    return out;
  }

  if (m == 3) {
    CubicAnalysis cubic = cubic_analysis(margin, ds[1], ds[2]);
    double f2 = 0.0;
    const CubicAnalysis::Root* winner = nullptr;
    for (const auto& r : cubic.roots) {
      if (r.gate && r.psi > f2) {
        f2 = r.psi;
        winner = &r;
      }
    }
    if (f2 > f1) {
      out.value = std::clamp(f2, 0.0, 1.0);
      out.regime = "m3-F2";
      // C2: every vertex with at least two ones; weights (gamma, gamma, theta)
      publish({winner->gamma, winner->gamma, winner->theta}, {0b111, 0b011, 0b101, 0b110});
    } else {
      out.value = std::clamp(f1, 0.0, 1.0);
      out.regime = branch == 0 ? "m3-F1-zero" : "m3-F1-branch" + std::to_string(branch);
      publish(alpha1, {ones});
    }
    out.cubic = std::move(cubic);
    return out;
  }

  // m >= 4
  std::vector<double> tail_prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) tail_prefix[i + 1] = tail_prefix[i] + ds[i];
  if (margin >= tail_prefix[m - 2] + ds[m - 1]) {
    out.value = std::clamp(f1, 0.0, 1.0);
    out.regime = "m" + std::to_string(m) +
                 (branch == 0 ? "-tail-zero" : "-tail-branch" + std::to_string(branch));
    publish(alpha1, {ones});
    return out;
  }
  HypercubeOracleResult best = hypercube_oracle_nested(margin, ds, 256);
  std::string tag = "m" + std::to_string(m) + "-numerical-conjectured-family";
  if (m == 4) {
    HypercubeOracleResult full = hypercube_oracle(margin, ds, 64);
    if (full.value > best.value) best = full;
    tag = "m4-numerical";
  }
  if (f1 > best.value) {
    out.value = std::clamp(f1, 0.0, 1.0);
    out.regime = tag + "-single-vertex";
    publish(alpha1, {ones});
    return out;
  }
  out.value = std::clamp(best.value, 0.0, 1.0);
  out.regime = tag;
  publish(best.best_alpha, best.best_C);
  return out;
}

/// Optimal bound under Hoeffding's assumptions (additive response of
/// independent bounded summands). Coincides with the McDiarmid-assumptions
/// value for two variables, and for three variables whenever F1 >= F2;
/// otherwise the McDiarmid value is returned as a valid but non-sharp
/// upper bound.
struct HoeffdingBound {
  double value = 0.0;      // valid upper bound on the Hoeffding problem
  bool sharp = true;       // false: strictly below `value`, exact form unknown
  OptimalBoundResult mcdiarmid;
};

inline HoeffdingBound optimal_hoeffding(double a, const DiameterVector& D, double b = 0.0) {
  const std::size_t m = D.size();
  if (m != 2 && m != 3)
    throw InvalidArgument("optimal_hoeffding: supported dimensions are 2 and 3");
  HoeffdingBound out;
  out.mcdiarmid = optimal_mcdiarmid(a, D, b);
  out.value = out.mcdiarmid.value;
  out.sharp = m == 2 || out.mcdiarmid.regime != "m3-F2";
  return out;
}

}  // namespace ouq

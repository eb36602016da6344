#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ouq/common.hpp"

namespace ouq {

/// Vertex of {0,1}^m as a bitmask; bit i is coordinate s_i.
using Vertex = std::uint32_t;

/// The extremal clipped hypercube function h^C: value `a` on C, decaying by
/// the sub-diameter sum over disagreeing coordinates with the closest
/// element of C.
inline double hypercube_h(const std::vector<Vertex>& C, Vertex t, double a,
                          const std::vector<double>& D) {
  if (C.empty()) throw InvalidArgument("hypercube_h: C must be non-empty");
  double drop = 1e300;
  for (Vertex s : C) {
    Vertex diff = s ^ t;
    double acc = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i)
      if (diff & (Vertex{1} << i)) acc += D[i];
    drop = std::min(drop, acc);
  }
  return a - drop;
}

struct HypercubeOptimum {
  double value = 0.0;              // best alpha[h^C >= a] found
  bool feasible = false;           // some alpha satisfies E[h^C] <= 0
  std::vector<double> alpha;       // maximizing product-measure parameters
};

namespace detail {

/// Maximize alpha[h^C >= a] subject to E_alpha[h^C] <= 0 over alpha in
/// [0,1]^m by nested grid refinement plus compass-search polish. Returns a
/// guaranteed lower bound on the restricted optimum, within O(1/grid).
inline HypercubeOptimum optimize_alpha(const std::vector<double>& h, double a,
                                       std::size_t m, std::size_t grid) {
  const std::size_t verts = std::size_t{1} << m;
  const std::size_t pts = m <= 2 ? 33 : (m == 3 ? 13 : 7);
  std::vector<char> on(verts);
  for (std::size_t t = 0; t < verts; ++t) on[t] = h[t] >= a - 1e-12 ? 1 : 0;

  // weight of each vertex under alpha, and the two multilinear forms
  auto stats = [&](const std::vector<double>& al, double& P, double& E) {
    P = 0.0;
    E = 0.0;
    for (std::size_t t = 0; t < verts; ++t) {
      double w = 1.0;
      for (std::size_t i = 0; i < m; ++i)
        w *= (t >> i) & 1 ? al[i] : 1.0 - al[i];
      if (on[t]) P += w;
      E += w * h[t];
    }
  };

  // Feasibility requires some vertex with h <= 0.
  if (*std::min_element(h.begin(), h.end()) > 1e-12) return {};

  HypercubeOptimum best;
  best.alpha.assign(m, 0.0);
  std::vector<double> lo(m, 0.0), hi(m, 1.0);
  double res = 1.0 / static_cast<double>(pts - 1);

  auto consider = [&](const std::vector<double>& al) {
    double P, E;
    stats(al, P, E);
    if (E <= 1e-12 && (!best.feasible || P > best.value)) {
      best.value = P;
      best.alpha = al;
      best.feasible = true;
    }
  };

  for (;;) {
    std::vector<std::size_t> idx(m, 0);
    std::vector<double> al(m);
    for (;;) {
      for (std::size_t i = 0; i < m; ++i)
        al[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[i]) / static_cast<double>(pts - 1);
      consider(al);
      std::size_t i = 0;
      while (i < m && ++idx[i] == pts) idx[i++] = 0;
      if (i == m) break;
    }
    if (!best.feasible) return best;
    if (res <= 1.0 / static_cast<double>(grid)) break;
    // shrink windows to two cells around the incumbent
    for (std::size_t i = 0; i < m; ++i) {
      const double cell = (hi[i] - lo[i]) / static_cast<double>(pts - 1);
      const double c = best.alpha[i];
      lo[i] = std::max(0.0, c - 2.0 * cell);
      hi[i] = std::min(1.0, c + 2.0 * cell);
    }
    res *= 4.0 / static_cast<double>(pts - 1);
  }

  // Compass polish with axis and pairwise moves, step halving.
  double step = 2.0 / static_cast<double>(grid);
  std::vector<double> trial;
  while (step > 1e-9) {
    bool improved = false;
    for (std::size_t i = 0; i < m && !improved; ++i) {
      for (double dir : {+1.0, -1.0}) {
        trial = best.alpha;
        trial[i] = std::min(1.0, std::max(0.0, trial[i] + dir * step));
        double P, E;
        stats(trial, P, E);
        if (E <= 1e-12 && P > best.value) {
          best.value = P;
          best.alpha = trial;
          improved = true;
          break;
        }
      }
    }
    // coordinated moves along the constraint surface
    for (std::size_t i = 0; i < m && !improved; ++i) {
      for (std::size_t j = 0; j < m && !improved; ++j) {
        if (i == j) continue;
        trial = best.alpha;
        trial[i] = std::min(1.0, std::max(0.0, trial[i] + step));
        trial[j] = std::min(1.0, std::max(0.0, trial[j] - step));
        double P, E;
        stats(trial, P, E);
        if (E <= 1e-12 && P > best.value) {
          best.value = P;
          best.alpha = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace detail

struct HypercubeOracleResult {
  double value = 0.0;
  std::vector<Vertex> best_C;
  std::vector<double> best_alpha;
};

/// Restricted oracle: optimizes alpha for each candidate vertex set in
/// `families` and returns the best.
inline HypercubeOracleResult hypercube_oracle_over(const std::vector<std::vector<Vertex>>& families,
                                                   double a, const std::vector<double>& D,
                                                   std::size_t grid = 64) {
  const std::size_t m = D.size();
  if (m == 0 || m > 16) throw InvalidArgument("hypercube_oracle_over: dimension out of range");
  const std::size_t verts = std::size_t{1} << m;
  HypercubeOracleResult out;
  std::vector<double> h(verts);
  for (const auto& C : families) {
    if (C.empty()) continue;
    for (std::size_t t = 0; t < verts; ++t) h[t] = hypercube_h(C, static_cast<Vertex>(t), a, D);
    auto opt = detail::optimize_alpha(h, a, m, grid);
    if (opt.feasible && opt.value > out.value) {
      out.value = opt.value;
      out.best_C = C;
      out.best_alpha = opt.alpha;
    }
  }
  return out;
}

/// Full brute-force oracle over every non-empty vertex set C of {0,1}^m
/// (reflection symmetry pins the all-ones vertex into C), maximizing
/// alpha[h^C >= a] subject to E_alpha[h^C] <= 0. Guaranteed lower bound on
/// the true optimum, within O(1/grid) of it.
inline HypercubeOracleResult hypercube_oracle(double a, const std::vector<double>& D,
                                              std::size_t grid = 64) {
  const std::size_t m = D.size();
  if (m == 0 || m > 4) throw InvalidArgument("hypercube_oracle: supported dimensions are 1..4");
  const std::size_t verts = std::size_t{1} << m;
  const Vertex ones = static_cast<Vertex>(verts - 1);
  std::vector<std::vector<Vertex>> families;
  families.reserve(std::size_t{1} << (verts - 1));
  for (std::size_t sub = 0; sub < (std::size_t{1} << (verts - 1)); ++sub) {
    std::vector<Vertex> C{ones};
    for (std::size_t t = 0; t + 1 < verts; ++t)
      if (sub & (std::size_t{1} << t)) C.push_back(static_cast<Vertex>(t));
    families.push_back(std::move(C));
  }
  return hypercube_oracle_over(families, a, D, grid);
}

/// Nested-family oracle: candidate sets C_q = {s : sum s_i >= q} for
/// q = 1..m (the conjectured extremal family for m >= 4).
inline HypercubeOracleResult hypercube_oracle_nested(double a, const std::vector<double>& D,
                                                     std::size_t grid = 64) {
  const std::size_t m = D.size();
  if (m == 0) throw InvalidArgument("hypercube_oracle_nested: empty D");
  const std::size_t verts = std::size_t{1} << m;
  std::vector<std::vector<Vertex>> families;
  for (std::size_t q = 1; q <= m; ++q) {
    std::vector<Vertex> C;
    for (std::size_t t = 0; t < verts; ++t)
      if (static_cast<std::size_t>(std::popcount(t)) >= q) C.push_back(static_cast<Vertex>(t));
    families.push_back(std::move(C));
  }
  return hypercube_oracle_over(families, a, D, grid);
}

}  // namespace ouq

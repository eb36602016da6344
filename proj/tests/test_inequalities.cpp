#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ouq/hypercube.hpp"
#include "ouq/inequalities.hpp"

using namespace ouq;

namespace {

DiameterVector rand_D(Rng& rng, std::size_t m, double lo = 0.1, double hi = 10.0) {
  std::vector<double> d(m);
  for (double& v : d) v = rng.uniform(lo, hi);
  return DiameterVector(d);
}

double sum(const DiameterVector& D) {
  double s = 0.0;
  for (double v : D.values()) s += v;
  return s;
}

}  // namespace

TEST_CASE("classic bound reproduces the published 66.4% value") {
  REQUIRE(classic_mcdiarmid(5.5, {8.86, 4.17, 7.20}) == Catch::Approx(0.664).margin(0.001));
}

TEST_CASE("classic bound degenerate conventions") {
  REQUIRE(classic_mcdiarmid(0.0, {1.0, 2.0}) == 1.0);
  REQUIRE(classic_mcdiarmid(-3.0, {1.0}) == 1.0);
  REQUIRE(classic_mcdiarmid(1.0, {0.0, 0.0}) == 0.0);
  REQUIRE(classic_mcdiarmid(1e-12, {1.0}) <= 1.0);
}

TEST_CASE("three-variable optimal bound at the published operating point") {
  OptimalBoundResult r = optimal_mcdiarmid(5.5, {8.86, 7.20, 4.17});
  REQUIRE(r.value == Catch::Approx(0.437).margin(0.001));
  REQUIRE(r.regime == "m3-F1-branch2");  // (D1 + D2 - a)^2 / (4 D1 D2)

  // The interior four-vertex candidate: its cubic has exactly one gated
  // root, and its probability value is confirmed by the exhaustive oracle
  // restricted to that vertex set.
  REQUIRE(r.cubic.has_value());
  const CubicAnalysis::Root* gated = nullptr;
  for (const auto& root : r.cubic->roots) {
    if (root.gate) {
      REQUIRE(gated == nullptr);
      gated = &root;
    }
  }
  REQUIRE(gated != nullptr);
  REQUIRE(gated->gamma == Catch::Approx(0.252916).margin(1e-4));
  REQUIRE(gated->theta == Catch::Approx(0.620463).margin(1e-4));
  REQUIRE(gated->psi == Catch::Approx(0.298439).margin(1e-4));

  const std::vector<Vertex> C2{0b111, 0b011, 0b101, 0b110};
  HypercubeOracleResult oracle = hypercube_oracle_over({C2}, 5.5, {8.86, 7.20, 4.17}, 256);
  REQUIRE(oracle.value == Catch::Approx(gated->psi).margin(5e-3));
}

TEST_CASE("cubic roots satisfy the cubic to 1e-9 relative") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    double d3 = rng.uniform(0.1, 5.0);
    double d2 = d3 + rng.uniform(0.0, 5.0);
    double a = rng.uniform(0.0, 2.0 * (d2 + d3));
    CubicAnalysis c = cubic_analysis(a, d2, d3);
    for (const auto& root : c.roots) {
      const double x = 1.0 + root.gamma;
      const double res = x * x * x - c.A * x * x + c.B;
      const double scale = std::max({1.0, std::abs(x * x * x), std::abs(c.A * x * x),
                                     std::abs(c.B)});
      REQUIRE(std::abs(res) / scale < 1e-9);
    }
  }
}

TEST_CASE("one-variable bound branches") {
  REQUIRE(optimal_mcdiarmid(2.0, {1.5}).value == 0.0);
  REQUIRE(optimal_mcdiarmid(0.5, {1.0}).value == Catch::Approx(0.5));
  REQUIRE(optimal_mcdiarmid(-0.5, {1.0}).value == 1.0);
}

TEST_CASE("two-variable bound branches") {
  // edge regime: a below the diameter gap, only the largest axis matters
  OptimalBoundResult edge = optimal_mcdiarmid(1.0, {3.0, 1.0});
  REQUIRE(edge.value == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(edge.regime == "m2-edge");
  // interior regime, value confirmed against the exhaustive oracle
  OptimalBoundResult interior = optimal_mcdiarmid(1.0, {1.0, 1.0});
  REQUIRE(interior.value == Catch::Approx(0.25).epsilon(1e-12));
  REQUIRE(interior.regime == "m2-interior");
  REQUIRE(hypercube_oracle(1.0, {1.0, 1.0}, 256).value ==
          Catch::Approx(0.25).margin(5e-3));
  // zero regime
  REQUIRE(optimal_mcdiarmid(2.5, {1.0, 1.0}).value == 0.0);
}

TEST_CASE("mean shift uses the margin a - b") {
  REQUIRE(optimal_mcdiarmid(1.5, {1.0, 1.0}, 0.5).value ==
          Catch::Approx(optimal_mcdiarmid(1.0, {1.0, 1.0}).value));
  REQUIRE(optimal_mcdiarmid(1.0, {1.0}, 2.0).value == 1.0);  // non-positive margin
}

TEST_CASE("hypercube extremal function h^C") {
  SECTION("value a exactly on C") {
    std::vector<Vertex> C{0b101, 0b010};
    for (Vertex t : C) REQUIRE(hypercube_h(C, t, 2.5, {1.0, 2.0, 3.0}) == 2.5);
  }
  SECTION("single far vertex accumulates the full diameter sum") {
    REQUIRE(hypercube_h({0b11}, 0b00, 5.0, {1.0, 2.0}) == Catch::Approx(5.0 - 3.0));
  }
  SECTION("max over C picks the closest vertex") {
    std::vector<Vertex> C{0b111, 0b110};  // (1,1,1) and (0,1,1)
    REQUIRE(hypercube_h(C, 0b000, 5.0, {1.0, 2.0, 3.0}) ==
            Catch::Approx(5.0 - 2.0 - 3.0));  // via (0,1,1): pays D2 + D3
  }
  SECTION("h^C equals a only on C when all diameters are positive") {
    std::vector<Vertex> C{0b11};
    REQUIRE(hypercube_h(C, 0b01, 1.0, {0.5, 0.5}) < 1.0);
    REQUIRE(hypercube_h(C, 0b10, 1.0, {0.5, 0.5}) < 1.0);
  }
}

TEST_CASE("oracle matches the one-variable closed form") {
  REQUIRE(hypercube_oracle(0.5, {1.0}, 256).value == Catch::Approx(0.5).margin(1e-3));
}

TEST_CASE("oracle validates the closed forms on random draws", "[property]") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial % 3;
    DiameterVector D = rand_D(rng, m, 0.2, 5.0);
    const double a = rng.uniform(0.0, 1.1 * sum(D));
    const double closed = optimal_mcdiarmid(a, D).value;
    const double numeric = hypercube_oracle(a, D.values(), 128).value;
    INFO("m=" << m << " a=" << a);
    REQUIRE(numeric == Catch::Approx(closed).margin(5e-3));
  }
}

TEST_CASE("optimal bound never exceeds the classic bound", "[property]") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + trial % 3;
    DiameterVector D = rand_D(rng, m);
    const double a = rng.uniform(-0.5, 1.2 * sum(D));
    REQUIRE(optimal_mcdiarmid(a, D).value <= classic_mcdiarmid(a, D) + 1e-9);
  }
}

TEST_CASE("scale invariance of the closed forms", "[property]") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 3;
    DiameterVector D = rand_D(rng, m);
    const double a = rng.uniform(0.0, sum(D));
    const double lambda = rng.uniform(0.01, 100.0);
    std::vector<double> scaled = D.values();
    for (double& v : scaled) v *= lambda;
    REQUIRE(optimal_mcdiarmid(lambda * a, DiameterVector(scaled)).value ==
            Catch::Approx(optimal_mcdiarmid(a, D).value).margin(1e-9));
  }
}

TEST_CASE("monotone in the threshold and in each diameter", "[property]") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 3;
    DiameterVector D = rand_D(rng, m);
    const double a = rng.uniform(0.0, sum(D));
    const double base = optimal_mcdiarmid(a, D).value;
    REQUIRE(optimal_mcdiarmid(a + rng.uniform(0.0, 1.0), D).value <= base + 1e-12);
    std::vector<double> grown = D.values();
    grown[rng.index(m)] += rng.uniform(0.0, 2.0);
    REQUIRE(optimal_mcdiarmid(a, DiameterVector(grown)).value >= base - 1e-12);
  }
}

TEST_CASE("two-variable non-propagation: the small diameter drops out", "[property]") {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const double d1 = rng.uniform(1.0, 10.0);
    const double a = rng.uniform(0.0, d1);
    const double cap = d1 - a;  // any D2, D2' <= D1 - a give the same bound
    if (cap <= 0.0) continue;
    const double d2 = rng.uniform(0.0, cap);
    const double d2p = rng.uniform(0.0, cap);
    REQUIRE(optimal_mcdiarmid(a, {d1, d2}).value ==
            Catch::Approx(optimal_mcdiarmid(a, {d1, d2p}).value).margin(1e-12));
  }
}

TEST_CASE("two-variable diagonal extremes at fixed total diameter") {
  const double Dtot = 3.0, a = 1.2;
  // concentrated: D2 = 0 gives 1 - a/D
  REQUIRE(optimal_mcdiarmid(a, {Dtot, 0.0}).value ==
          Catch::Approx(1.0 - a / Dtot).epsilon(1e-12));
  // diagonal: D1 = D2 gives (1 - a/D)^2
  const double half = Dtot / 2.0;
  const double expected = (1.0 - a / Dtot) * (1.0 - a / Dtot);
  REQUIRE(optimal_mcdiarmid(a, {half, half}).value == Catch::Approx(expected).epsilon(1e-12));
  // sweep: the interior of the simplex stays between the two extremes
  for (double d1 = half; d1 <= Dtot; d1 += 0.1) {
    const double v = optimal_mcdiarmid(a, {d1, Dtot - d1}).value;
    REQUIRE(v >= expected - 1e-12);
    REQUIRE(v <= 1.0 - a / Dtot + 1e-12);
  }
}

TEST_CASE("branch continuity at the two-variable seams", "[property]") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const double d2 = rng.uniform(0.5, 5.0);
    const double d1 = d2 + rng.uniform(0.0, 5.0);
    for (double seam : {d1 - d2, d1 + d2}) {
      const double lo = optimal_mcdiarmid(seam - 1e-11, {d1, d2}).value;
      const double hi = optimal_mcdiarmid(seam + 1e-11, {d1, d2}).value;
      REQUIRE(std::abs(lo - hi) < 1e-9);
    }
  }
}

TEST_CASE("branch continuity at the three-variable single-vertex seams", "[property]") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d = rand_D(rng, 3, 0.5, 5.0).sorted_desc();
    const double seams[] = {d[0] - d[1], d[0] + d[1] - 2.0 * d[2], d[0] + d[1] + d[2]};
    for (double seam : seams) {
      if (seam <= 0.0) continue;
      const double lo = optimal_mcdiarmid(seam - 1e-11, DiameterVector(d)).value;
      const double hi = optimal_mcdiarmid(seam + 1e-11, DiameterVector(d)).value;
      REQUIRE(std::abs(lo - hi) < 1e-9);
    }
  }
}

TEST_CASE("permutation invariance in the diameters", "[property]") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + trial % 3;  // up to m = 4
    DiameterVector D = rand_D(rng, m);
    const double a = rng.uniform(0.0, sum(D));
    std::vector<double> shuffled = D.values();
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
    REQUIRE(optimal_mcdiarmid(a, DiameterVector(shuffled)).value ==
            Catch::Approx(optimal_mcdiarmid(a, D).value).margin(1e-9));
  }
}

TEST_CASE("zero diameters are dropped before evaluation") {
  REQUIRE(optimal_mcdiarmid(1.0, {2.0, 0.0, 0.0}).value ==
          Catch::Approx(optimal_mcdiarmid(1.0, {2.0}).value));
  REQUIRE(optimal_mcdiarmid(1.0, {3.0, 1.0, 0.0}).value ==
          Catch::Approx(optimal_mcdiarmid(1.0, {3.0, 1.0}).value));
  REQUIRE(optimal_mcdiarmid(1.0, {0.0, 0.0}).value == 0.0);
}

TEST_CASE("negative diameters are rejected") {
  REQUIRE_THROWS_AS(DiameterVector({1.0, -0.5}), InvalidArgument);
}

TEST_CASE("extremal measure data reproduces the bound value") {
  Rng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 3;
    DiameterVector D = rand_D(rng, m, 0.2, 5.0);
    const double a = rng.uniform(0.0, 0.95 * sum(D));
    OptimalBoundResult r = optimal_mcdiarmid(a, D);
    if (!r.extremal_alpha || !r.extremal_C) continue;
    // P[h^C >= a] under the reported alpha must equal the reported value,
    // and the mean constraint must hold.
    const std::size_t verts = std::size_t{1} << m;
    double prob = 0.0, mean = 0.0;
    for (std::size_t t = 0; t < verts; ++t) {
      double w = 1.0;
      for (std::size_t i = 0; i < m; ++i)
        w *= (t >> i) & 1 ? (*r.extremal_alpha)[i] : 1.0 - (*r.extremal_alpha)[i];
      const double h = hypercube_h(*r.extremal_C, static_cast<Vertex>(t), a, D.values());
      if (h >= a - 1e-12) prob += w;
      mean += w * h;
    }
    INFO("m=" << m << " a=" << a << " regime=" << r.regime);
    REQUIRE(prob == Catch::Approx(r.value).margin(1e-9));
    REQUIRE(mean <= 1e-9);
  }
}

TEST_CASE("hoeffding equals mcdiarmid for two variables") {
  HoeffdingBound h = optimal_hoeffding(1.0, {1.0, 1.0});
  REQUIRE(h.sharp);
  REQUIRE(h.value == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("hoeffding at the published three-variable point is the equal case") {
  HoeffdingBound h = optimal_hoeffding(5.5, {8.86, 7.20, 4.17});
  REQUIRE(h.sharp);  // F1 >= F2
  REQUIRE(h.value == Catch::Approx(0.437).margin(0.001));
}

TEST_CASE("a parameter sweep finds the strictly-below-mcdiarmid regime") {
  // the four-vertex interior candidate wins when the two smaller diameters
  // are comparable and large relative to the threshold
  bool found = false;
  for (double d = 0.5; d <= 8.0 && !found; d += 0.5) {
    HoeffdingBound h = optimal_hoeffding(0.1, {d, d, d});
    if (!h.sharp) {
      found = true;
      REQUIRE(h.mcdiarmid.regime == "m3-F2");
      // the marker still carries a valid (non-sharp) upper bound
      REQUIRE(h.value == h.mcdiarmid.value);
      REQUIRE(h.value <= classic_mcdiarmid(0.1, {d, d, d}) + 1e-9);
    }
  }
  REQUIRE(found);
}

TEST_CASE("hoeffding rejects unsupported dimensions") {
  REQUIRE_THROWS_AS(optimal_hoeffding(1.0, {1.0}), InvalidArgument);
  REQUIRE_THROWS_AS(optimal_hoeffding(1.0, {1.0, 1.0, 1.0, 1.0}), InvalidArgument);
}

TEST_CASE("four-variable tail regime is exact") {
  // a >= D1 + D2 + D4 puts the optimum on a single vertex
  DiameterVector D{4.0, 3.0, 2.0, 1.0};
  const double a = 8.5;  // >= 4 + 3 + 1
  OptimalBoundResult r = optimal_mcdiarmid(a, D);
  REQUIRE(r.regime.find("tail") != std::string::npos);
  // k = 3 branch of the recursive formula: (4+3+2-a)^3 / (27 * 24)
  const double expected = std::pow((9.0 - a) / 3.0, 3.0) / 24.0;
  REQUIRE(r.value == Catch::Approx(expected).epsilon(1e-12));
  REQUIRE(hypercube_oracle(a, D.values(), 64).value == Catch::Approx(r.value).margin(5e-3));
}

TEST_CASE("four-variable interior regime is numerical and oracle-consistent") {
  DiameterVector D{2.0, 1.8, 1.6, 1.4};
  const double a = 1.0;  // interior: below D1 + D2 + D4
  OptimalBoundResult r = optimal_mcdiarmid(a, D);
  REQUIRE(r.regime.find("numerical") != std::string::npos);
  REQUIRE(r.value <= classic_mcdiarmid(a, D) + 1e-9);
  // nested-family value can never beat the exhaustive search
  HypercubeOracleResult nested = hypercube_oracle_nested(a, D.values(), 64);
  REQUIRE(nested.value <= r.value + 1e-9);
}

TEST_CASE("porous-media bound equals the two-variable closed form") {
  // the displayed two-scale bound, written out independently
  auto porous = [](double a, double d1, double d2) {
    if (d1 + d2 <= a) return 0.0;
    if (std::abs(d1 - d2) <= a) return (d1 + d2 - a) * (d1 + d2 - a) / (4.0 * d1 * d2);
    return 1.0 - a / std::max(d1, d2);
  };
  Rng rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const double d1 = rng.uniform(0.1, 5.0);
    const double d2 = rng.uniform(0.1, 5.0);
    const double a = rng.uniform(0.0, 1.2 * (d1 + d2));
    const double lhs = porous(a, d1, d2);
    const double rhs = optimal_mcdiarmid(a, {d1, d2}).value;
    REQUIRE(lhs == Catch::Approx(rhs).margin(1e-15 + 1e-15 * lhs));
  }
}

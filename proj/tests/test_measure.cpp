#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ouq/measure.hpp"
#include "ouq/response.hpp"

using namespace ouq;

namespace {

ProductMeasure uniform_grid(const BoxDomain& box, std::size_t n) {
  std::vector<Marginal> marginals;
  for (const auto& ax : box.axes()) {
    std::vector<double> pos(n), wts(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      pos[i] = ax.lo + ax.width() * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    marginals.emplace_back(std::move(pos), std::move(wts));
  }
  return ProductMeasure(std::move(marginals));
}

ProductMeasure random_measure(Rng& rng, const BoxDomain& box, std::size_t max_atoms) {
  std::vector<Marginal> marginals;
  for (const auto& ax : box.axes()) {
    const std::size_t k = 1 + rng.index(max_atoms);
    std::vector<double> pos(k), wts(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      pos[i] = rng.uniform(ax.lo, ax.hi);
      wts[i] = rng.uniform(0.05, 1.0);
      sum += wts[i];
    }
    for (double& w : wts) w /= sum;
    double total = 0.0;
    for (double w : wts) total += w;
    wts.back() += 1.0 - total;
    marginals.emplace_back(std::move(pos), std::move(wts));
  }
  return ProductMeasure(std::move(marginals));
}

}  // namespace

TEST_CASE("expectation on a one-point measure is a function evaluation") {
  ProductMeasure pm({Marginal::dirac(0.7), Marginal::dirac(-2.0)});
  auto f = [](const std::vector<double>& x) { return 3.0 * x[0] + x[1] * x[1]; };
  REQUIRE(expectation(pm, f) == Catch::Approx(3.0 * 0.7 + 4.0).epsilon(1e-14));
}

TEST_CASE("expectation is linear in the marginal weights") {
  ProductMeasure pm({Marginal({0.0, 1.0}, {0.5, 0.5}), Marginal::dirac(0.0)});
  REQUIRE(expectation(pm, [](const std::vector<double>& x) { return x[0]; }) ==
          Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("uniform-grid expectation of the impact surrogate matches the published mean") {
  // Riemann-sum oracle on a 64^3 midpoint grid.
  ProductMeasure pm = uniform_grid(impact_box(), 64);
  const double mean = expectation(pm, [](const std::vector<double>& x) {
    return perforation_area(x[0], x[1], x[2]);
  });
  REQUIRE(mean == Catch::Approx(6.58).margin(0.01));
}

TEST_CASE("event probabilities are degenerate for constant predicates") {
  ProductMeasure pm({Marginal({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5})});
  REQUIRE(event_probability(pm, [](const std::vector<double>&) { return true; }) == 1.0);
  REQUIRE(event_probability(pm, [](const std::vector<double>&) { return false; }) == 0.0);
}

TEST_CASE("two-point seesaw measure puts exactly p on the failure side") {
  const double a = 2.0, D = 1.5, p = 0.37;
  ProductMeasure pm({Marginal({a, a - D}, {p, 1.0 - p})});
  REQUIRE(event_probability(pm, [&](const std::vector<double>& x) { return x[0] >= a; }) ==
          Catch::Approx(p).epsilon(1e-14));
}

TEST_CASE("expectation failure reports the offending support point") {
  ProductMeasure pm({Marginal({1.0, 3.0}, {0.5, 0.5})});
  auto f = [](const std::vector<double>& x) -> double {
    if (x[0] > 2.0) throw std::runtime_error("boom");
    return x[0];
  };
  REQUIRE_THROWS_WITH(expectation(pm, f),
                      Catch::Matchers::ContainsSubstring("3.0") &&
                          Catch::Matchers::ContainsSubstring("boom"));
}

TEST_CASE("encode/decode round-trips a valid measure") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{-2.0, 5.0, ""}});
  ParamLayout layout = ParamLayout::uniform(box, 3);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Marginal> ms;
    for (const auto& ax : box.axes()) {
      std::vector<double> pos(3), wts(3);
      double sum = 0.0;
      for (int i = 0; i < 3; ++i) {
        pos[i] = rng.uniform(ax.lo, ax.hi);
        wts[i] = rng.uniform(0.01, 1.0);
        sum += wts[i];
      }
      for (double& w : wts) w /= sum;
      double total = wts[0] + wts[1] + wts[2];
      wts[2] += 1.0 - total;
      ms.emplace_back(pos, wts);
    }
    ProductMeasure pm(std::move(ms));
    ProductMeasure back = layout.decode(layout.encode(pm));
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        REQUIRE(back.marginal(i).positions()[j] ==
                Catch::Approx(pm.marginal(i).positions()[j]).margin(1e-12));
        REQUIRE(back.marginal(i).weights()[j] ==
                Catch::Approx(pm.marginal(i).weights()[j]).margin(1e-12));
      }
    }
  }
}

TEST_CASE("equal raw weight parameters decode to uniform weights") {
  BoxDomain box({Axis{0.0, 1.0, ""}});
  ParamLayout layout = ParamLayout::uniform(box, 4);
  std::vector<double> v{0.1, 0.4, 0.6, 0.9, 2.5, 2.5, 2.5, 2.5};
  ProductMeasure pm = layout.decode(v);
  for (double w : pm.marginal(0).weights()) REQUIRE(w == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("out-of-interval raw positions clamp to the nearest endpoint") {
  BoxDomain box({Axis{1.0, 2.0, ""}});
  ParamLayout layout = ParamLayout::uniform(box, 2);
  ProductMeasure pm = layout.decode({-5.0, 99.0, 0.0, 0.0});
  REQUIRE(pm.marginal(0).positions()[0] == 1.0);
  REQUIRE(pm.marginal(0).positions()[1] == 2.0);
}

TEST_CASE("decode always produces a valid simplex for finite inputs") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{0.0, 1.0, ""}});
  ParamLayout layout = ParamLayout::uniform(box, 3);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(layout.dimension());
    for (double& x : v) x = rng.uniform(-50.0, 50.0);
    ProductMeasure pm = layout.decode(v);
    for (const auto& mg : pm.marginals()) {
      double sum = 0.0;
      for (double w : mg.weights()) {
        REQUIRE(w >= 0.0);
        sum += w;
      }
      REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("effective support counts atoms above tolerance after merging") {
  BoxDomain box({Axis{0.0, 1.0, ""}});
  SECTION("two well-separated atoms") {
    ProductMeasure pm({Marginal({0.1, 0.9}, {0.5, 0.5})});
    REQUIRE(effective_support(pm, box, 1e-4) == std::vector<std::size_t>{2});
  }
  SECTION("negligible weight drops out") {
    ProductMeasure pm({Marginal({0.1, 0.9}, {1.0 - 1e-6, 1e-6})});
    REQUIRE(effective_support(pm, box, 1e-4) == std::vector<std::size_t>{1});
  }
  SECTION("positions inside the merge radius pool together") {
    ProductMeasure pm({Marginal({0.5, 0.5 + 5e-4}, {0.4, 0.6})});
    REQUIRE(effective_support(pm, box, 1e-4) == std::vector<std::size_t>{1});
  }
}

TEST_CASE("expectation is linear over random measures", "[property]") {
  BoxDomain box({Axis{-1.0, 1.0, ""}, Axis{0.0, 2.0, ""}, Axis{-3.0, 3.0, ""}});
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    ProductMeasure pm = random_measure(rng, box, 4);
    const double c1 = rng.uniform(-2.0, 2.0), c2 = rng.uniform(-2.0, 2.0);
    auto f = [](const std::vector<double>& x) { return x[0] * x[1] + std::sin(x[2]); };
    auto g = [](const std::vector<double>& x) { return x[2] * x[2] - 0.5 * x[0]; };
    auto combo = [&](const std::vector<double>& x) { return c1 * f(x) + c2 * g(x); };
    REQUIRE(expectation(pm, combo) ==
            Catch::Approx(c1 * expectation(pm, f) + c2 * expectation(pm, g)).margin(1e-10));
  }
}

TEST_CASE("expectation of a constant equals the constant", "[property]") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{0.0, 1.0, ""}});
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ProductMeasure pm = random_measure(rng, box, 3);
    const double c = rng.uniform(-10.0, 10.0);
    REQUIRE(expectation(pm, [&](const std::vector<double>&) { return c; }) ==
            Catch::Approx(c).margin(1e-12));
    const double p = event_probability(pm, [&](const std::vector<double>& x) { return x[0] > 0.5; });
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
  }
}

TEST_CASE("permuting a marginal's atoms changes nothing", "[property]") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{0.0, 1.0, ""}});
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    ProductMeasure pm = random_measure(rng, box, 4);
    // reverse the atom order of every marginal
    std::vector<Marginal> rev;
    for (const auto& mg : pm.marginals()) {
      std::vector<double> p(mg.positions().rbegin(), mg.positions().rend());
      std::vector<double> w(mg.weights().rbegin(), mg.weights().rend());
      rev.emplace_back(std::move(p), std::move(w));
    }
    ProductMeasure pm2(std::move(rev));
    auto f = [](const std::vector<double>& x) { return std::exp(x[0]) * (1.0 + x[1]); };
    REQUIRE(expectation(pm, f) == Catch::Approx(expectation(pm2, f)).epsilon(1e-12));
    auto pred = [](const std::vector<double>& x) { return x[0] + x[1] >= 1.0; };
    REQUIRE(event_probability(pm, pred) ==
            Catch::Approx(event_probability(pm2, pred)).margin(1e-12));
  }
}

TEST_CASE("marginal validation rejects bad simplices") {
  REQUIRE_THROWS_AS(Marginal({0.0}, {0.5}), InvalidArgument);
  REQUIRE_THROWS_AS(Marginal({0.0, 1.0}, {0.7, 0.4}), InvalidArgument);
  REQUIRE_THROWS_AS(Marginal({0.0, 1.0}, {1.2, -0.2}), InvalidArgument);
  REQUIRE_THROWS_AS(Marginal({}, {}), InvalidArgument);
}

TEST_CASE("layout rejects wrong-length vectors") {
  BoxDomain box({Axis{0.0, 1.0, ""}});
  ParamLayout layout = ParamLayout::uniform(box, 2);
  REQUIRE_THROWS_AS(layout.decode({1.0, 2.0, 3.0}), InvalidArgument);
}

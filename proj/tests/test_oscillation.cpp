#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ouq/oscillation.hpp"

using namespace ouq;

TEST_CASE("oscillation of a constant is zero") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{-1.0, 1.0, ""}});
  ResponseModel f = ResponseModel::expression("4.2", box);
  REQUIRE(oscillation(f, 0).value == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(oscillation(f, 1).value == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("oscillation of a linear function is slope times width") {
  BoxDomain box({Axis{1.0, 4.0, ""}, Axis{0.0, 2.0, ""}});
  ResponseModel f = ResponseModel::expression("-2.5*x1 + 7*x2", box);
  REQUIRE(oscillation(f, 0).value == Catch::Approx(2.5 * 3.0).margin(1e-9));
  REQUIRE(oscillation(f, 1).value == Catch::Approx(7.0 * 2.0).margin(1e-9));
}

TEST_CASE("oscillation reports the achieving pair of points") {
  BoxDomain box({Axis{0.0, 1.0, ""}});
  ResponseModel f = ResponseModel::expression("x1^2", box);
  OscillationResult r = oscillation(f, 0);
  REQUIRE(r.value == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(r.point_hi[0] == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(r.point_lo[0] == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("surrogate sub-diameters match the published values") {
  ResponseModel h = ResponseModel::surrogate();
  const double d_thickness = oscillation(h, 0).value;
  const double d_obliquity = oscillation(h, 1).value;
  const double d_velocity = oscillation(h, 2).value;
  REQUIRE(d_thickness == Catch::Approx(8.86).margin(0.02));
  REQUIRE(d_obliquity == Catch::Approx(4.17).margin(0.02));
  REQUIRE(d_velocity == Catch::Approx(7.20).margin(0.02));
}

TEST_CASE("oscillation is invariant under adding a constant", "[property]") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{0.0, 1.0, ""}});
  ResponseModel f = ResponseModel::expression("sin(3*x1)*x2", box);
  ResponseModel g = ResponseModel::expression("sin(3*x1)*x2 + 17.5", box);
  for (std::size_t axis : {std::size_t{0}, std::size_t{1}})
    REQUIRE(oscillation(f, axis).value == Catch::Approx(oscillation(g, axis).value).margin(1e-7));
}

TEST_CASE("oscillation is subadditive (semi-norm)", "[property]") {
  BoxDomain box({Axis{0.0, 1.0, ""}, Axis{0.0, 1.0, ""}});
  const char* fs[] = {"x1^2", "cos(4*x1) + x2", "x1*x2", "tanh(2*x1 - 1)"};
  const char* gs[] = {"x2 - x1", "exp(x1)*0.3", "abs(x1 - 0.5)", "x1^3 - x2^2"};
  const double search_tol = 1e-6;
  for (const char* ftext : fs) {
    for (const char* gtext : gs) {
      ResponseModel f = ResponseModel::expression(ftext, box);
      ResponseModel g = ResponseModel::expression(gtext, box);
      ResponseModel sum =
          ResponseModel::expression(std::string(ftext) + " + (" + gtext + ")", box);
      for (std::size_t axis : {std::size_t{0}, std::size_t{1}}) {
        INFO(ftext << " + " << gtext << " axis " << axis);
        REQUIRE(oscillation(sum, axis).value <=
                oscillation(f, axis).value + oscillation(g, axis).value + search_tol);
      }
    }
  }
}

TEST_CASE("oscillation rejects a bad axis and non-finite responses") {
  BoxDomain box({Axis{0.0, 1.0, ""}});
  ResponseModel f = ResponseModel::expression("x1", box);
  REQUIRE_THROWS_AS(oscillation(f, 3), InvalidArgument);
  ResponseModel bad = ResponseModel::expression("1/(x1 - 0.5)", box);
  REQUIRE_THROWS(oscillation(bad, 0));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "foldcycle/foldcycle.hpp"

using namespace foldcycle;

namespace {

ModelSpec reversed_variant() {
  PolyTables t;
  t.fL = {{0, 1, -1.0}};
  t.gL = {{1, 0, 1.0}, {0, 1, 0.1}, {0, 0, 1.0}};
  t.fR = {{0, 1, -1.0}};
  t.gR = {{1, 0, 1.0}, {0, 1, 0.1}, {0, 0, -1.0}};
  return make_poly("reversed", t);
}

}  // namespace

TEST_CASE("cycle at x = -1e-6 against an independent reference") {
  ModelSpec m = make_mass_spring();
  CycleSolution s = find_cycle(m, -1e-6);
  // Reference fixed point from a high-accuracy independent integration.
  REQUIRE(s.y_fix == Catch::Approx(-0.031074264719).margin(5e-9));
  REQUIRE(s.y_fix == Catch::Approx(-0.031074263876554).margin(1e-11));
  REQUIRE(s.period == Catch::Approx(0.124257470948).margin(1e-9));
  REQUIRE(s.multiplier == Catch::Approx(0.987651).margin(1e-4));
  REQUIRE(s.stability == CycleStability::attracting);
  REQUIRE(s.fix_residual <= 1e-10);
  REQUIRE(s.scaling_ratio ==
          Catch::Approx(-1e-6 / std::pow(s.y_fix, 3)).epsilon(1e-12));
}

TEST_CASE("fixed point validates through the return map") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  CycleSolution s = find_cycle(m, -1e-4);
  PoincareResult p = poincare_map(m, -1e-4, s.y_fix, tol);
  REQUIRE(std::abs(p.y_out - s.y_fix) <= 1e-10);
  REQUIRE(p.period == Catch::Approx(s.period).margin(1e-12));
}

TEST_CASE("orbit accumulates on the fixed point") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  CycleSolution s = find_cycle(m, -1e-4);
  MapOrbit orbit = iterate_map(m, -1e-4, 1.2 * s.y_fix, 400, tol);
  REQUIRE_FALSE(orbit.escaped);
  REQUIRE(orbit.ys.size() == 401);
  REQUIRE(orbit.ys.front() == 1.2 * s.y_fix);
  REQUIRE(std::abs(orbit.ys.back() - s.y_fix) <= 1e-8);
  // Monotone approach: the distance to the fixed point never grows.
  for (std::size_t i = 0; i + 1 < orbit.ys.size(); ++i)
    REQUIRE(std::abs(orbit.ys[i + 1] - s.y_fix) <=
            std::abs(orbit.ys[i] - s.y_fix) + 1e-12);
}

TEST_CASE("orbit from outside the interval escapes") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  MapOrbit orbit = iterate_map(m, -1e-4, 0.05, 10, tol);
  REQUIRE(orbit.escaped);
  REQUIRE(orbit.ys.size() == 1);
}

TEST_CASE("mirrored drift constants give the mirrored cycle") {
  // (x, y) -> (-x, -y) conjugates the d-swapped model to the default one
  // with the parameter sign flipped.
  ModelSpec m = make_mass_spring();
  ModelSpec w = make_mass_spring(0.1, 0.1, 1.0, -1.0);
  CycleSolution a = find_cycle(m, -1e-6);
  CycleSolution b = find_cycle(w, 1e-6);
  REQUIRE(b.y_fix == Catch::Approx(-a.y_fix).epsilon(1e-9));
  REQUIRE(b.period == Catch::Approx(a.period).epsilon(1e-9));
  REQUIRE(b.stability == CycleStability::attracting);
}

TEST_CASE("cycle finder domain guards") {
  ModelSpec m = make_mass_spring();
  REQUIRE_THROWS_AS(find_cycle(m, 0.0), DomainViolation);

  WedgeRegion tight{0.2, 0.02};
  // Interval [1.05 cbrt(|x|/m), delta] excludes the fixed point.
  REQUIRE_THROWS_AS(find_cycle(m, -1e-6, {}, &tight), NoSignChange);

  WedgeRegion shallow{0.05, 0.3};
  // Slope at or below |alpha/beta| cannot bracket the predicted radius.
  REQUIRE_THROWS_AS(find_cycle(m, -1e-6, {}, &shallow), ConfigError);

  WedgeRegion small{0.2, 0.05};
  // |x| >= m delta^3 leaves no admissible interval.
  REQUIRE_THROWS_AS(find_cycle(m, -1e-4, {}, &small), DomainViolation);
}

TEST_CASE("reversed variant has no fixed point on the admissible side") {
  ModelSpec m = reversed_variant();
  REQUIRE_THROWS_AS(find_cycle(m, -1e-6), NoSignChange);
}

TEST_CASE("reversed variant orbits escape the interval") {
  ModelSpec m = reversed_variant();
  ToleranceSet tol;
  MapOrbit orbit = iterate_map(m, -1e-6, 0.1, 200, tol);
  REQUIRE(orbit.escaped);
  REQUIRE(orbit.ys.size() < 200);
}

TEST_CASE("scan over the parameter ladder") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  std::vector<double> xs;
  for (int k = 4; k <= 8; ++k) xs.push_back(-std::pow(10.0, -k));
  ScanResult scan = bifurcation_scan(m, xs, tol);

  REQUIRE(scan.errors.empty());
  REQUIRE(scan.rows.size() == 5);
  REQUIRE(scan.theory_ratio == Catch::Approx(0.1).margin(1e-12));
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    REQUIRE(scan.rows[i].x_param == xs[i]);
    REQUIRE(scan.rows[i].stability == CycleStability::attracting);
    REQUIRE(scan.rows[i].multiplier > 0.0);
    REQUIRE(scan.rows[i].multiplier < 1.0);
    REQUIRE(scan.rows[i].fix_residual <= 1e-10);
  }
  // Multipliers approach 1 from below as the parameter shrinks.
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i)
    REQUIRE(scan.rows[i].multiplier < scan.rows[i + 1].multiplier);

  // The measured ratio x / y^3 settles near 1/30, not the closed-form
  // alpha/|beta| value 0.1; the limit estimate is the finest row.
  REQUIRE(scan.limit_ratio_estimate == scan.rows.back().scaling_ratio);
  REQUIRE(scan.limit_ratio_estimate ==
          Catch::Approx(1.0 / 30.0).epsilon(2e-4));

  const std::string csv = scan_csv(scan);
  REQUIRE(csv.rfind("x,y_fix,period,multiplier,stability,scaling_ratio,"
                    "theory_ratio,fix_residual\n",
                    0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("scan reports per-row failures") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  ScanResult scan = bifurcation_scan(m, {-1e-5, 1e-5}, tol);
  REQUIRE(scan.rows.size() == 1);
  REQUIRE(scan.errors.size() == 1);
  REQUIRE(scan.errors[0].x_param == 1e-5);
  REQUIRE_FALSE(scan.errors[0].message.empty());
}

TEST_CASE("scan is deterministic") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  ScanResult a = bifurcation_scan(m, {-1e-4, -1e-5}, tol);
  ScanResult b = bifurcation_scan(m, {-1e-4, -1e-5}, tol);
  REQUIRE(scan_csv(a) == scan_csv(b));
}

TEST_CASE("period shrinks linearly with the cycle radius") {
  ModelSpec m = make_mass_spring();
  CycleSolution big = find_cycle(m, -1e-4);
  CycleSolution small = find_cycle(m, -1e-7);
  REQUIRE(small.period < big.period);
  // Period ~ 4 |y_fix| / g0 at leading order.
  REQUIRE(small.period / std::abs(small.y_fix) ==
          Catch::Approx(4.0).epsilon(0.02));
}

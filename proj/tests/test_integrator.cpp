#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "foldcycle/foldcycle.hpp"

using namespace foldcycle;

namespace {

const VectorField kHarmonic{[](double, double y) { return y; },
                            [](double x, double) { return -x; }};

Vec2 end_state(const std::vector<DenseStep>& steps) {
  return steps.back().eval(steps.back().t_end);
}

}  // namespace

TEST_CASE("harmonic oscillator closes after one period") {
  ToleranceSet tol;
  auto steps = integrate_mode(kHarmonic, {1.0, 0.0},
                              2.0 * std::numbers::pi, tol);
  Vec2 e = end_state(steps);
  REQUIRE(e.x == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(e.y == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("dense output stays on the trajectory") {
  ToleranceSet tol;
  auto steps = integrate_mode(kHarmonic, {1.0, 0.0}, 3.0, tol);
  REQUIRE(steps.size() > 3);
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    REQUIRE(steps[i].t_end == steps[i + 1].t_start);
    Vec2 a = steps[i].eval(steps[i].t_end);
    Vec2 b = steps[i + 1].eval(steps[i + 1].t_start);
    REQUIRE(inf_norm(a - b) < 1e-14);
  }
  // Interior samples against the exact solution (cos t, -sin t).
  for (const auto& d : steps) {
    const double tm = 0.5 * (d.t_start + d.t_end);
    Vec2 s = d.eval(tm);
    REQUIRE(s.x == Catch::Approx(std::cos(tm)).margin(1e-9));
    REQUIRE(s.y == Catch::Approx(-std::sin(tm)).margin(1e-9));
  }
}

TEST_CASE("self-convergence under tolerance tightening") {
  ToleranceSet loose;
  loose.rel = 1e-8;
  loose.abs = 1e-10;
  ToleranceSet tight;
  tight.rel = 1e-12;
  tight.abs = 1e-14;
  auto a = integrate_mode(kHarmonic, {1.0, 0.0}, 5.0, loose);
  auto b = integrate_mode(kHarmonic, {1.0, 0.0}, 5.0, tight);
  REQUIRE(inf_norm(end_state(a) - end_state(b)) < 1e-6);
}

TEST_CASE("unit drift crossing at t = 1") {
  const VectorField drift{[](double, double) { return 1.0; },
                          [](double, double) { return 0.0; }};
  ToleranceSet tol;
  CrossingEvent ev = advance_to_line(drift, 0.0, {0.0, 0.5}, 1.0, tol);
  REQUIRE(ev.t_star == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(ev.state.x == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(ev.state.y == 0.5);
  REQUIRE(ev.direction == 1);
}

TEST_CASE("event crossing against an independent reference") {
  // Mass-spring mode R from (-0.001, -0.05) reaching x = 0.001; reference
  // crossing time from a high-accuracy independent integration.
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  CrossingEvent ev =
      advance_to_line(m.field(Mode::R), 0.0, {-0.001, -0.05}, 0.001, tol);
  REQUIRE(ev.t_star == Catch::Approx(0.13037028664486358).margin(1e-10));
  REQUIRE(ev.state.x == Catch::Approx(0.001).margin(1e-12));
  REQUIRE(ev.state.y ==
          Catch::Approx(0.080354968922573045).margin(1e-10));
}

TEST_CASE("event step stays consistent after truncation") {
  // The recorded step of an event run is clipped at t*; its polynomial must
  // still reproduce the refined crossing state at the clipped end.
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  AdvanceResult r = advance_until_line(
      m.field(Mode::L), 0.53225500192979969,
      {0.001, 0.11903452051342021}, -0.001, tol, &m.box);
  REQUIRE(r.event.has_value());
  const DenseStep& last = r.steps.back();
  REQUIRE(last.t_end == r.event->t_star);
  REQUIRE(inf_norm(last.eval(last.t_end) - r.event->state) < 1e-12);
  // Samples just before the event sit on the approach side of the line.
  const double tq = last.t_start + 0.8 * (last.t_end - last.t_start);
  REQUIRE(last.eval(tq).x > -0.001);
}

TEST_CASE("no crossing within budget") {
  const VectorField away{[](double, double) { return -1.0; },
                         [](double, double) { return 0.0; }};
  ToleranceSet tol;
  tol.t_budget = 2.0;
  REQUIRE_THROWS_AS(advance_to_line(away, 0.0, {0.0, 0.0}, 1.0, tol),
                    NoCrossing);
}

TEST_CASE("tangential crossing rejected with timestamp") {
  // x-velocity 1e-9 at the line is below the transversality floor.
  const VectorField graze{[](double, double) { return 1e-9; },
                          [](double, double) { return 1.0; }};
  ToleranceSet tol;
  tol.t_budget = 5.0;
  try {
    advance_to_line(graze, 0.0, {0.0, 0.0}, 2e-9, tol);
    FAIL("expected TangentialCrossing");
  } catch (const TangentialCrossing& e) {
    REQUIRE(std::string(e.what()).find("t = ") != std::string::npos);
  }
}

TEST_CASE("step underflow on a non-smooth wall") {
  const VectorField wall{
      [](double x, double) {
        return x < 0.5 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
      },
      [](double, double) { return 0.0; }};
  ToleranceSet tol;
  REQUIRE_THROWS_AS(integrate_mode(wall, {0.0, 0.0}, 2.0, tol),
                    StepUnderflow);
}

TEST_CASE("box escape detected") {
  const VectorField drift{[](double, double) { return 1.0; },
                          [](double, double) { return 0.0; }};
  Box box{-1.0, 1.0, -1.0, 1.0};
  ToleranceSet tol;
  REQUIRE_THROWS_AS(integrate_mode(drift, {0.0, 0.0}, 10.0, tol, &box),
                    OutOfBox);
}

TEST_CASE("integration is deterministic") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  CrossingEvent a =
      advance_to_line(m.field(Mode::R), 0.0, {-0.001, -0.05}, 0.001, tol);
  CrossingEvent b =
      advance_to_line(m.field(Mode::R), 0.0, {-0.001, -0.05}, 0.001, tol);
  REQUIRE(a.t_star == b.t_star);
  REQUIRE(a.state.x == b.state.x);
  REQUIRE(a.state.y == b.state.y);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "foldcycle/foldcycle.hpp"

using namespace foldcycle;

namespace {

Jet drift_jet() {
  // f = y, g = 1 at the origin.
  Jet j;
  j.f0 = 0.0;
  j.g0 = 1.0;
  j.fx = 0.0;
  j.fy = 1.0;
  j.gx = 0.0;
  j.gy = 0.0;
  j.fyy = 0.0;
  return j;
}

}  // namespace

TEST_CASE("derivative identities on the quadratic drift field") {
  const VectorField v{[](double, double y) { return y; },
                      [](double, double) { return 1.0; }};
  DerivativeReport rep = verify_solution_jets(v, drift_jet());

  REQUIRE(rep.entries.size() == 19);
  std::set<int> orders;
  for (const auto& e : rep.entries) {
    orders.insert(e.order);
    REQUIRE(e.abs_error == std::abs(e.formula_value - e.numeric_value));
  }
  REQUIRE(orders == std::set<int>{1, 2, 3});
  REQUIRE(rep.max_abs_error(1) <= 1e-6);
  REQUIRE(rep.max_abs_error(2) <= 1e-6);
  REQUIRE(rep.max_abs_error(3) <= 1e-4);
  REQUIRE(rep.all_within(1e-6, 1e-4));

  // Exact flow x(t) = x0 + y0 t + t^2/2: the mixed and pure t-derivatives
  // at the origin are known outright.
  for (const auto& e : rep.entries) {
    if (e.name == "X_t") REQUIRE(e.formula_value == 0.0);
    if (e.name == "X_tt") REQUIRE(e.formula_value == 1.0);
    if (e.name == "X_ty") REQUIRE(e.formula_value == 1.0);
    if (e.name == "X_ttt") REQUIRE(e.formula_value == 0.0);
    if (e.name == "Y_t") REQUIRE(e.formula_value == 1.0);
  }
}

TEST_CASE("derivative identities on mass-spring mode R") {
  DerivativeReport rep = verify_solution_jets(make_mass_spring(), Mode::R);
  REQUIRE(rep.entries.size() == 19);
  REQUIRE(rep.all_within(1e-6, 1e-4));
}

TEST_CASE("derivative identities on the abs model") {
  // Fast dynamics (|g| = 100) inflate the fixed-spacing stencil error; the
  // identities still hold at the coarser scale.
  DerivativeReport rep = verify_solution_jets(make_abs(), Mode::R);
  REQUIRE(rep.max_abs_error(1) <= 1e-5);
  REQUIRE(rep.max_abs_error(2) <= 5e-3);
  REQUIRE(rep.max_abs_error(3) <= 2e-2);
  REQUIRE_FALSE(rep.all_within(1e-6, 1e-4));
}

TEST_CASE("off-fold reference point rejected") {
  const VectorField v{[](double, double) { return 1.0; },
                      [](double, double) { return 1.0; }};
  Jet j = drift_jet();
  j.f0 = 1.0;
  REQUIRE_THROWS_AS(verify_solution_jets(v, j), NotFold);
}

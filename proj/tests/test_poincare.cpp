#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "foldcycle/foldcycle.hpp"

using namespace foldcycle;

TEST_CASE("default region") {
  ModelSpec m = make_mass_spring();
  WedgeRegion r = default_region(m);
  // m = 2 |alpha| / |beta| and delta clamped by the box.
  REQUIRE(r.m == Catch::Approx(0.2).margin(1e-12));
  REQUIRE(r.delta == Catch::Approx(0.3).margin(1e-12));

  FoldAnalysis degenerate = analyze_fold(make_mass_spring(0.1, -0.1));
  REQUIRE_THROWS_AS(default_region(degenerate.coeffs, m.box),
                    InconclusiveVerdict);
}

TEST_CASE("half map against an independent reference") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  HalfMapResult r = half_map_P(m, Mode::R, 0.0, -0.02, tol);
  REQUIRE(r.y_out == Catch::Approx(0.019973370960).margin(1e-9));
  REQUIRE(r.flight_time > 0.0);
  REQUIRE_FALSE(r.arc.empty());
}

TEST_CASE("half map curvature approaches the measured coefficient") {
  // (P(y) + y) / y^2 tends to -1/15 for mode R and +1/15 for mode L; the
  // closed-form jet coefficient (-0.2 per mode) describes a different
  // normalization and is checked elsewhere.
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  const double aR =
      (half_map_P(m, Mode::R, 0.0, -0.005, tol).y_out - 0.005) / 2.5e-5;
  REQUIRE(aR == Catch::Approx(-1.0 / 15.0).margin(1e-3));
  const double aL =
      (half_map_P(m, Mode::L, 0.0, 0.005, tol).y_out + 0.005) / 2.5e-5;
  REQUIRE(aL == Catch::Approx(1.0 / 15.0).margin(1e-3));
}

TEST_CASE("half map is an involution up to the quadratic term") {
  // P_R(-P_R(y)) returns -y with an O(y^2) defect from the curvature.
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  const double y = -0.02;
  const double py = half_map_P(m, Mode::R, 0.0, y, tol).y_out;
  const double back = half_map_P(m, Mode::R, 0.0, -py, tol).y_out;
  REQUIRE(back == Catch::Approx(-y).margin(5.0 * y * y));
}

TEST_CASE("cross-gap transform gates its inputs") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  SECTION("mismatched target line") {
    REQUIRE_THROWS_AS(
        half_map_Ptilde(m, Mode::R, -0.001, 0.002, -0.05, tol),
        DomainViolation);
  }
  SECTION("zero gap is the identity") {
    HalfMapResult r = half_map_Ptilde(m, Mode::R, 0.0, 0.0, -0.05, tol);
    REQUIRE(r.y_out == -0.05);
    REQUIRE(r.flight_time == 0.0);
  }
  SECTION("outside the wedge") {
    REQUIRE_THROWS_AS(
        half_map_Ptilde(m, Mode::R, -0.01, 0.01, -0.02, tol),
        DomainViolation);
  }
}

TEST_CASE("point transform composes the two half maps") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  const double x = -1e-5;
  const double y = -0.04;

  HalfMapResult whole = point_transform(m, Mode::R, x, y, tol);
  HalfMapResult same = half_map_P(m, Mode::R, x, y, tol);
  HalfMapResult gap =
      half_map_Ptilde(m, Mode::R, x, -x, same.y_out, tol);
  REQUIRE(whole.y_out == Catch::Approx(gap.y_out).margin(2e-11));
  REQUIRE(whole.flight_time ==
          Catch::Approx(same.flight_time + gap.flight_time).margin(2e-11));
}

TEST_CASE("point transform rejects the inadmissible side") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  REQUIRE_THROWS_AS(point_transform(m, Mode::R, 1e-5, -0.04, tol),
                    DomainViolation);
}

TEST_CASE("return map against an independent reference") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  PoincareResult r = poincare_map(m, -1e-6, -0.02, tol);
  REQUIRE(r.y_in == -0.02);
  // Reference from a high-accuracy independent integration.
  REQUIRE(r.y_out == Catch::Approx(-0.0201455541).margin(1e-9));
  REQUIRE(r.y_out == Catch::Approx(-0.020145554109879411).margin(1e-12));
  REQUIRE(r.intermediate == Catch::Approx(0.020073055051231019).margin(1e-9));
  REQUIRE(r.period == Catch::Approx(0.080281282848460478).margin(1e-9));
  REQUIRE_FALSE(r.residual_data.has_value());
}

TEST_CASE("return map equals the two-mode composition") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  const double x = -1e-6;
  const double y = -0.02;
  PoincareResult whole = poincare_map(m, x, y, tol);
  HalfMapResult right = point_transform(m, Mode::R, x, y, tol);
  HalfMapResult left = point_transform(m, Mode::L, -x, right.y_out, tol);
  REQUIRE(whole.y_out == Catch::Approx(left.y_out).margin(4e-11));
  REQUIRE(whole.intermediate == Catch::Approx(right.y_out).margin(4e-11));
  REQUIRE(whole.period ==
          Catch::Approx(right.flight_time + left.flight_time).margin(4e-11));
}

TEST_CASE("return map reports incomplete runs") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  REQUIRE_THROWS_AS(poincare_map(m, 1e-6, -0.02, tol), Error);
}

TEST_CASE("residual needs the wedge") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  // |x| > m |y|^3: residual request must fail, plain map must not.
  REQUIRE_THROWS_AS(poincare_map(m, -1e-3, -0.02, tol, true),
                    DomainViolation);
  REQUIRE_NOTHROW(poincare_map(m, -1e-3, -0.02, tol, false));
}

TEST_CASE("residual value recomputes from the map") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  FoldCoefficients c = fold_coefficients(m);
  const double x = -1e-6;
  const double y = -0.02;
  PoincareResult r = poincare_map(m, x, y, tol, true);
  REQUIRE(r.residual_data.has_value());
  const double expect =
      r.y_out - y - c.alpha * y * y - c.beta * x / y;
  REQUIRE(r.residual_data->delta_value ==
          Catch::Approx(expect).margin(1e-14));
  REQUIRE(r.residual_data->ratio ==
          Catch::Approx(expect / (y * y)).margin(1e-9));
}

TEST_CASE("residual sweep shape and frozen tail") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  auto rows = residual_sweep(m, tol);
  REQUIRE(rows.size() == 7);
  WedgeRegion reg = default_region(m);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    REQUIRE(rows[j].j == static_cast<int>(j));
    REQUIRE(rows[j].y < 0.0);
    REQUIRE(rows[j].x < 0.0);
    REQUIRE(std::abs(rows[j].x) ==
            Catch::Approx(0.5 * reg.m * std::pow(std::abs(rows[j].y), 3))
                .epsilon(1e-12));
    if (j > 0) REQUIRE(rows[j].y == Catch::Approx(rows[j - 1].y / 2.0));
  }
  REQUIRE(rows.front().ratio == Catch::Approx(-0.244301).margin(1e-4));
  REQUIRE(rows.back().ratio == Catch::Approx(-0.266251).margin(1e-4));
}

TEST_CASE("flight-time asymptotics on the sweep tail") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  auto rows = residual_sweep(m, tol);
  const Jet jR = jet_at(m, Mode::R, {0.0, 0.0});
  const auto& r6 = rows.back();
  REQUIRE(r6.T / r6.y ==
          Catch::Approx(-2.0 / jR.g0).epsilon(0.05));
  REQUIRE(r6.Ttilde * r6.y / r6.x ==
          Catch::Approx(-2.0 / jR.fy).epsilon(0.05));
}

TEST_CASE("residual csv schema") {
  ModelSpec m = make_mass_spring();
  ToleranceSet tol;
  auto rows = residual_sweep(m, tol);
  const std::string csv = residual_csv(rows);
  REQUIRE(csv.rfind("j,y,x,P_y,delta,delta_over_y2,T,Ttilde\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 8);
}

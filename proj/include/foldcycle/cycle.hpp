#pragma once
// Fixed points of the composed return map: location by bracketed bisection,
// Floquet multiplier by central difference, and bifurcation scans tracking
// the cube-root growth of the cycle.

#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"
#include "normal_form.hpp"
#include "poincare.hpp"

namespace foldcycle {

inline constexpr double kTolFix = 1e-10;

enum class CycleStability { attracting, repelling };

inline const char* cycle_stability_name(CycleStability s) {
  return s == CycleStability::attracting ? "attracting" : "repelling";
}

struct CycleSolution {
  double x_param = 0.0;
  double y_fix = 0.0;
  double period = 0.0;
  double multiplier = 0.0;  // numerical P'(y_fix)
  CycleStability stability = CycleStability::repelling;
  double scaling_ratio = 0.0;  // x_param / y_fix^3
  double fix_residual = 0.0;   // |P(y_fix) - y_fix|
};

namespace detail {

inline double map_gap(const ModelSpec& model, double x, double y,
                      const ToleranceSet& tol) {
  return poincare_map(model, x, y, tol).y_out - y;
}

}  // namespace detail

// Locates the fixed point of the return map inside the one-sided interval
// -sign(g_R(0)) y in [cbrt|x/m|, delta]. Bisection is domain-safe there; a
// short secant polish recovers the lost accuracy.
inline CycleSolution find_cycle(const ModelSpec& model, double x_param,
                                ToleranceSet tol = {},
                                const WedgeRegion* region = nullptr) {
  if (x_param == 0.0)
    throw DomainViolation("x = 0 has no cycle; the lines coincide");
  const FoldAnalysis a = analyze_fold(model);
  const WedgeRegion reg =
      region ? *region : default_region(a.coeffs, model.box);
  if (a.coeffs.alpha != 0.0 && a.coeffs.beta != 0.0 &&
      reg.m <= std::abs(a.coeffs.alpha / a.coeffs.beta))
    throw ConfigError("wedge slope m must exceed |alpha/beta|");
  if (std::abs(x_param) >= reg.m * reg.delta * reg.delta * reg.delta)
    throw DomainViolation(
        "|x| >= m delta^3: the search interval is empty at this parameter");

  const int ys = a.verdict.predicted_y_sign;
  // Inner endpoint held off the wedge boundary, where the map expansion
  // degenerates.
  const double inner = 1.05 * std::cbrt(std::abs(x_param) / reg.m);
  const double outer = reg.delta;

  double wa = inner, wb = outer;
  double ga = detail::map_gap(model, x_param, ys * wa, tol);
  double gb = detail::map_gap(model, x_param, ys * wb, tol);
  if (ga == 0.0) wb = wa;
  else if (gb == 0.0) wa = wb;
  else if (sign_of(ga) == sign_of(gb))
    throw NoSignChange(
        "return map has no fixed point between the interval endpoints "
        "(gap signs " + std::to_string(ga) + ", " + std::to_string(gb) + ")");
  while (wb - wa > kTolFix) {
    const double wm = 0.5 * (wa + wb);
    const double gm = detail::map_gap(model, x_param, ys * wm, tol);
    if (gm == 0.0) {
      wa = wb = wm;
      break;
    }
    if (sign_of(gm) == sign_of(ga)) {
      wa = wm;
      ga = gm;
    } else {
      wb = wm;
    }
  }

  double y_fix = ys * 0.5 * (wa + wb);
  double g_fix = detail::map_gap(model, x_param, y_fix, tol);
  {
    // Secant polish seeded from the bisection endpoints.
    double y0 = ys * wa, g0 = ga;
    double y1 = y_fix, g1 = g_fix;
    for (int it = 0; it < 3 && g1 != g0; ++it) {
      const double y2 = y1 - g1 * (y1 - y0) / (g1 - g0);
      if (!std::isfinite(y2)) break;
      const double g2 = detail::map_gap(model, x_param, y2, tol);
      y0 = y1;
      g0 = g1;
      y1 = y2;
      g1 = g2;
      if (std::abs(g1) < std::abs(g_fix)) {
        y_fix = y1;
        g_fix = g1;
      }
    }
  }

  const PoincareResult at_fix = poincare_map(model, x_param, y_fix, tol);
  CycleSolution s;
  s.x_param = x_param;
  s.y_fix = y_fix;
  s.period = at_fix.period;
  s.fix_residual = std::abs(at_fix.y_out - y_fix);
  const double h = std::max(1e-7, 1e-4 * std::abs(y_fix));
  const double p_plus = poincare_map(model, x_param, y_fix + h, tol).y_out;
  const double p_minus = poincare_map(model, x_param, y_fix - h, tol).y_out;
  s.multiplier = (p_plus - p_minus) / (2.0 * h);
  s.stability = std::abs(s.multiplier) < 1.0 ? CycleStability::attracting
                                             : CycleStability::repelling;
  s.scaling_ratio = x_param / (y_fix * y_fix * y_fix);
  return s;
}

struct MapOrbit {
  std::vector<double> ys;  // y0, P(y0), P^2(y0), ...
  bool escaped = false;    // left the interval J before n iterates
};

inline MapOrbit iterate_map(const ModelSpec& model, double x_param, double y0,
                            int n, ToleranceSet tol = {},
                            const WedgeRegion* region = nullptr) {
  const FoldAnalysis a = analyze_fold(model);
  const WedgeRegion reg =
      region ? *region : default_region(a.coeffs, model.box);
  const int ys_sign = a.verdict.predicted_y_sign;
  const double inner = std::cbrt(std::abs(x_param) / reg.m);
  auto inside = [&](double y) {
    const double w = ys_sign * y;
    return w >= inner && w <= reg.delta;
  };

  MapOrbit orbit;
  orbit.ys.push_back(y0);
  double y = y0;
  for (int k = 0; k < n; ++k) {
    if (!inside(y)) {
      orbit.escaped = true;
      break;
    }
    y = poincare_map(model, x_param, y, tol).y_out;
    orbit.ys.push_back(y);
  }
  if (!orbit.escaped && !inside(y)) orbit.escaped = true;
  return orbit;
}

struct ScanError {
  double x_param = 0.0;
  std::string message;
};

struct ScanResult {
  std::vector<CycleSolution> rows;  // successful rows, input order
  std::vector<ScanError> errors;
  double limit_ratio_estimate = 0.0;  // scaling ratio at smallest |x|
  double theory_ratio = 0.0;          // -alpha / beta
};

// Runs find_cycle over the parameter list; rows run in parallel and failures
// are recorded without aborting the scan.
inline ScanResult bifurcation_scan(const ModelSpec& model,
                                   const std::vector<double>& x_list,
                                   ToleranceSet tol = {},
                                   const WedgeRegion* region = nullptr) {
  const FoldAnalysis a = analyze_fold(model);
  ScanResult out;
  out.theory_ratio = a.verdict.predicted_cuberoot_ratio;

  std::vector<std::future<CycleSolution>> jobs;
  jobs.reserve(x_list.size());
  for (double x : x_list)
    jobs.push_back(std::async(std::launch::async, [&, x] {
      return find_cycle(model, x, tol, region);
    }));
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      out.rows.push_back(jobs[i].get());
    } catch (const Error& e) {
      out.errors.push_back({x_list[i], e.what()});
    }
  }
  if (!out.rows.empty()) out.limit_ratio_estimate = out.rows.back().scaling_ratio;
  return out;
}

inline std::string scan_csv(const ScanResult& scan) {
  std::string out =
      "x,y_fix,period,multiplier,stability,scaling_ratio,theory_ratio,"
      "fix_residual\n";
  for (const auto& r : scan.rows)
    out += csv_row({fmt_g17(r.x_param), fmt_g17(r.y_fix), fmt_g17(r.period),
                    fmt_g17(r.multiplier), cycle_stability_name(r.stability),
                    fmt_g17(r.scaling_ratio), fmt_g17(scan.theory_ratio),
                    fmt_g17(r.fix_residual)});
  return out;
}

}  // namespace foldcycle

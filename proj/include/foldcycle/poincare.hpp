#pragma once
// Half maps and the composed return map on the switching line, plus the
// residual sweep that measures how fast the quadratic model is approached.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "hybrid.hpp"
#include "integrator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "normal_form.hpp"

namespace foldcycle {

// Validity wedge around the fold: ordinates up to delta on the predicted
// side, parameters with |x| <= m |y|^3.
struct WedgeRegion {
  double m = 0.0;
  double delta = 0.0;
};

inline WedgeRegion default_region(const FoldCoefficients& c, const Box& box) {
  if (c.alpha == 0.0 || c.beta == 0.0)
    throw InconclusiveVerdict(
        "vanishing quadratic coefficient; no validity wedge");
  WedgeRegion r;
  r.m = 2.0 * std::abs(c.alpha) / std::abs(c.beta);
  r.delta = std::min(0.1 * box.y_half_extent(),
                     std::cbrt(0.75 * box.x_margin() / r.m));
  return r;
}

inline WedgeRegion default_region(const ModelSpec& model) {
  return default_region(fold_coefficients(model), model.box);
}

struct HalfMapResult {
  double y_out = 0.0;
  // Signed: negative when the geometric map runs backward in time.
  double flight_time = 0.0;
  // Accepted steps of the run, in integration order. Backward runs record
  // the time-reversed field's steps.
  std::vector<DenseStep> arc;
};

namespace detail {

struct NegatedField {
  const VectorField* v;
  Vec2 operator()(Vec2 s) const {
    Vec2 w = (*v)(s);
    return {-w.x, -w.y};
  }
};

inline double clamp_first_step(double t_est) {
  return std::clamp(t_est / 8.0, 1e-10, 1.0);
}

template <PlanarField F>
HalfMapResult crossing_run(const F& field, Vec2 start, double line_x,
                           bool forward, const ToleranceSet& tol,
                           const Box* box) {
  HalfMapResult out;
  if (forward) {
    AdvanceResult r = advance_until_line(field, 0.0, start, line_x, tol, box);
    if (!r.event)
      throw NoCrossing("no crossing of x = " + std::to_string(line_x) +
                       " within time budget");
    out.y_out = r.event->state.y;
    out.flight_time = r.event->t_star;
    out.arc = std::move(r.steps);
  } else {
    NegatedField neg{&field};
    AdvanceResult r = advance_until_line(neg, 0.0, start, line_x, tol, box);
    if (!r.event)
      throw NoCrossing("no crossing of x = " + std::to_string(line_x) +
                       " within time budget (backward run)");
    out.y_out = r.event->state.y;
    out.flight_time = -r.event->t_star;
    out.arc = std::move(r.steps);
  }
  return out;
}

// Wedge slope for the cross-gap map when the caller leaves it implicit.
inline double resolved_wedge_m(const ModelSpec& model,
                               const std::optional<double>& m) {
  if (m) return *m;
  return default_region(model).m;
}

}  // namespace detail

// Same-line half map: from (line_x, y) along the mode's flow back to the
// first nonzero return on the same line. Runs backward in time when the
// excursion only exists in the past; flight_time carries the sign.
inline HalfMapResult half_map_P(const ModelSpec& model, Mode mode,
                                double line_x, double y,
                                ToleranceSet tol = {}) {
  const VectorField& field = model.field(mode);
  const double u = nullcline_u(model, mode, line_x);
  double g_ref = field.g(line_x, y);
  if (g_ref == 0.0) g_ref = field.g(line_x, u);
  if (g_ref == 0.0)
    throw DegenerateJet("y-velocity vanishes on the switching line");

  const double d = y - u;
  const bool forward = sign_of(d) != sign_of(g_ref) || d == 0.0;
  tol.first_step =
      detail::clamp_first_step(2.0 * std::abs(d) / std::abs(g_ref));
  return detail::crossing_run(field, {line_x, y}, line_x, forward, tol,
                              &model.box);
}

// Cross-gap half map: from (from_line, y) to the opposite line -from_line,
// defined on the wedge |from_line| <= m |y|^3 where the flight stays short.
// The trajectory never meets the nullcline in between, so the crossing is
// monotone in x; flight_time is negative when it lies in the past.
inline HalfMapResult half_map_Ptilde(const ModelSpec& model, Mode mode,
                                     double from_line, double to_line,
                                     double y, ToleranceSet tol = {},
                                     std::optional<double> m = std::nullopt) {
  if (to_line != -from_line)
    throw DomainViolation("cross-gap map requires to_line == -from_line");
  if (from_line == 0.0) return {y, 0.0, {}};

  const double m_used = detail::resolved_wedge_m(model, m);
  if (std::abs(from_line) > m_used * std::abs(y * y * y))
    throw DomainViolation("(x, y) outside the wedge |x| <= m |y|^3");

  const VectorField& field = model.field(mode);
  const Jet j = jet_at(model, mode, {0.0, 0.0});
  const double dir_sign = -sign_of(j.fy * from_line * y);
  tol.first_step =
      detail::clamp_first_step(2.0 * std::abs(from_line / (j.fy * y)));
  return detail::crossing_run(field, {from_line, y}, to_line, dir_sign >= 0,
                              tol, &model.box);
}

// One mode's full contribution to the return map: same-line excursion then
// gap crossing, as a single forward integration from (x_param, y) to the
// opposite line -x_param.
inline HalfMapResult point_transform(const ModelSpec& model, Mode mode,
                                     double x_param, double y,
                                     ToleranceSet tol = {},
                                     const WedgeRegion* region = nullptr) {
  const VectorField& field = model.field(mode);
  const Jet j = jet_at(model, mode, {0.0, 0.0});
  if (x_param != 0.0 && sign_of(x_param) != -sign_of(j.fy * j.g0))
    throw DomainViolation(
        "start line lies on the wrong side for this mode's transform");
  if (region) {
    const double w = -sign_of(j.g0) * y;
    const double inner = std::cbrt(std::abs(x_param) / region->m);
    if (!(w >= inner && w <= region->delta))
      throw DomainViolation("start ordinate outside the transform's domain");
  }

  const double u = nullcline_u(model, mode, x_param);
  const double d = y - u;
  double g_ref = field.g(x_param, y);
  if (g_ref == 0.0) g_ref = j.g0;
  if (d * sign_of(g_ref) > 1e-12)
    throw DomainViolation(
        "start ordinate on the far side of the nullcline; the transform "
        "would run backward");

  tol.first_step =
      detail::clamp_first_step(2.0 * std::abs(d) / std::abs(g_ref));
  return detail::crossing_run(field, {x_param, y}, -x_param, true, tol,
                              &model.box);
}

// Defect of the quadratic model at one probe: P(y) - y - alpha y^2 -
// beta x / y, and its size relative to y^2.
struct NormalFormResidual {
  double y = 0.0;
  double x_param = 0.0;
  double delta_value = 0.0;
  double ratio = 0.0;  // delta_value / y^2
};

// One full revolution of the relay system, recorded as the return map on the
// line x = x_param (mode R start, two switches).
struct PoincareResult {
  double y_in = 0.0;
  double y_out = 0.0;
  double period = 0.0;
  // Ordinate at the intermediate crossing of x = -x_param.
  double intermediate = 0.0;
  std::optional<NormalFormResidual> residual_data;
};

inline PoincareResult poincare_map(const ModelSpec& model, double x_param,
                                   double y, ToleranceSet tol = {},
                                   bool want_residual = false,
                                   const WedgeRegion* region = nullptr) {
  StopRule stop;
  stop.max_switches = 2;
  HybridTrajectory traj =
      simulate(model, x_param, {x_param, y}, stop, tol, Mode::R);
  if (traj.switches.size() != 2)
    throw NoCrossing("return map incomplete: " +
                     std::to_string(traj.switches.size()) +
                     " switches within budget");
  PoincareResult r;
  r.y_in = y;
  r.intermediate = traj.switches[0].state.y;
  r.y_out = traj.switches[1].state.y;
  r.period = traj.switches[1].t;

  if (want_residual) {
    const FoldCoefficients c = fold_coefficients(model);
    const double m =
        region ? region->m : default_region(c, model.box).m;
    if (std::abs(x_param) > m * std::abs(y * y * y))
      throw DomainViolation(
          "residual undefined outside the wedge |x| <= m |y|^3");
    NormalFormResidual res;
    res.y = y;
    res.x_param = x_param;
    res.delta_value = r.y_out - y - c.alpha * y * y - c.beta * x_param / y;
    res.ratio = res.delta_value / (y * y);
    r.residual_data = res;
  }
  return r;
}

struct ResidualRow {
  int j = 0;
  double y = 0.0;
  double x = 0.0;
  double Py = 0.0;
  double delta = 0.0;
  double ratio = 0.0;  // delta / y^2
  double T = 0.0;      // same-line flight time at (x, y), mode R
  double Ttilde = 0.0; // cross-gap flight time at (x, y), mode R
};

// Halving sweep toward the fold along the wedge spine y_j = y0 / 2^j,
// x_j on the admissible side with |x_j| = m |y_j|^3 / 2.
inline std::vector<ResidualRow> residual_sweep(const ModelSpec& model,
                                               ToleranceSet tol = {},
                                               int levels = 7) {
  const FoldAnalysis a = analyze_fold(model);
  const WedgeRegion region = default_region(a.coeffs, model.box);

  std::vector<ResidualRow> rows;
  rows.reserve(levels);
  for (int j = 0; j < levels; ++j) {
    ResidualRow row;
    row.j = j;
    row.y = a.verdict.predicted_y_sign * region.delta * std::ldexp(1.0, -j);
    row.x = a.verdict.required_x_sign * 0.5 * region.m *
            std::abs(row.y * row.y * row.y);
    const PoincareResult pr =
        poincare_map(model, row.x, row.y, tol, true, &region);
    row.Py = pr.y_out;
    row.delta = pr.residual_data->delta_value;
    row.ratio = pr.residual_data->ratio;
    row.T = half_map_P(model, Mode::R, row.x, row.y, tol).flight_time;
    row.Ttilde = half_map_Ptilde(model, Mode::R, row.x, -row.x, row.y, tol,
                                 region.m)
                     .flight_time;
    rows.push_back(row);
  }
  return rows;
}

inline std::string residual_csv(const std::vector<ResidualRow>& rows) {
  std::string out = "j,y,x,P_y,delta,delta_over_y2,T,Ttilde\n";
  for (const auto& r : rows)
    out += csv_row({std::to_string(r.j), fmt_g17(r.y), fmt_g17(r.x),
                    fmt_g17(r.Py), fmt_g17(r.delta), fmt_g17(r.ratio),
                    fmt_g17(r.T), fmt_g17(r.Ttilde)});
  return out;
}

}  // namespace foldcycle

#pragma once
// Dormand-Prince 5(4) integration with 4th-order dense output, plus
// detection and sharpening of vertical-line crossings x = c.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "errors.hpp"

namespace foldcycle {

template <typename F>
concept PlanarField = requires(F f, Vec2 v) {
  { f(v) } -> std::convertible_to<Vec2>;
};

struct ToleranceSet {
  double rel = 1e-10;
  double abs = 1e-12;
  double tol_event = 1e-11;
  double tol_transversal = 1e-8;
  double t_budget = 1e3;
  double t_min = 1e-12;
  // Optional initial step hint; 0 means choose automatically.
  double first_step = 0.0;
};

// One accepted step with its interpolating polynomial. eval is 4th-order
// accurate anywhere inside [t_start, t_end].
struct DenseStep {
  double t_start = 0.0;
  // End of the recorded range; at an event this is clipped below
  // t_start + t_span without invalidating the polynomial.
  double t_end = 0.0;
  // Length of the integration step the polynomial was built over.
  double t_span = 0.0;
  Vec2 c1, c2, c3, c4, c5;
  double error_estimate = 0.0;

  Vec2 eval(double t) const {
    const double th = t_span != 0.0 ? (t - t_start) / t_span : 0.0;
    const double th1 = 1.0 - th;
    return c1 + th * (c2 + th1 * (c3 + th * (c4 + th1 * c5)));
  }
};

struct CrossingEvent {
  double t_star = 0.0;
  Vec2 state;
  double line_x = 0.0;
  // Sign of xdot at the crossing.
  int direction = 0;
};

namespace detail {

// Dormand-Prince coefficients (Hairer-Norsett-Wanner DOPRI5).
inline constexpr double a21 = 0.2;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                        a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                        a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                        a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

inline bool finite(Vec2 v) {
  return std::isfinite(v.x) && std::isfinite(v.y);
}

}  // namespace detail

// Adaptive DOPRI5 stepper over a fixed planar field. Steps forward in an
// internal time variable; callers integrate backward by negating the field.
template <PlanarField F>
class Dopri5 {
 public:
  Dopri5(F field, ToleranceSet tol) : field_(std::move(field)), tol_(tol) {}

  void start(double t0, Vec2 y0) {
    t_ = t0;
    y_ = y0;
    k1_ = field_(y_);
    have_k1_ = true;
    h_ = tol_.first_step > 0.0 ? tol_.first_step : initial_step();
    just_rejected_ = false;
  }

  double t() const { return t_; }
  Vec2 y() const { return y_; }

  // Advances by one accepted step, never past t_limit. Returns the dense
  // interpolant for the accepted interval.
  DenseStep step(double t_limit) {
    for (;;) {
      double h = std::min(h_, t_limit - t_);
      if (h <= 0.0) h = h_;
      if (h < 1e-14 * std::max(1.0, std::abs(t_)))
        throw StepUnderflow("step size " + std::to_string(h) +
                            " underflowed at t = " + std::to_string(t_));

      const Vec2 k1 = k1_;
      const Vec2 k2 = field_(y_ + h * (detail::a21 * k1));
      const Vec2 k3 = field_(y_ + h * (detail::a31 * k1 + detail::a32 * k2));
      const Vec2 k4 = field_(y_ + h * (detail::a41 * k1 + detail::a42 * k2 +
                                       detail::a43 * k3));
      const Vec2 k5 = field_(y_ + h * (detail::a51 * k1 + detail::a52 * k2 +
                                       detail::a53 * k3 + detail::a54 * k4));
      const Vec2 k6 = field_(y_ + h * (detail::a61 * k1 + detail::a62 * k2 +
                                       detail::a63 * k3 + detail::a64 * k4 +
                                       detail::a65 * k5));
      const Vec2 ynew = y_ + h * (detail::a71 * k1 + detail::a73 * k3 +
                                  detail::a74 * k4 + detail::a75 * k5 +
                                  detail::a76 * k6);
      const Vec2 k7 = field_(ynew);

      const Vec2 errv = h * (detail::e1 * k1 + detail::e3 * k3 +
                             detail::e4 * k4 + detail::e5 * k5 +
                             detail::e6 * k6 + detail::e7 * k7);
      double err;
      if (!detail::finite(ynew) || !detail::finite(errv)) {
        err = 10.0;  // force rejection
      } else {
        const double skx =
            tol_.abs + tol_.rel * std::max(std::abs(y_.x), std::abs(ynew.x));
        const double sky =
            tol_.abs + tol_.rel * std::max(std::abs(y_.y), std::abs(ynew.y));
        const double ex = errv.x / skx;
        const double ey = errv.y / sky;
        err = std::sqrt(0.5 * (ex * ex + ey * ey));
      }

      double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
      fac = std::clamp(fac, 0.2, just_rejected_ ? 1.0 : 5.0);

      if (err <= 1.0) {
        DenseStep d;
        d.t_start = t_;
        d.t_end = t_ + h;
        d.t_span = h;
        d.error_estimate = err;
        const Vec2 ydiff = ynew - y_;
        d.c1 = y_;
        d.c2 = ydiff;
        d.c3 = h * k1 - ydiff;
        d.c4 = ydiff - h * k7 - d.c3;
        d.c5 = h * (detail::d1 * k1 + detail::d3 * k3 + detail::d4 * k4 +
                    detail::d5 * k5 + detail::d6 * k6 + detail::d7 * k7);

        t_ += h;
        y_ = ynew;
        k1_ = k7;  // FSAL
        h_ = h * fac;
        just_rejected_ = false;
        return d;
      }
      h_ = h * fac;
      just_rejected_ = true;
    }
  }

 private:
  // Hairer's automatic initial step selection (hinit).
  double initial_step() const {
    const double sk0 = tol_.abs + tol_.rel * inf_norm(y_);
    const double d0 = inf_norm(y_) / sk0;
    const double d1n = inf_norm(k1_) / sk0;
    double h0 = (d0 < 1e-10 || d1n < 1e-10) ? 1e-6 : 0.01 * (d0 / d1n);
    const Vec2 y1 = y_ + h0 * k1_;
    const Vec2 f1 = field_(y1);
    const double d2 = inf_norm(f1 - k1_) / sk0 / h0;
    double h1;
    const double dm = std::max(d1n, d2);
    if (dm <= 1e-15)
      h1 = std::max(1e-6, h0 * 1e-3);
    else
      h1 = std::pow(0.01 / dm, 0.2);
    return std::min(100.0 * h0, h1);
  }

  F field_;
  ToleranceSet tol_;
  double t_ = 0.0;
  Vec2 y_;
  Vec2 k1_;
  bool have_k1_ = false;
  double h_ = 0.0;
  bool just_rejected_ = false;
};

namespace detail {

// Sharpens a bracketed root of X(t) - c inside one dense step: bisection to
// near-machine bracket width, then two Newton corrections using the actual
// field for the derivative.
template <PlanarField F>
CrossingEvent refine_crossing(const F& field, const DenseStep& d, double lo,
                              double hi, double c,
                              const ToleranceSet& tol) {
  auto val = [&](double t) { return d.eval(t).x - c; };
  double flo = val(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = val(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double t_star = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const Vec2 s = d.eval(t_star);
    const double xdot = field(s).x;
    if (xdot == 0.0) break;
    double tn = t_star - (s.x - c) / xdot;
    tn = std::clamp(tn, d.t_start, d.t_end);
    t_star = tn;
  }

  CrossingEvent ev;
  ev.t_star = t_star;
  ev.state = d.eval(t_star);
  ev.state.x = c;  // land exactly on the line
  ev.line_x = c;
  const double xdot = field(ev.state).x;
  if (std::abs(xdot) <= tol.tol_transversal)
    throw TangentialCrossing("crossing of x = " + std::to_string(c) +
                             " at t = " + std::to_string(t_star) +
                             " with |xdot| = " + std::to_string(std::abs(xdot)));
  ev.direction = xdot > 0.0 ? +1 : -1;
  return ev;
}

// Scans one dense step for the earliest sign change of X(t) - c at or after
// t_from, ignoring roots earlier than t_reject.
template <PlanarField F>
std::optional<CrossingEvent> scan_step(const F& field, const DenseStep& d,
                                       double c, double t_from,
                                       double t_reject,
                                       const ToleranceSet& tol) {
  constexpr int kSub = 16;
  const double a = std::max(d.t_start, t_from);
  const double b = d.t_end;
  if (b <= a) return std::nullopt;
  double tprev = a;
  double vprev = d.eval(tprev).x - c;
  for (int i = 1; i <= kSub; ++i) {
    const double ti = a + (b - a) * (static_cast<double>(i) / kSub);
    const double vi = d.eval(ti).x - c;
    // Strict sign change or exact landing. A zero left endpoint is a
    // departure from the line, not a crossing.
    const bool sign_change = (vprev < 0.0 && vi > 0.0) ||
                             (vprev > 0.0 && vi < 0.0) ||
                             (vprev != 0.0 && vi == 0.0);
    if (sign_change) {
      CrossingEvent ev = refine_crossing(field, d, tprev, ti, c, tol);
      if (ev.t_star >= t_reject) return ev;
      // Root predates the admissible window (start-on-line artifact):
      // keep scanning the remainder of the step.
    }
    tprev = ti;
    vprev = vi;
  }
  return std::nullopt;
}

}  // namespace detail

// Integrates one smooth mode from (0, y0) for t_max time units with no event
// watching, returning the accepted steps with their interpolants.
template <PlanarField F>
std::vector<DenseStep> integrate_mode(const F& field, Vec2 y0, double t_max,
                                      const ToleranceSet& tol,
                                      const Box* box = nullptr) {
  std::vector<DenseStep> steps;
  Dopri5<F> solver(field, tol);
  solver.start(0.0, y0);
  while (solver.t() < t_max) {
    steps.push_back(solver.step(t_max));
    if (box && !box->contains(solver.y()))
      throw OutOfBox("trajectory left the working box at t = " +
                     std::to_string(solver.t()));
  }
  return steps;
}

struct AdvanceResult {
  std::optional<CrossingEvent> event;
  std::vector<DenseStep> steps;
};

// Integrates the field from (t0, y0) until the trajectory crosses x = line_x
// or the time budget runs out. Crossings earlier than t0 + t_min are treated
// as residue of starting on the line and skipped.
template <PlanarField F>
AdvanceResult advance_until_line(const F& field, double t0, Vec2 y0,
                                 double line_x, const ToleranceSet& tol,
                                 const Box* box = nullptr) {
  AdvanceResult out;
  Dopri5<F> solver(field, tol);
  solver.start(t0, y0);
  const double t_end = t0 + tol.t_budget;
  const double t_reject = t0 + tol.t_min;
  while (solver.t() < t_end) {
    DenseStep d = solver.step(t_end);
    auto ev = detail::scan_step(field, d, line_x, d.t_start, t_reject, tol);
    if (ev) {
      d.t_end = ev->t_star;  // truncate the recorded arc at the event
      out.steps.push_back(d);
      out.event = *ev;
      return out;
    }
    out.steps.push_back(d);
    if (box && !box->contains(solver.y()))
      throw OutOfBox("trajectory left the working box at t = " +
                     std::to_string(solver.t()));
  }
  return out;
}

template <PlanarField F>
CrossingEvent advance_to_line(const F& field, double t0, Vec2 y0,
                              double line_x, const ToleranceSet& tol,
                              const Box* box = nullptr) {
  AdvanceResult r = advance_until_line(field, t0, y0, line_x, tol, box);
  if (!r.event)
    throw NoCrossing("no crossing of x = " + std::to_string(line_x) +
                     " within time budget " + std::to_string(tol.t_budget));
  return *r.event;
}

}  // namespace foldcycle

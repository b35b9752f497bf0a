#pragma once
// Relay simulation: piecewise-smooth flow with hysteretic mode switching on
// the pair of vertical lines x = x_param and x = -x_param.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"

namespace foldcycle {

struct StopRule {
  int max_switches = 64;
  double max_time = std::numeric_limits<double>::infinity();
};

struct SwitchRecord {
  double t = 0.0;
  Vec2 state;
  Mode from = Mode::R;
  Mode to = Mode::L;
};

struct Arc {
  Mode mode = Mode::R;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<DenseStep> steps;
};

enum class StopReason { switch_limit, time_limit, budget_exhausted };

struct HybridTrajectory {
  double x_param = 0.0;
  std::vector<Arc> arcs;
  std::vector<SwitchRecord> switches;
  double t_end = 0.0;
  Vec2 state_end;
  StopReason reason = StopReason::budget_exhausted;
};

// Crossing x = x_param engages mode R and crossing x = -x_param engages
// mode L, so an active mode only responds to the line of the other one;
// reaching its own engagement line again is a no-op.
inline double switch_line(Mode active, double x_param) {
  return active == Mode::R ? -x_param : x_param;
}

inline HybridTrajectory simulate(const ModelSpec& model, double x_param,
                                 Vec2 init, StopRule stop = {},
                                 ToleranceSet tol = {},
                                 Mode init_mode = Mode::R) {
  HybridTrajectory traj;
  traj.x_param = x_param;

  Mode mode = init_mode;
  double t = 0.0;
  Vec2 state = init;

  for (;;) {
    if (static_cast<int>(traj.switches.size()) >= stop.max_switches) {
      traj.reason = StopReason::switch_limit;
      break;
    }
    ToleranceSet arc_tol = tol;
    bool time_bound = false;
    if (std::isfinite(stop.max_time) && stop.max_time - t < arc_tol.t_budget) {
      arc_tol.t_budget = stop.max_time - t;
      time_bound = true;
      if (arc_tol.t_budget <= 0.0) {
        traj.reason = StopReason::time_limit;
        break;
      }
    }

    const auto& field = model.field(mode);
    AdvanceResult r = advance_until_line(
        field, t, state, switch_line(mode, x_param), arc_tol, &model.box);

    Arc arc;
    arc.mode = mode;
    arc.t_start = t;
    arc.steps = std::move(r.steps);
    arc.t_end = arc.steps.empty() ? t : arc.steps.back().t_end;

    if (!r.event) {
      traj.arcs.push_back(std::move(arc));
      t = traj.arcs.back().t_end;
      state = traj.arcs.back().steps.empty()
                  ? state
                  : traj.arcs.back().steps.back().eval(t);
      traj.reason =
          time_bound ? StopReason::time_limit : StopReason::budget_exhausted;
      break;
    }

    arc.t_end = r.event->t_star;
    traj.arcs.push_back(std::move(arc));

    SwitchRecord sw;
    sw.t = r.event->t_star;
    sw.state = r.event->state;
    sw.from = mode;
    sw.to = opposite(mode);
    traj.switches.push_back(sw);

    mode = sw.to;
    t = sw.t;
    state = sw.state;
  }

  traj.t_end = t;
  traj.state_end = state;
  return traj;
}

// Walks the trajectory on a uniform grid per arc, handing each sample to the
// callback as (t, state, mode, event); mode switches land as exact rows with
// event = 1.
template <typename RowFn>
void sample_trajectory(const HybridTrajectory& traj, double dt, RowFn row) {
  std::size_t next_switch = 0;
  // An arc that begins at a just-emitted switch row starts its grid one step
  // in, so timestamps stay strictly increasing.
  bool at_switch = false;
  for (const auto& arc : traj.arcs) {
    std::size_t si = 0;
    const bool switch_row_follows =
        next_switch < traj.switches.size() &&
        traj.switches[next_switch].t <= arc.t_end + 1e-15;
    for (double t = arc.t_start + (at_switch ? dt : 0.0);
         t <= arc.t_end + 1e-15; t += dt) {
      const double tc = std::min(t, arc.t_end);
      if (switch_row_follows && tc >= arc.t_end) break;
      while (si + 1 < arc.steps.size() && arc.steps[si].t_end < tc) ++si;
      if (arc.steps.empty()) break;
      row(tc, arc.steps[si].eval(tc), arc.mode, 0);
    }
    if (switch_row_follows) {
      const auto& sw = traj.switches[next_switch];
      row(sw.t, sw.state, sw.from, 1);
      ++next_switch;
    }
    at_switch = switch_row_follows;
  }
}

// Samples the trajectory as CSV with columns t,x,y,mode,event.
inline std::string trajectory_csv(const HybridTrajectory& traj, double dt) {
  std::string out = "t,x,y,mode,event\n";
  char buf[160];
  sample_trajectory(traj, dt, [&](double t, Vec2 s, Mode m, int event) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%c,%d\n", t, s.x, s.y,
                  mode_char(m), event);
    out += buf;
  });
  return out;
}

}  // namespace foldcycle

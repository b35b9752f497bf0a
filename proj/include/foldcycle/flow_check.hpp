#pragma once
// Independent check of the closed-form flow derivatives at a fold: each
// identity is re-measured with finite-difference stencils applied to the
// numerically integrated flow, never to the formulas themselves.

#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"

namespace foldcycle {

struct DerivativeEntry {
  std::string name;
  int order = 1;  // total differentiation order of the stencil
  double formula_value = 0.0;
  double numeric_value = 0.0;
  double abs_error = 0.0;
};

struct DerivativeReport {
  std::vector<DerivativeEntry> entries;

  double max_abs_error(int order) const {
    double m = 0.0;
    for (const auto& e : entries)
      if (e.order == order) m = std::max(m, e.abs_error);
    return m;
  }

  bool all_within(double tol_low_order, double tol_third) const {
    for (const auto& e : entries)
      if (e.abs_error > (e.order <= 2 ? tol_low_order : tol_third))
        return false;
    return true;
  }
};

namespace detail {

// Flow evaluator with exact-argument memoization; stencils revisit points.
class FlowProbe {
 public:
  FlowProbe(const VectorField& field, ToleranceSet tol)
      : field_(&field), tol_(tol) {}

  Vec2 operator()(double t, double x, double y) {
    if (t == 0.0) return {x, y};
    const auto key = std::make_tuple(t, x, y);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Vec2 result = t > 0.0 ? run(*field_, t, {x, y})
                          : run(NegatedFlow{field_}, -t, {x, y});
    cache_.emplace(key, result);
    return result;
  }

 private:
  struct NegatedFlow {
    const VectorField* v;
    Vec2 operator()(Vec2 s) const {
      Vec2 w = (*v)(s);
      return {-w.x, -w.y};
    }
  };

  template <PlanarField F>
  Vec2 run(const F& f, double T, Vec2 s0) const {
    Dopri5<F> solver(f, tol_);
    solver.start(0.0, s0);
    while (solver.t() < T * (1.0 - 1e-15)) solver.step(T);
    return solver.y();
  }

  const VectorField* field_;
  ToleranceSet tol_;
  std::map<std::tuple<double, double, double>, Vec2> cache_;
};

}  // namespace detail

// Verifies the 19 derivative identities of the flow (X, Y)(t; x, y) of one
// mode at a fold placed at the origin. Spatial derivatives at t = 0 probe
// the identity map and come out exact; everything else integrates.
inline DerivativeReport verify_solution_jets(const VectorField& field,
                                             const Jet& jet) {
  if (std::abs(jet.f0) > kTolRoot)
    throw NotFold("x-velocity does not vanish at the reference point");

  ToleranceSet tol;
  tol.rel = 1e-12;
  tol.abs = 1e-14;
  detail::FlowProbe flow(field, tol);

  const double ht = 1e-3;    // time step, 1st and 2nd order stencils
  const double ht3 = 4e-3;   // time step, pure 3rd order t-stencil
  const double ds = 1e-3;    // spatial step, 1st and 2nd order stencils
  const double ds3 = 1e-2;   // outer spatial step, mixed 3rd order stencils

  auto X = [&](double t, double x, double y) { return flow(t, x, y).x; };
  auto Y = [&](double t, double x, double y) { return flow(t, x, y).y; };

  DerivativeReport rep;
  auto add = [&rep](std::string name, int order, double formula_value,
                    double numeric_value) {
    rep.entries.push_back({std::move(name), order, formula_value,
                           numeric_value,
                           std::abs(numeric_value - formula_value)});
  };

  // First order.
  add("X_t", 1, 0.0, (X(ht, 0, 0) - X(-ht, 0, 0)) / (2 * ht));
  add("Y_t", 1, jet.g0, (Y(ht, 0, 0) - Y(-ht, 0, 0)) / (2 * ht));
  add("X_x", 1, 1.0, (X(0, ds, 0) - X(0, -ds, 0)) / (2 * ds));
  add("X_y", 1, 0.0, (X(0, 0, ds) - X(0, 0, -ds)) / (2 * ds));
  add("Y_x", 1, 0.0, (Y(0, ds, 0) - Y(0, -ds, 0)) / (2 * ds));
  add("Y_y", 1, 1.0, (Y(0, 0, ds) - Y(0, 0, -ds)) / (2 * ds));

  // Second order.
  add("X_tt", 2, jet.fy * jet.g0,
      (X(ht, 0, 0) - 2 * X(0, 0, 0) + X(-ht, 0, 0)) / (ht * ht));
  add("Y_tt", 2, jet.gy * jet.g0,
      (Y(ht, 0, 0) - 2 * Y(0, 0, 0) + Y(-ht, 0, 0)) / (ht * ht));
  auto mixed_tx = [&](auto& C) {
    return (C(ht, ds, 0) - C(ht, -ds, 0) - C(-ht, ds, 0) + C(-ht, -ds, 0)) /
           (4 * ht * ds);
  };
  auto mixed_ty = [&](auto& C) {
    return (C(ht, 0, ds) - C(ht, 0, -ds) - C(-ht, 0, ds) + C(-ht, 0, -ds)) /
           (4 * ht * ds);
  };
  add("X_tx", 2, jet.fx, mixed_tx(X));
  add("X_ty", 2, jet.fy, mixed_ty(X));
  add("Y_tx", 2, jet.gx, mixed_tx(Y));
  add("Y_ty", 2, jet.gy, mixed_ty(Y));
  add("X_xx", 2, 0.0, (X(0, ds, 0) - 2 * X(0, 0, 0) + X(0, -ds, 0)) / (ds * ds));
  add("X_yy", 2, 0.0, (X(0, 0, ds) - 2 * X(0, 0, 0) + X(0, 0, -ds)) / (ds * ds));
  add("Y_xx", 2, 0.0, (Y(0, ds, 0) - 2 * Y(0, 0, 0) + Y(0, -ds, 0)) / (ds * ds));
  add("Y_yy", 2, 0.0, (Y(0, 0, ds) - 2 * Y(0, 0, 0) + Y(0, 0, -ds)) / (ds * ds));

  // Third order.
  const double q = jet.fx * jet.fy + jet.fyy * jet.g0 + jet.fy * jet.gy;
  auto dt_at_y = [&](double y) {
    return (X(ht, 0, y) - X(-ht, 0, y)) / (2 * ht);
  };
  add("X_tyy", 3, jet.fyy,
      (dt_at_y(ds3) - 2 * dt_at_y(0) + dt_at_y(-ds3)) / (ds3 * ds3));
  auto dtt_at_y = [&](double y) {
    return (X(ht, 0, y) - 2 * X(0, 0, y) + X(-ht, 0, y)) / (ht * ht);
  };
  add("X_tty", 3, q, (dtt_at_y(ds3) - dtt_at_y(-ds3)) / (2 * ds3));
  add("X_ttt", 3, q * jet.g0,
      (-X(-2 * ht3, 0, 0) + 2 * X(-ht3, 0, 0) - 2 * X(ht3, 0, 0) +
       X(2 * ht3, 0, 0)) /
          (2 * ht3 * ht3 * ht3));
  return rep;
}

inline DerivativeReport verify_solution_jets(const ModelSpec& model,
                                             Mode mode) {
  return verify_solution_jets(model.field(mode),
                              jet_at(model, mode, {0.0, 0.0}));
}

}  // namespace foldcycle

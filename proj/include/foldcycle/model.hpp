#pragma once
// Switched-system models: built-in vector fields, analytic and
// finite-difference jets, and the nullcline solve f(x, u(x)) = 0.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"

namespace foldcycle {

inline constexpr double kTolDegenerate = 1e-9;
inline constexpr double kTolRoot = 1e-12;

// Planar vector field (f, g). Both components are plain callables so that
// configured models (polynomial tables, physical closures) fit one type.
struct VectorField {
  std::function<double(double, double)> f;
  std::function<double(double, double)> g;

  Vec2 operator()(double x, double y) const { return {f(x, y), g(x, y)}; }
  Vec2 operator()(Vec2 s) const { return (*this)(s.x, s.y); }
};

enum class JetSource { analytic, finite_difference };

// Values and partial derivatives of (f, g) at a point: everything the
// fold-coefficient formulas consume.
struct Jet {
  double f0 = 0, g0 = 0;
  double fx = 0, fy = 0, gx = 0, gy = 0;
  double fyy = 0;
  JetSource source = JetSource::analytic;

  // Lemma hypothesis guard: the half-map expansions divide by fy and g0.
  void require_nondegenerate(double tol = kTolDegenerate) const {
    if (std::abs(fy) < tol)
      throw DegenerateJet("|f_y| = " + std::to_string(std::abs(fy)) +
                          " below degeneracy tolerance");
    if (std::abs(g0) < tol)
      throw DegenerateJet("|g| = " + std::to_string(std::abs(g0)) +
                          " below degeneracy tolerance");
  }
};

struct ModelSpec {
  std::string name;
  VectorField left;
  VectorField right;
  std::map<std::string, double> params;
  // Location of the fold in the model's native coordinates. All internal
  // state is relative to it (the fold sits at the origin internally).
  Vec2 fold_point{0.0, 0.0};
  Box box{-1.0, 1.0, -1.0, 1.0};
  // Closed-form jet provider; empty for models that only support finite
  // differences.
  std::function<Jet(Mode, Vec2)> analytic_jet;

  const VectorField& field(Mode m) const { return m == Mode::L ? left : right; }
};

// ---------------------------------------------------------------------------
// Built-in: relay mass-spring, xdot = y, ydot = -x - c y + d per mode.

inline ModelSpec make_mass_spring(double cL = 0.1, double cR = 0.1,
                                  double dL = -1.0, double dR = 1.0) {
  ModelSpec m;
  m.name = "mass_spring";
  m.params = {{"cL", cL}, {"cR", cR}, {"dL", dL}, {"dR", dR}};
  auto fld = [](double c, double d) {
    return VectorField{[](double, double y) { return y; },
                       [c, d](double x, double y) { return -x - c * y + d; }};
  };
  m.left = fld(cL, dL);
  m.right = fld(cR, dR);
  m.box = {-3.0, 3.0, -3.0, 3.0};
  m.analytic_jet = [cL, cR, dL, dR](Mode mode, Vec2 p) {
    const double c = mode == Mode::L ? cL : cR;
    const double d = mode == Mode::L ? dL : dR;
    Jet j;
    j.f0 = p.y;
    j.g0 = -p.x - c * p.y + d;
    j.fx = 0.0;
    j.fy = 1.0;
    j.gx = -1.0;
    j.gy = -c;
    j.fyy = 0.0;
    return j;
  };
  return m;
}

// ---------------------------------------------------------------------------
// Built-in: ABS quarter-car slip dynamics.
//
//   lamdot = -F(lam) + F0 Tb,   Tbdot = +-k,
//   F(lam) = (1/nu) ((1-lam)/m + r^2/J) Fz mu(lam),
//   mu(lam) = th1 (1 - exp(-lam th2)) - lam th3,   F0 = r/(nu J).
//
// Mode L applies brake torque (rate +k), mode R releases it (rate -k); with
// k > 0 the release phase engages on the upper slip line, so the admissible
// parameter side is x * k > 0. Internal coordinates are shifted so the fold
// (lam0, F(lam0)/F0) is the origin.

struct AbsParams {
  double nu = 30.0;
  double r = 0.3;
  double J = 1.0;
  double m_quarter = 400.0;
  double F_z = 3924.0;
  double theta_r1 = 1.28;
  double theta_r2 = 23.99;
  double theta_r3 = 0.52;
  double k = 100.0;
  double lambda0 = 0.14;
};

inline ModelSpec make_abs(const AbsParams& p = {}) {
  const double F0 = p.r / (p.nu * p.J);
  auto mu = [p](double lam) {
    return p.theta_r1 * (1.0 - std::exp(-lam * p.theta_r2)) - lam * p.theta_r3;
  };
  auto mup = [p](double lam) {
    return p.theta_r1 * p.theta_r2 * std::exp(-lam * p.theta_r2) - p.theta_r3;
  };
  auto F = [p, mu](double lam) {
    return (1.0 / p.nu) * ((1.0 - lam) / p.m_quarter + p.r * p.r / p.J) *
           p.F_z * mu(lam);
  };
  auto Fp = [p, mu, mup](double lam) {
    return (1.0 / p.nu) * p.F_z *
           (-(1.0 / p.m_quarter) * mu(lam) +
            ((1.0 - lam) / p.m_quarter + p.r * p.r / p.J) * mup(lam));
  };

  const double lam0 = p.lambda0;
  const double Flam0 = F(lam0);

  ModelSpec m;
  m.name = "abs";
  m.params = {{"nu", p.nu},
              {"r", p.r},
              {"J", p.J},
              {"m_quarter", p.m_quarter},
              {"F_z", p.F_z},
              {"theta_r1", p.theta_r1},
              {"theta_r2", p.theta_r2},
              {"theta_r3", p.theta_r3},
              {"k", p.k},
              {"lambda0", p.lambda0}};

  auto f = [F, Flam0, F0, lam0](double x, double y) {
    return Flam0 - F(lam0 + x) + F0 * y;
  };
  m.left = {f, [k = p.k](double, double) { return +k; }};
  m.right = {f, [k = p.k](double, double) { return -k; }};
  // Fields are written in the shifted coordinates, so the fold is the origin;
  // the physical location (lambda0, F(lambda0)/F0) lives in params.
  m.fold_point = {0.0, 0.0};

  const double xm = std::min(0.8 * lam0, 0.12);
  const double ym = std::max(100.0, 0.4 * std::abs(Flam0 / F0));
  m.box = {-xm, xm, -ym, ym};

  m.analytic_jet = [F, Fp, Flam0, F0, lam0, k = p.k](Mode mode, Vec2 q) {
    Jet j;
    j.f0 = Flam0 - F(lam0 + q.x) + F0 * q.y;
    j.fx = -Fp(lam0 + q.x);
    j.fy = F0;
    j.fyy = 0.0;
    j.g0 = mode == Mode::L ? +k : -k;
    j.gx = 0.0;
    j.gy = 0.0;
    return j;
  };
  return m;
}

// ---------------------------------------------------------------------------
// Built-in: polynomial fields from monomial tables, total degree <= 4.

struct Monomial {
  int px = 0;
  int py = 0;
  double c = 0.0;
};

inline constexpr int kPolyMaxDegree = 4;

namespace detail {

inline double poly_eval(const std::vector<Monomial>& t, double x, double y) {
  double s = 0.0;
  for (const auto& m : t) {
    double v = m.c;
    for (int i = 0; i < m.px; ++i) v *= x;
    for (int i = 0; i < m.py; ++i) v *= y;
    s += v;
  }
  return s;
}

// d^(ax+ay)/dx^ax dy^ay of the table at (x, y).
inline double poly_deriv(const std::vector<Monomial>& t, int ax, int ay,
                         double x, double y) {
  double s = 0.0;
  for (const auto& m : t) {
    if (m.px < ax || m.py < ay) continue;
    double v = m.c;
    for (int i = 0; i < ax; ++i) v *= m.px - i;
    for (int i = 0; i < ay; ++i) v *= m.py - i;
    for (int i = 0; i < m.px - ax; ++i) v *= x;
    for (int i = 0; i < m.py - ay; ++i) v *= y;
    s += v;
  }
  return s;
}

}  // namespace detail

struct PolyTables {
  std::vector<Monomial> fL, gL, fR, gR;
};

inline ModelSpec make_poly(std::string name, PolyTables tables,
                           Box box = {-3.0, 3.0, -3.0, 3.0}) {
  for (const auto* t : {&tables.fL, &tables.gL, &tables.fR, &tables.gR})
    for (const auto& m : *t)
      if (m.px < 0 || m.py < 0 || m.px + m.py > kPolyMaxDegree)
        throw ConfigError("poly monomial degree outside [0, 4]");

  ModelSpec m;
  m.name = std::move(name);
  m.box = box;
  auto fld = [](std::vector<Monomial> f, std::vector<Monomial> g) {
    return VectorField{[f = std::move(f)](double x, double y) {
                         return detail::poly_eval(f, x, y);
                       },
                       [g = std::move(g)](double x, double y) {
                         return detail::poly_eval(g, x, y);
                       }};
  };
  m.left = fld(tables.fL, tables.gL);
  m.right = fld(tables.fR, tables.gR);
  m.analytic_jet = [tables](Mode mode, Vec2 p) {
    const auto& f = mode == Mode::L ? tables.fL : tables.fR;
    const auto& g = mode == Mode::L ? tables.gL : tables.gR;
    Jet j;
    j.f0 = detail::poly_eval(f, p.x, p.y);
    j.g0 = detail::poly_eval(g, p.x, p.y);
    j.fx = detail::poly_deriv(f, 1, 0, p.x, p.y);
    j.fy = detail::poly_deriv(f, 0, 1, p.x, p.y);
    j.gx = detail::poly_deriv(g, 1, 0, p.x, p.y);
    j.gy = detail::poly_deriv(g, 0, 1, p.x, p.y);
    j.fyy = detail::poly_deriv(f, 0, 2, p.x, p.y);
    return j;
  };
  return m;
}

// ---------------------------------------------------------------------------

inline Vec2 eval_field(const ModelSpec& model, Mode mode, Vec2 state) {
  if (!model.box.contains(state))
    throw OutOfBox("state (" + std::to_string(state.x) + ", " +
                   std::to_string(state.y) + ") outside working box");
  return model.field(mode)(state);
}

inline Jet finite_difference_jet(const VectorField& v, Vec2 p) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, inf_norm(p));
  const double h1 = std::cbrt(eps) * scale;
  const double h2 = std::pow(eps, 0.25) * scale;

  Jet j;
  j.source = JetSource::finite_difference;
  j.f0 = v.f(p.x, p.y);
  j.g0 = v.g(p.x, p.y);
  j.fx = (v.f(p.x + h1, p.y) - v.f(p.x - h1, p.y)) / (2.0 * h1);
  j.fy = (v.f(p.x, p.y + h1) - v.f(p.x, p.y - h1)) / (2.0 * h1);
  j.gx = (v.g(p.x + h1, p.y) - v.g(p.x - h1, p.y)) / (2.0 * h1);
  j.gy = (v.g(p.x, p.y + h1) - v.g(p.x, p.y - h1)) / (2.0 * h1);
  j.fyy = (v.f(p.x, p.y + h2) - 2.0 * j.f0 + v.f(p.x, p.y - h2)) / (h2 * h2);
  return j;
}

inline Jet jet_at(const ModelSpec& model, Mode mode, Vec2 point,
                  JetSource source) {
  if (source == JetSource::analytic) {
    if (!model.analytic_jet)
      throw ConfigError("model '" + model.name + "' has no analytic jet");
    Jet j = model.analytic_jet(mode, point);
    j.source = JetSource::analytic;
    return j;
  }
  return finite_difference_jet(model.field(mode), point);
}

// Analytic path when the model provides one, finite differences otherwise.
inline Jet jet_at(const ModelSpec& model, Mode mode, Vec2 point) {
  return model.analytic_jet
             ? jet_at(model, mode, point, JetSource::analytic)
             : jet_at(model, mode, point, JetSource::finite_difference);
}

// Solves f(x, u) = 0 for the nullcline ordinate u(x) by damped Newton from
// the fold ordinate. Requires |f_y| bounded away from zero near the fold.
inline double nullcline_u(const ModelSpec& model, Mode mode, double x) {
  const auto& f = model.field(mode).f;
  const Jet at_fold = jet_at(model, mode, {0.0, 0.0});
  if (std::abs(at_fold.fy) < kTolDegenerate)
    throw DegenerateJet("nullcline solve needs |f_y| >= tol at the fold");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int max_iter = 50;
  double u = 0.0;
  double r = f(x, u);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(r) <= kTolRoot) return u;
    const double h = std::cbrt(eps) * std::max(1.0, std::abs(u));
    const double dr = (f(x, u + h) - f(x, u - h)) / (2.0 * h);
    if (dr == 0.0) break;
    double step = -r / dr;
    // Halve until the residual actually drops (plain safeguard).
    for (int damp = 0; damp < 20; ++damp) {
      const double rn = f(x, u + step);
      if (std::abs(rn) < std::abs(r)) {
        u += step;
        r = rn;
        break;
      }
      step *= 0.5;
      if (damp == 19) {
        u += step;
        r = f(x, u);
      }
    }
  }
  if (std::abs(r) <= kTolRoot) return u;
  throw NoConvergence("nullcline Newton stalled at |f| = " +
                      std::to_string(std::abs(r)));
}

}  // namespace foldcycle

#pragma once
// Closed-form quadratic coefficients of the return map near a fold-fold
// point, and the theorem conditions assembled from them.

#include <cmath>
#include <string>

#include "core.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace foldcycle {

struct FoldCoefficients {
  double alpha_L = 0.0;
  double alpha_R = 0.0;
  double beta_L = 0.0;
  double beta_R = 0.0;
  double alpha = 0.0;  // alpha_L - alpha_R
  double beta = 0.0;   // beta_R - beta_L
  int sign_gR0 = 0;
  int sign_fRy0 = 0;
};

inline FoldCoefficients fold_coefficients(const Jet& jet_L, const Jet& jet_R) {
  if (std::abs(jet_L.f0) > kTolRoot || std::abs(jet_R.f0) > kTolRoot)
    throw NotFoldFold("x-velocity does not vanish at the reference point: "
                      "f_L = " + std::to_string(jet_L.f0) +
                      ", f_R = " + std::to_string(jet_R.f0));
  jet_L.require_nondegenerate();
  jet_R.require_nondegenerate();

  auto alpha_of = [](const Jet& j) {
    return 2.0 * (j.fx + j.gy) / j.g0 + j.fyy / j.fy;
  };
  auto beta_of = [](const Jet& j) { return -2.0 * j.g0 / j.fy; };

  FoldCoefficients c;
  c.alpha_L = alpha_of(jet_L);
  c.alpha_R = alpha_of(jet_R);
  c.beta_L = beta_of(jet_L);
  c.beta_R = beta_of(jet_R);
  c.alpha = c.alpha_L - c.alpha_R;
  c.beta = c.beta_R - c.beta_L;
  c.sign_gR0 = sign_of(jet_R.g0);
  c.sign_fRy0 = sign_of(jet_R.fy);
  return c;
}

inline FoldCoefficients fold_coefficients(const ModelSpec& model,
                                          JetSource source) {
  return fold_coefficients(jet_at(model, Mode::L, {0.0, 0.0}, source),
                           jet_at(model, Mode::R, {0.0, 0.0}, source));
}

inline FoldCoefficients fold_coefficients(const ModelSpec& model) {
  return fold_coefficients(jet_at(model, Mode::L, {0.0, 0.0}),
                           jet_at(model, Mode::R, {0.0, 0.0}));
}

enum class Stability { stable, unstable, inconclusive };

inline const char* stability_name(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    default: return "inconclusive";
  }
}

// Outcome of the hypothesis check. The cycle exists, for small parameters on
// the required side, when all condition flags hold; the stability prediction
// is conclusive only in that case.
struct TheoremVerdict {
  bool fold_fold = false;
  bool c2_fy = false;  // f_y has the same sign in both modes
  bool c2_g = false;   // g has opposite signs
  bool c3 = false;     // alpha != 0
  bool c4 = false;     // alpha * beta * f_y^R < 0
  int required_x_sign = 0;
  Stability predicted_stability = Stability::inconclusive;
  int predicted_y_sign = 0;
  double predicted_cuberoot_ratio = 0.0;  // limit of x / y^3

  bool all_conditions() const { return fold_fold && c2_fy && c2_g && c3 && c4; }
};

inline TheoremVerdict check_theorem(const FoldCoefficients& c,
                                    const Jet& jet_L, const Jet& jet_R) {
  TheoremVerdict v;
  v.fold_fold =
      std::abs(jet_L.f0) <= kTolRoot && std::abs(jet_R.f0) <= kTolRoot;
  v.c2_fy = jet_R.fy * jet_L.fy > 0.0;
  v.c2_g = jet_R.g0 * jet_L.g0 < 0.0;
  v.c3 = std::abs(c.alpha) > kTolDegenerate;
  v.c4 = c.alpha * c.beta * jet_R.fy < 0.0;
  v.required_x_sign = -sign_of(jet_R.fy) * sign_of(jet_R.g0);
  if (v.all_conditions())
    v.predicted_stability = c.alpha * jet_R.g0 > 0.0 ? Stability::stable
                                                     : Stability::unstable;
  v.predicted_y_sign = -sign_of(jet_R.g0);
  v.predicted_cuberoot_ratio = c.beta != 0.0 ? -c.alpha / c.beta : 0.0;
  return v;
}

// Jets, coefficients and verdict of one model, bundled for the callers that
// need all three.
struct FoldAnalysis {
  Jet jet_L;
  Jet jet_R;
  FoldCoefficients coeffs;
  TheoremVerdict verdict;
};

inline FoldAnalysis analyze_fold(const ModelSpec& model) {
  FoldAnalysis a;
  a.jet_L = jet_at(model, Mode::L, {0.0, 0.0});
  a.jet_R = jet_at(model, Mode::R, {0.0, 0.0});
  a.coeffs = fold_coefficients(a.jet_L, a.jet_R);
  a.verdict = check_theorem(a.coeffs, a.jet_L, a.jet_R);
  return a;
}

// Leading-order fixed point y(x) = cbrt(-beta x / alpha) of the composed
// return map, valid on the admissible parameter side only.
inline double predicted_fixed_point(const FoldCoefficients& c, double x) {
  const bool c3 = std::abs(c.alpha) > kTolDegenerate;
  const bool c4 = c.alpha * c.beta * c.sign_fRy0 < 0.0;
  if (!c3 || !c4)
    throw InconclusiveVerdict(
        "conditions for the predicted cycle are not satisfied");
  if (x == 0.0) return 0.0;
  if (sign_of(x) != -c.sign_fRy0 * c.sign_gR0)
    throw DomainViolation("parameter x = " + std::to_string(x) +
                          " lies on the inadmissible side");
  return std::cbrt(-c.beta * x / c.alpha);
}

}  // namespace foldcycle

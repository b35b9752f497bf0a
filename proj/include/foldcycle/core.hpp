#pragma once

#include <algorithm>
#include <cmath>

namespace foldcycle {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return s * v; }
inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }

inline double inf_norm(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

// Switching modes of the relay. The letter is part of the switching rule:
// mode R engages on the line {x_param} x R, mode L on {-x_param} x R.
enum class Mode { L, R };

inline Mode opposite(Mode m) { return m == Mode::L ? Mode::R : Mode::L; }
inline char mode_char(Mode m) { return m == Mode::L ? 'L' : 'R'; }

// Axis-aligned working box. Leaving it counts as blow-up.
struct Box {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;

  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  double y_half_extent() const { return 0.5 * (ymax - ymin); }
  // Distance from the origin to the nearer vertical wall; the fold sits at
  // the origin in internal coordinates, so this bounds usable |x|.
  double x_margin() const { return std::min(xmax, -xmin); }
};

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace foldcycle

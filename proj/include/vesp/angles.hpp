#pragma once

#include <cmath>

#include "vesp/errors.hpp"

namespace vesp {

constexpr double kTwoPi = 2.0 * M_PI;

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  if (!std::isfinite(a)) throw NumericalError("wrap_angle: non-finite input");
  double r = std::remainder(a, kTwoPi);
  if (r <= -M_PI) r += kTwoPi;
  return r;
}

// Shortest signed difference a - b, wrapped into (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

}  // namespace vesp

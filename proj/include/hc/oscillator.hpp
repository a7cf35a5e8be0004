#pragma once

// Action-angle variables of the generalized harmonic oscillator
// H = (a q² + 2b qp + c p²)/2.

#include <array>
#include <cmath>

#include "hc/errors.hpp"
#include "hc/minkowski.hpp"

namespace hc {

struct ActionAngle {
  double action = 0.0;
  double angle = 0.0;  ///< in (−π, π]
};

/// I = H/ω and Θ = atan2(ω q, c p + b q). Under the frozen flow
/// q̇ = bq + cp, ṗ = −aq − bp the angle advances at exactly ω.
inline ActionAngle action_angle(double q, double p, const QuadraticForm& f) {
  const double w2 = f.omega_sq();
  if (!(w2 > 0.0) || !(f.c > 0.0))
    throw UnsupportedRegimeError("action_angle: requires c > 0 and ac - b^2 > 0");
  if (q == 0.0 && p == 0.0) throw UndefinedAngleError("action_angle: angle undefined at the origin");
  const double w = std::sqrt(w2);
  return {f.energy(q, p) / w, std::atan2(w * q, f.c * p + f.b * q)};
}

/// Vector field of the oscillator with coefficients frozen at `f`.
inline std::array<double, 2> oscillator_rate(double q, double p, const QuadraticForm& f) {
  return {f.b * q + f.c * p, -f.a * q - f.b * p};
}

}  // namespace hc

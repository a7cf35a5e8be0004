#pragma once

// Oscillator coefficients (a, b, c) and their Minkowski image (T, X, Y),
// 2-forms on the three-dimensional parameter space, and the SO(2,1)
// transformations acting on it.

#include <cmath>

#include "hc/errors.hpp"
#include "hc/numerics.hpp"

namespace hc {

/// H = (a q² + 2b qp + c p²)/2.
struct QuadraticForm {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double omega_sq() const { return a * c - b * b; }
  Vec3 as_vec() const { return {a, b, c}; }
  static QuadraticForm from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }
  double energy(double q, double p) const { return 0.5 * (a * q * q + 2.0 * b * q * p + c * p * p); }
};

/// (T, X, Y) with ω² = T² − X² − Y² = ac − b².
struct MinkowskiPoint {
  double t_coord = 0.0;
  double x_coord = 0.0;
  double y_coord = 0.0;

  double interval() const { return t_coord * t_coord - x_coord * x_coord - y_coord * y_coord; }
  bool in_future_cone() const { return t_coord > 0.0 && interval() > 0.0; }
  Vec3 as_vec() const { return {t_coord, x_coord, y_coord}; }
  static MinkowskiPoint from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

inline MinkowskiPoint to_minkowski(const QuadraticForm& f) {
  return {0.5 * (f.a + f.c), 0.5 * (f.a - f.c), f.b};
}

inline QuadraticForm from_minkowski(const MinkowskiPoint& m) {
  return {m.t_coord + m.x_coord, m.y_coord, m.t_coord - m.x_coord};
}

/// Jacobian ∂(α,β,γ)/∂(T,X,Y) of the linear change of variables.
inline constexpr Mat3 kFormFromMinkowski = {{{1.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, -1.0, 0.0}}};

/// A 2-form on a 3-dimensional space with coordinates (x¹, x², x³), stored in
/// the cyclic basis (dx²∧dx³, dx³∧dx¹, dx¹∧dx²), so ω(u, v) = w · (u × v).
struct TwoForm {
  Vec3 w{};

  double evaluate(const Vec3& u, const Vec3& v) const { return dot(w, cross(u, v)); }
};

/// Pullback of a 2-form through the linear map y = J x: the result, in
/// x coordinates, is obtained by evaluating on pairs of pushed basis vectors.
inline TwoForm pullback_linear(const TwoForm& form_y, const Mat3& jacobian) {
  auto column = [&](int j) { return Vec3{jacobian[0][j], jacobian[1][j], jacobian[2][j]}; };
  const Vec3 e1 = column(0), e2 = column(1), e3 = column(2);
  return {{form_y.evaluate(e2, e3), form_y.evaluate(e3, e1), form_y.evaluate(e1, e2)}};
}

// ---------------------------------------------------------------------------
// SO(2,1) boosts and scale maps

/// Boost of rapidity η along the unit direction (cos χ, sin χ) of the X–Y plane.
inline Mat3 boost_matrix(double rapidity, double axis_angle) {
  if (!(std::abs(rapidity) < 20.0))
    throw InvalidInputError("lorentz_boost: |rapidity| must be < 20");
  const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
  const double nx = std::cos(axis_angle), ny = std::sin(axis_angle);
  return {{{ch, sh * nx, sh * ny},
           {sh * nx, 1.0 + (ch - 1.0) * nx * nx, (ch - 1.0) * nx * ny},
           {sh * ny, (ch - 1.0) * nx * ny, 1.0 + (ch - 1.0) * ny * ny}}};
}

inline MinkowskiPoint lorentz_boost(const MinkowskiPoint& pt, double rapidity, double axis_angle) {
  return MinkowskiPoint::from_vec(hc::apply(boost_matrix(rapidity, axis_angle), pt.as_vec()));
}

inline MinkowskiPoint scale_map(const MinkowskiPoint& pt, double lambda) {
  return {lambda * pt.t_coord, lambda * pt.x_coord, lambda * pt.y_coord};
}

}  // namespace hc

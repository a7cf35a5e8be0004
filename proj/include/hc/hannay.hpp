#pragma once

// Hannay angle of the generalized harmonic oscillator along closed loops in
// (a, b, c) space: adiabatic integration, surface quadrature of the angle
// 2-form, and the hyperbolic-area (holonomy) formula.

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hc/desitter.hpp"
#include "hc/dynamics.hpp"
#include "hc/errors.hpp"
#include "hc/minkowski.hpp"
#include "hc/numerics.hpp"
#include "hc/ode.hpp"
#include "hc/oscillator.hpp"

namespace hc {

/// W = [α dβ∧dγ + β dγ∧dα + γ dα∧dβ] / [4 (αγ − β²)^{3/2}], stored in the
/// (dβ∧dγ, dγ∧dα, dα∧dβ) basis.
inline TwoForm angle_two_form(const QuadraticForm& f) {
  const double w2 = f.omega_sq();
  if (!(w2 > 0.0)) throw ConeSingularityError("angle_two_form: ac - b^2 must be positive");
  const double den = 4.0 * w2 * std::sqrt(w2);
  return {{f.a / den, f.b / den, f.c / den}};
}

/// The angle 2-form expressed in (T, X, Y), basis (dX∧dY, dY∧dT, dT∧dX).
inline TwoForm angle_two_form_minkowski(const MinkowskiPoint& pt) {
  return pullback_linear(angle_two_form(from_minkowski(pt)), kFormFromMinkowski);
}

// ---------------------------------------------------------------------------
// Loops

struct FourierSeries {
  double mean = 0.0;
  std::vector<double> cos_terms;  ///< coefficient of cos(2πks), k = 1, 2, ...
  std::vector<double> sin_terms;

  double value(double s) const {
    double v = mean;
    for (std::size_t k = 0; k < cos_terms.size(); ++k) v += cos_terms[k] * std::cos(kTwoPi * (k + 1) * s);
    for (std::size_t k = 0; k < sin_terms.size(); ++k) v += sin_terms[k] * std::sin(kTwoPi * (k + 1) * s);
    return v;
  }
  double derivative(double s) const {
    double v = 0.0;
    for (std::size_t k = 0; k < cos_terms.size(); ++k)
      v -= kTwoPi * (k + 1) * cos_terms[k] * std::sin(kTwoPi * (k + 1) * s);
    for (std::size_t k = 0; k < sin_terms.size(); ++k)
      v += kTwoPi * (k + 1) * sin_terms[k] * std::cos(kTwoPi * (k + 1) * s);
    return v;
  }
};

/// Smooth closed curve s ∈ [0, 1] ↦ (T, X, Y), with its s-derivative.
class ParameterLoop {
 public:
  using PointFn = std::function<Vec3(double)>;

  ParameterLoop(PointFn point, PointFn tangent, std::string kind, double omega_min = 0.05)
      : point_(std::move(point)), tangent_(std::move(tangent)), kind_(std::move(kind)),
        omega_min_(omega_min) {
    if (!(omega_min_ > 0.0)) throw InvalidInputError("ParameterLoop: omega_min must be positive");
  }

  /// Constant-ψ₀ circle on the hyperboloid of radius `scale`, traversed with
  /// increasing φ: (T, X, Y) = scale (coshψ₀, sinhψ₀ cos 2πs, sinhψ₀ sin 2πs).
  static ParameterLoop cap(double psi0, double scale = 1.0, double omega_min = 0.05) {
    if (!(psi0 >= 0.0) || !std::isfinite(psi0)) throw InvalidInputError("cap loop: psi0 must be >= 0");
    if (!(scale > 0.0)) throw InvalidInputError("cap loop: scale must be positive");
    const double ch = scale * std::cosh(psi0), sh = scale * std::sinh(psi0);
    return ParameterLoop(
        [=](double s) { return Vec3{ch, sh * std::cos(kTwoPi * s), sh * std::sin(kTwoPi * s)}; },
        [=](double s) {
          return Vec3{0.0, -kTwoPi * sh * std::sin(kTwoPi * s), kTwoPi * sh * std::cos(kTwoPi * s)};
        },
        "cap", omega_min);
  }

  /// Periodic cubic spline through equally spaced keyframes (a, b, c).
  static ParameterLoop keyframes(const std::vector<QuadraticForm>& points, double omega_min = 0.05) {
    if (points.size() < 3) throw InvalidInputError("keyframe loop needs at least 3 points");
    auto splines = std::make_shared<std::array<PeriodicCubicSpline, 3>>();
    for (int c = 0; c < 3; ++c) {
      std::vector<double> ys;
      for (const auto& p : points) ys.push_back(to_minkowski(p).as_vec()[c]);
      (*splines)[c] = PeriodicCubicSpline(std::move(ys), 1.0);
    }
    return ParameterLoop(
        [splines](double s) { return Vec3{(*splines)[0](s), (*splines)[1](s), (*splines)[2](s)}; },
        [splines](double s) {
          return Vec3{(*splines)[0].derivative(s), (*splines)[1].derivative(s), (*splines)[2].derivative(s)};
        },
        "keyframes", omega_min);
  }

  /// Truncated Fourier series for each of a, b, c.
  static ParameterLoop fourier(const std::array<FourierSeries, 3>& abc, double omega_min = 0.05) {
    auto to_txy = [](const Vec3& v) { return to_minkowski(QuadraticForm::from_vec(v)).as_vec(); };
    return ParameterLoop(
        [=](double s) { return to_txy({abc[0].value(s), abc[1].value(s), abc[2].value(s)}); },
        [=](double s) {
          return to_txy({abc[0].derivative(s), abc[1].derivative(s), abc[2].derivative(s)});
        },
        "fourier", omega_min);
  }

  Vec3 point_vec(double s) const { return point_(s); }
  MinkowskiPoint point(double s) const { return MinkowskiPoint::from_vec(point_(s)); }
  Vec3 tangent(double s) const { return tangent_(s); }
  QuadraticForm form(double s) const { return from_minkowski(point(s)); }
  double omega(double s) const { return std::sqrt(point(s).interval()); }
  double omega_min() const { return omega_min_; }
  int orientation() const { return orientation_; }
  const std::string& kind() const { return kind_; }

  ParameterLoop reversed() const {
    ParameterLoop out(
        [p = point_](double s) { return p(1.0 - s); },
        [t = tangent_](double s) { return -1.0 * t(1.0 - s); }, kind_, omega_min_);
    out.orientation_ = -orientation_;
    return out;
  }

  /// Applies a linear map (e.g. an SO(2,1) boost) to every loop point.
  ParameterLoop transformed(const Mat3& m) const {
    ParameterLoop out([p = point_, m](double s) { return hc::apply(m, p(s)); },
                      [t = tangent_, m](double s) { return hc::apply(m, t(s)); }, kind_, omega_min_);
    out.orientation_ = orientation_;
    return out;
  }

  /// Pointwise rescaling by a smooth positive periodic λ(s).
  ParameterLoop rescaled(std::function<double(double)> lambda,
                         std::function<double(double)> dlambda) const {
    ParameterLoop out(
        [p = point_, lambda](double s) { return lambda(s) * p(s); },
        [p = point_, t = tangent_, lambda, dlambda](double s) {
          return dlambda(s) * p(s) + lambda(s) * t(s);
        },
        kind_, omega_min_);
    out.orientation_ = orientation_;
    return out;
  }

  ParameterLoop with_omega_min(double omega_min) const {
    ParameterLoop out = *this;
    if (!(omega_min > 0.0)) throw InvalidInputError("ParameterLoop: omega_min must be positive");
    out.omega_min_ = omega_min;
    return out;
  }

  /// Checks T > 0, c > 0 and ω ≥ omega_min on a dense sample of the loop and
  /// closure to 1e−9; throws ConeSingularityError otherwise.
  void validate(std::size_t samples = 4096) const {
    for (std::size_t i = 0; i <= samples; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(samples);
      const auto pt = point(s);
      const double w2 = pt.interval();
      const auto f = from_minkowski(pt);
      if (!std::isfinite(w2) || !(pt.t_coord > 0.0) || !(w2 >= omega_min_ * omega_min_) || !(f.c > 0.0))
        throw ConeSingularityError("loop leaves the validity region (omega >= " + std::to_string(omega_min_) +
                                   ", c > 0) near s = " + std::to_string(s));
    }
    const Vec3 gap = point_(1.0) - point_(0.0);
    const Vec3 p0 = point_(0.0);
    if (std::sqrt(dot(gap, gap)) > 1e-9 * std::max(1.0, std::sqrt(dot(p0, p0))))
      throw InvalidInputError("loop is not closed");
  }

  /// min and max of ω over a dense sample.
  std::pair<double, double> omega_range(std::size_t samples = 4096) const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double w = omega(static_cast<double>(i) / static_cast<double>(samples));
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    return {lo, hi};
  }

 private:
  PointFn point_;
  PointFn tangent_;
  std::string kind_;
  double omega_min_ = 0.05;
  int orientation_ = 1;
};

// ---------------------------------------------------------------------------
// Adiabatic evolution

/// Loop parameter as a function of the fraction u = t/T of the loop time:
/// s(u) = u − sin(2πu)/(2π), which starts and ends at rest.
inline double adiabatic_parameter(double u) { return u - std::sin(kTwoPi * u) / kTwoPi; }

inline Schedule<QuadraticForm> loop_schedule(const ParameterLoop& loop, double loop_time) {
  return Schedule<QuadraticForm>::closed_form(
      [loop, loop_time](double t) { return loop.form(adiabatic_parameter(t / loop_time)); });
}

/// ∫₀^T ω dt along the adiabatic schedule (adaptive Simpson, 1e−10 relative).
inline double dynamical_phase(const ParameterLoop& loop, double loop_time) {
  loop.validate();
  if (!(loop_time > 0.0)) throw InvalidInputError("dynamical_phase: loop time must be positive");
  const auto f = [&](double u) { return loop.omega(adiabatic_parameter(u)); };
  return loop_time * adaptive_simpson(f, 0.0, 1.0, 1e-10);
}

struct HannayOptions {
  Tolerances tol{1e-12, 1e-14};
  std::size_t samples_per_period = 64;
  bool geometric = true;  ///< also fill hannay_form and hannay_area
};

struct HannayResult {
  double theta_total = 0.0;
  double dynamical_phase = 0.0;
  double hannay_ode = 0.0;
  double hannay_form = 0.0;
  double hannay_area = 0.0;
  double action_drift = 0.0;      ///< |I(T) − I(0)| / I(0)
  double action_drift_max = 0.0;  ///< max_t |I(t) − I(0)| / I(0)
  double loop_time = 0.0;
  std::map<std::string, double> discrepancies;
  Trajectory<2> trajectory;
};

inline double hannay_from_form(const ParameterLoop& loop);
inline double hannay_from_area(const ParameterLoop& loop);

/// Drives the linearized oscillator once around the loop in time T and
/// extracts the Hannay angle Θ(T) − Θ(0) − ∫ω dt.
inline HannayResult adiabatic_run(const ParameterLoop& loop, double loop_time, double q0, double p0,
                                  const HannayOptions& opt = {}) {
  loop.validate();
  if (!(loop_time > 0.0)) throw InvalidInputError("adiabatic_run: loop time must be positive");
  if (q0 == 0.0 && p0 == 0.0) throw UndefinedAngleError("adiabatic_run: initial state at the origin");
  const double w_max = loop.omega_range().second;
  const double periods = loop_time * w_max / kTwoPi;
  const auto samples = static_cast<std::size_t>(std::ceil(periods * static_cast<double>(opt.samples_per_period))) + 2;

  HannayResult r;
  r.loop_time = loop_time;
  r.trajectory = simulate_oscillator(loop_schedule(loop, loop_time), q0, p0, 0.0, loop_time, samples, opt.tol);
  const auto& ang = r.trajectory.diagnostics.at("angle");
  const auto& act = r.trajectory.diagnostics.at("action");
  r.theta_total = ang.back() - ang.front();
  r.dynamical_phase = dynamical_phase(loop, loop_time);
  r.hannay_ode = r.theta_total - r.dynamical_phase;
  const double i0 = act.front();
  r.action_drift = std::abs(act.back() - i0) / i0;
  for (double v : act) r.action_drift_max = std::max(r.action_drift_max, std::abs(v - i0) / i0);
  if (opt.geometric) {
    r.hannay_form = hannay_from_form(loop);
    r.hannay_area = hannay_from_area(loop);
    r.discrepancies["ode_vs_area"] = std::abs(r.hannay_ode - r.hannay_area);
    r.discrepancies["ode_vs_form"] = std::abs(r.hannay_ode - r.hannay_form);
    r.discrepancies["form_vs_area"] = std::abs(r.hannay_form - r.hannay_area);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Surface quadrature of W

/// A parametrized surface (u, s) ∈ [0, 1]² in (T, X, Y) whose boundary edge
/// u = 1, traversed with increasing s, is the loop.
struct Surface {
  std::function<Vec3(double, double)> point;
  std::function<Vec3(double, double)> d_u;
  std::function<Vec3(double, double)> d_s;
};

/// ∫∫ W(σ_u, σ_s) du ds by nested adaptive Gauss–Kronrod.
inline double hannay_from_form(const Surface& surf, double rel_tol = 1e-10) {
  auto integrand = [&](double u, double s) {
    const auto pt = MinkowskiPoint::from_vec(surf.point(u, s));
    if (!pt.in_future_cone())
      throw SurfaceConstructionError("spanning surface leaves the future light cone");
    return angle_two_form_minkowski(pt).evaluate(surf.d_u(u, s), surf.d_s(u, s));
  };
  auto outer = [&](double s) {
    return adaptive_kronrod([&](double u) { return integrand(u, s); }, 0.0, 1.0, rel_tol, 1e-15);
  };
  return adaptive_kronrod(outer, 0.0, 1.0, rel_tol, 1e-14);
}

/// Base point of the fan: the loop centroid projected to the hyperboloid and
/// scaled to the mean ω of the loop.
inline Vec3 fan_base_point(const ParameterLoop& loop, std::size_t samples = 1024) {
  Vec3 centroid{};
  double w_mean = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(samples);
    centroid = centroid + (1.0 / samples) * loop.point_vec(s);
    w_mean += loop.omega(s) / static_cast<double>(samples);
  }
  const auto c = MinkowskiPoint::from_vec(centroid);
  if (!c.in_future_cone()) throw SurfaceConstructionError("loop centroid is outside the future cone");
  return (w_mean / std::sqrt(c.interval())) * centroid;
}

inline Surface fan_surface(const ParameterLoop& loop) {
  const Vec3 base = fan_base_point(loop);
  Surface surf;
  surf.point = [loop, base](double u, double s) { return (1.0 - u) * base + u * loop.point_vec(s); };
  surf.d_u = [loop, base](double, double s) { return loop.point_vec(s) - base; };
  surf.d_s = [loop](double u, double s) { return u * loop.tangent(s); };
  return surf;
}

/// Hannay angle as the flux of W through the fan spanned by the loop.
inline double hannay_from_form(const ParameterLoop& loop) {
  loop.validate();
  const Surface surf = fan_surface(loop);
  // The future cone is convex, so the fan stays inside it; check anyway on a
  // coarse grid so that a bad loop fails before quadrature.
  for (int i = 1; i <= 16; ++i)
    for (int j = 0; j < 64; ++j) {
      const auto pt = MinkowskiPoint::from_vec(surf.point(i / 16.0, j / 64.0));
      if (!pt.in_future_cone()) throw SurfaceConstructionError("fan surface crosses the light cone");
    }
  return hannay_from_form(surf);
}

// ---------------------------------------------------------------------------
// Hyperbolic area

struct AreaBreakdown {
  double value = 0.0;          ///< ½[∮ coshψ dφ − 2π w]
  double winding_integral = 0.0;  ///< ∮ dφ from wrapped increments
  int winding = 0;
};

/// ½∫(coshψ − 1) φ' ds. The winding part ½(∮dφ − 2πw) vanishes for a closed
/// loop, so w comes from wrapped increments of φ instead of a quadrature of dφ.
/// (coshψ − 1) φ' = (XY' − YX') / (ω (T + ω)) is regular at the pole.
inline AreaBreakdown hannay_area_breakdown(const ParameterLoop& loop) {
  loop.validate();
  constexpr std::size_t kProbe = 4096;
  double max_tangent = 0.0;
  for (std::size_t i = 0; i <= kProbe; ++i) {
    const Vec3 d = loop.tangent(static_cast<double>(i) / kProbe);
    max_tangent = std::max(max_tangent, std::sqrt(dot(d, d)));
  }
  AreaBreakdown out;
  if (max_tangent == 0.0) return out;  // point loop

  auto area_density = [&](double s) {
    const Vec3 p = loop.point_vec(s), d = loop.tangent(s);
    const double w = std::sqrt(p[0] * p[0] - p[1] * p[1] - p[2] * p[2]);
    return (p[1] * d[2] - p[2] * d[1]) / (w * (p[0] + w));
  };
  auto phi = [&](double s) {
    const Vec3 p = loop.point_vec(s);
    if (!(p[1] * p[1] + p[2] * p[2] > 0.0))
      throw UndefinedAngleError("loop passes through the pole psi = 0; phi is undefined");
    return std::atan2(p[2], p[1]);
  };
  std::function<double(double, double, double, double, int)> sweep = [&](double s0, double s1, double f0,
                                                                          double f1, int depth) {
    const double d = std::remainder(f1 - f0, kTwoPi);
    if (std::abs(d) <= kPi / 4 || depth == 0) return d;
    const double sm = 0.5 * (s0 + s1), fm = phi(sm);
    return sweep(s0, sm, f0, fm, depth - 1) + sweep(sm, s1, fm, f1, depth - 1);
  };
  double prev = phi(0.0);
  for (std::size_t i = 1; i <= kProbe; ++i) {
    const double s = static_cast<double>(i) / kProbe;
    const double cur = phi(s);
    out.winding_integral += sweep(static_cast<double>(i - 1) / kProbe, s, prev, cur, 40);
    prev = cur;
  }
  out.winding = static_cast<int>(std::lround(out.winding_integral / kTwoPi));
  out.value = 0.5 * adaptive_kronrod(area_density, 0.0, 1.0, 1e-13, 1e-15);
  return out;
}

inline double hannay_from_area(const ParameterLoop& loop) { return hannay_area_breakdown(loop).value; }

// ---------------------------------------------------------------------------
// Convergence in the loop time

struct ConvergenceRow {
  double loop_time = 0.0;
  double hannay_ode = 0.0;
  double error = 0.0;  ///< |hannay_ode − hannay_area|
  double action_drift = 0.0;
  double action_drift_max = 0.0;
};

struct ConvergenceStudy {
  double reference = 0.0;  ///< hannay_area
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  ///< least-squares slope of log error against log(1/T)
  bool error_monotone = false;
  bool drift_monotone = false;
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline ConvergenceStudy convergence_study(const ParameterLoop& loop, const std::vector<double>& loop_times,
                                          double q0, double p0, const HannayOptions& opt = {}) {
  for (std::size_t i = 1; i < loop_times.size(); ++i)
    if (!(loop_times[i] > loop_times[i - 1]))
      throw InvalidInputError("convergence_study: loop times must be increasing");
  ConvergenceStudy st;
  st.reference = hannay_from_area(loop);
  st.rows.resize(loop_times.size());
  HannayOptions run_opt = opt;
  run_opt.geometric = false;
  parallel_for(loop_times.size(), [&](std::size_t i) {
    const auto r = adiabatic_run(loop, loop_times[i], q0, p0, run_opt);
    st.rows[i] = {loop_times[i], r.hannay_ode, std::abs(r.hannay_ode - st.reference), r.action_drift,
                  r.action_drift_max};
  });
  std::vector<double> inv_t, err;
  st.error_monotone = st.drift_monotone = true;
  for (std::size_t i = 0; i < st.rows.size(); ++i) {
    inv_t.push_back(1.0 / st.rows[i].loop_time);
    err.push_back(std::max(st.rows[i].error, 1e-300));
    if (i > 0) {
      st.error_monotone = st.error_monotone && st.rows[i].error < st.rows[i - 1].error;
      st.drift_monotone = st.drift_monotone && st.rows[i].action_drift < st.rows[i - 1].action_drift;
    }
  }
  st.slope = loglog_slope(inv_t, err);
  return st;
}

}  // namespace hc

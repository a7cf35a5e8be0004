#pragma once

// Dormand–Prince 5(4) integrator with PI step control and the fourth-order
// continuous extension for dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hc/errors.hpp"

namespace hc {

template <std::size_t N>
using StateVec = std::array<double, N>;

struct Tolerances {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  ///< 0 selects the step automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 100'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVec<N>> states;
  /// Named per-sample diagnostics (energy, norm, action, angle, ...).
  std::map<std::string, std::vector<double>> diagnostics;
  IntegrationStats stats;

  std::size_t size() const { return times.size(); }
};

namespace detail {

struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

/// Thrown by a flow when asked to evaluate outside its domain; the stepper
/// treats it as a rejected trial step.
template <class Flow, std::size_t N>
bool try_eval(const Flow& f, double t, const StateVec<N>& y, StateVec<N>& out) {
  try {
    out = f(t, y);
  } catch (const DomainError&) {
    return false;
  }
  for (double v : out)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1, writing the states at the requested
/// output times (sorted, within [t0, t1]) into `out`. `out` holds the partial
/// result if an exception escapes.
///
/// Throws PoleError when the flow keeps reporting a domain violation
/// (e.g. |p| → 1), IntegrationFailure on step-size underflow.
template <std::size_t N, class Flow>
void integrate_into(const Flow& flow, StateVec<N> y, double t0, double t1,
                    std::span<const double> output_times, const Tolerances& tol,
                    Trajectory<N>& out) {
  using DP = detail::DormandPrince;
  if (!(tol.rel_tol > 0) || !(tol.abs_tol >= 0))
    throw InvalidInputError("integrate: tolerances must be positive");
  if (!(t1 >= t0)) throw InvalidInputError("integrate: t1 must be >= t0");
  for (std::size_t i = 1; i < output_times.size(); ++i)
    if (!(output_times[i] > output_times[i - 1]))
      throw InvalidInputError("integrate: output times must be strictly increasing");
  if (!output_times.empty() && (output_times.front() < t0 || output_times.back() > t1))
    throw InvalidInputError("integrate: output times must lie in [t0, t1]");

  out.times.reserve(out.times.size() + output_times.size());
  out.states.reserve(out.states.size() + output_times.size());
  auto& stats = out.stats;
  std::size_t next_out = 0;
  while (next_out < output_times.size() && output_times[next_out] <= t0) {
    out.times.push_back(output_times[next_out++]);
    out.states.push_back(y);
  }
  if (t1 == t0) return;

  auto to_vector = [](const StateVec<N>& s) { return std::vector<double>(s.begin(), s.end()); };
  auto weight = [&](double a, double b) { return tol.abs_tol + tol.rel_tol * std::max(std::abs(a), std::abs(b)); };

  StateVec<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  ++stats.evaluations;
  if (!detail::try_eval(flow, t0, y, k1))
    throw PoleError("integrate: initial state outside the flow domain", t0, to_vector(y));

  double t = t0;
  const double span = t1 - t0;
  double h = tol.initial_step;
  if (!(h > 0)) {
    // Hairer's starting-step heuristic.
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = weight(y[i], y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, span);
  }
  h = std::min(h, tol.max_step);

  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0, kBeta = 0.04;
  constexpr double kAlpha = 0.2 - 0.75 * kBeta;
  double err_old = 1e-4;
  bool last_rejected = false;

  while (t < t1) {
    if (stats.accepted + stats.rejected >= tol.max_steps)
      throw IntegrationFailure("integrate: maximum number of steps exceeded", t, to_vector(y));
    const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_step) {
      if (last_rejected)
        throw PoleError("integrate: step size underflow at a domain boundary", t, to_vector(y));
      throw IntegrationFailure("integrate: step size underflow", t, to_vector(y));
    }
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    bool ok = true;
    auto stage = [&](StateVec<N>& k, double c, auto&& combine) {
      if (!ok) return;
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * combine(i);
      ++stats.evaluations;
      ok = detail::try_eval(flow, t + c * h, ytmp, k);
    };
    stage(k2, DP::c2, [&](std::size_t i) { return DP::a21 * k1[i]; });
    stage(k3, DP::c3, [&](std::size_t i) { return DP::a31 * k1[i] + DP::a32 * k2[i]; });
    stage(k4, DP::c4, [&](std::size_t i) { return DP::a41 * k1[i] + DP::a42 * k2[i] + DP::a43 * k3[i]; });
    stage(k5, DP::c5, [&](std::size_t i) {
      return DP::a51 * k1[i] + DP::a52 * k2[i] + DP::a53 * k3[i] + DP::a54 * k4[i];
    });
    stage(k6, 1.0, [&](std::size_t i) {
      return DP::a61 * k1[i] + DP::a62 * k2[i] + DP::a63 * k3[i] + DP::a64 * k4[i] + DP::a65 * k5[i];
    });
    if (ok) {
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y[i] + h * (DP::a71 * k1[i] + DP::a73 * k3[i] + DP::a74 * k4[i] +
                              DP::a75 * k5[i] + DP::a76 * k6[i]);
      ++stats.evaluations;
      ok = detail::try_eval(flow, t + h, ynew, k7);
    }
    if (!ok) {
      ++stats.rejected;
      last_rejected = true;
      h *= 0.25;
      continue;
    }

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (DP::e1 * k1[i] + DP::e3 * k3[i] + DP::e4 * k4[i] + DP::e5 * k5[i] +
                            DP::e6 * k6[i] + DP::e7 * k7[i]);
      err = std::max(err, std::abs(e) / weight(y[i], ynew[i]));
    }

    if (err <= 1.0) {
      ++stats.accepted;
      const double t_new = final_step ? t1 : t + h;
      // Dense output over (t, t_new].
      if (next_out < output_times.size() && output_times[next_out] <= t_new) {
        StateVec<N> r2, r3, r4, r5;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = ynew[i] - y[i];
          const double bspl = h * k1[i] - dy;
          r2[i] = dy;
          r3[i] = bspl;
          r4[i] = dy - h * k7[i] - bspl;
          r5[i] = h * (DP::d1 * k1[i] + DP::d3 * k3[i] + DP::d4 * k4[i] + DP::d5 * k5[i] +
                       DP::d6 * k6[i] + DP::d7 * k7[i]);
        }
        while (next_out < output_times.size() && output_times[next_out] <= t_new) {
          const double to = output_times[next_out++];
          StateVec<N> yo;
          if (to == t_new) {
            yo = ynew;
          } else {
            const double s = (to - t) / h, s1 = 1.0 - s;
            for (std::size_t i = 0; i < N; ++i)
              yo[i] = y[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
          }
          out.times.push_back(to);
          out.states.push_back(yo);
        }
      }
      y = ynew;
      k1 = k7;
      t = t_new;
      const double fac = std::clamp(std::pow(std::max(err, 1e-16), -kAlpha) * std::pow(err_old, kBeta) * kSafety,
                                    kFacMin, last_rejected ? 1.0 : kFacMax);
      err_old = std::max(err, 1e-4);
      h = std::min(h * fac, tol.max_step);
      last_rejected = false;
      if (final_step) break;
    } else {
      ++stats.rejected;
      last_rejected = true;
      const double fac = std::isfinite(err) ? std::max(kFacMin, kSafety * std::pow(err, -0.2)) : kFacMin;
      h *= fac;
    }
  }
}

template <std::size_t N, class Flow>
Trajectory<N> integrate(const Flow& flow, const StateVec<N>& y0, double t0, double t1,
                        std::span<const double> output_times, const Tolerances& tol = {}) {
  Trajectory<N> out;
  integrate_into(flow, y0, t0, t1, output_times, tol, out);
  return out;
}

/// Uniform output grid of n ≥ 2 samples spanning [t0, t1].
inline std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
  if (n < 2) return {t0};
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i)
    ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  ts.back() = t1;
  return ts;
}

}  // namespace hc

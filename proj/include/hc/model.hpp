#pragma once

// Nonlinear two-mode model: the p–θ Hamiltonian, its equations of motion,
// the overlap-integral parameter map and the classical-spin picture.
// Units: ħ = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hc/errors.hpp"

namespace hc {

/// Physical parameters (Δ, ε, α, β, γ). The pair-tunneling energy I is not
/// stored; it is α/2.
struct ModelParams {
  double delta = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double pair_tunneling() const { return 0.5 * alpha; }

  bool operator==(const ModelParams&) const = default;

  std::array<double, 5> to_array() const { return {delta, epsilon, alpha, beta, gamma}; }
  static ModelParams from_array(const std::array<double, 5>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
};

/// Population imbalance p and relative phase θ (stored unwrapped).
struct PhaseState {
  double p = 0.0;
  double theta = 0.0;
};

struct SpinState {
  double sx = 0.0;
  double sy = 0.0;
  double sz = 1.0;

  double norm() const { return std::sqrt(sx * sx + sy * sy + sz * sz); }
};

/// Checked constructor: the spin must be a unit vector to 1e−12.
inline SpinState make_spin(double sx, double sy, double sz) {
  const double n2 = sx * sx + sy * sy + sz * sz;
  if (!(std::abs(n2 - 1.0) <= 1e-12))
    throw InvalidInputError("spin state must have unit norm");
  return {sx, sy, sz};
}

struct TwoModeOverlaps {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double k = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double u12 = 0.0;
  double u21 = 0.0;
  double i_pair = 0.0;
};

struct JosephsonFields {
  double e_j = 0.0;
  double e_c = 0.0;
};

struct PhaseRate {
  double p_dot = 0.0;
  double theta_dot = 0.0;
};

struct SpinRate {
  double dsx = 0.0;
  double dsy = 0.0;
  double dsz = 0.0;
};

namespace detail {

inline void require_closed_unit(double p, const char* op) {
  if (!(std::abs(p) <= 1.0))
    throw DomainError(std::string(op) + ": population imbalance must satisfy |p| <= 1");
}

}  // namespace detail

inline double hamiltonian_full(const PhaseState& s, const ModelParams& m) {
  detail::require_closed_unit(s.p, "hamiltonian_full");
  const double root = std::sqrt(1.0 - s.p * s.p);
  const double c = std::cos(s.theta);
  return m.epsilon * s.p + 0.5 * m.gamma * s.p * s.p +
         (m.delta + m.beta * s.p) * root * c +
         0.5 * m.alpha * (1.0 - s.p * s.p) * c * c;
}

/// Coupled-mode equations (ṗ, θ̇) = (−∂H/∂θ, ∂H/∂p). The poles |p| = 1 are a
/// coordinate singularity of the chart and are rejected.
inline PhaseRate eom_full(const PhaseState& s, const ModelParams& m) {
  if (!(std::abs(s.p) < 1.0))
    throw DomainError("eom_full: |p| >= 1 is a coordinate singularity; use the spin flow");
  const double p = s.p;
  const double root = std::sqrt(1.0 - p * p);
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  const double pair = m.pair_tunneling();
  PhaseRate r;
  r.p_dot = (m.delta + m.beta * p) * root * sn +
            pair * (1.0 - p * p) * std::sin(2.0 * s.theta);
  r.theta_dot = m.epsilon + m.gamma * p +
                (m.beta * (1.0 - 2.0 * p * p) - m.delta * p) / root * c -
                m.alpha * p * c * c;
  return r;
}

inline JosephsonFields josephson_fields(const PhaseState& s, const ModelParams& m) {
  detail::require_closed_unit(s.p, "josephson_fields");
  const double rc = std::sqrt(1.0 - s.p * s.p) * std::cos(s.theta);
  return {m.delta + m.beta * s.p + m.alpha * rc, m.epsilon + m.gamma * s.p + m.beta * rc};
}

/// Josephson form ṗ = E_J √(1−p²) sinθ, θ̇ = E_C − E_J p cosθ/√(1−p²).
inline PhaseRate eom_josephson(const PhaseState& s, const ModelParams& m) {
  if (!(std::abs(s.p) < 1.0))
    throw DomainError("eom_josephson: |p| >= 1 is a coordinate singularity");
  const auto f = josephson_fields(s, m);
  const double root = std::sqrt(1.0 - s.p * s.p);
  return {f.e_j * root * std::sin(s.theta),
          f.e_c - f.e_j * s.p * std::cos(s.theta) / root};
}

inline ModelParams params_from_overlaps(const TwoModeOverlaps& o) {
  ModelParams m;
  m.delta = 2.0 * o.k + o.u12 + o.u21;
  m.epsilon = o.eps1 - o.eps2 + 0.5 * (o.u1 - o.u2);
  m.alpha = 2.0 * o.i_pair;
  m.beta = o.u12 - o.u21;
  m.gamma = 0.5 * (o.u1 + o.u2) - o.i_pair;
  return m;
}

inline SpinState phase_to_spin(const PhaseState& s) {
  detail::require_closed_unit(s.p, "phase_to_spin");
  const double root = std::sqrt(1.0 - s.p * s.p);
  return {root * std::cos(s.theta), root * std::sin(s.theta), s.p};
}

/// Inverse chart; θ is returned in (−π, π] and is 0 at the poles.
inline PhaseState spin_to_phase(const SpinState& s) {
  const double p = std::clamp(s.sz, -1.0, 1.0);
  const double rho = std::hypot(s.sx, s.sy);
  return {p, rho > 0.0 ? std::atan2(s.sy, s.sx) : 0.0};
}

inline double spin_hamiltonian(const SpinState& s, const ModelParams& m) {
  return m.delta * s.sx + m.epsilon * s.sz + 0.5 * m.alpha * s.sx * s.sx +
         m.beta * s.sx * s.sz + 0.5 * m.gamma * s.sz * s.sz;
}

/// Precession in the effective fields Δ' = Δ + αS_x + βS_z (x) and
/// ε' = ε + βS_x + γS_z (z). The flow is tangent to the sphere.
inline SpinRate spin_eom(const SpinState& s, const ModelParams& m) {
  const double dp = m.delta + m.alpha * s.sx + m.beta * s.sz;
  const double ep = m.epsilon + m.beta * s.sx + m.gamma * s.sz;
  return {-ep * s.sy, ep * s.sx - dp * s.sz, dp * s.sy};
}

/// J = N (K' sinθ + (I/2) sin2θ).
inline double atomic_current(double theta, double kprime, double i_pair, double n_atoms) {
  if (!(n_atoms >= 0.0)) throw InvalidInputError("atomic_current: n_atoms must be >= 0");
  return n_atoms * (kprime * std::sin(theta) + 0.5 * i_pair * std::sin(2.0 * theta));
}

}  // namespace hc

#pragma once

// Fixed points of the two-mode flow, their linear stability, and scans of the
// critical surface αγ = β² where the Bogoliubov frequency vanishes.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hc/errors.hpp"
#include "hc/minkowski.hpp"
#include "hc/model.hpp"
#include "hc/numerics.hpp"

namespace hc {

enum class FixedPointKind { phase_locked, real_phase };
enum class Stability { center, saddle, degenerate };

inline const char* to_string(FixedPointKind k) {
  return k == FixedPointKind::phase_locked ? "phase_locked" : "real_phase";
}

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::center: return "center";
    case Stability::saddle: return "saddle";
    default: return "degenerate";
  }
}

struct FixedPoint {
  double p_bar = 0.0;
  double theta_bar = 0.0;
  FixedPointKind kind = FixedPointKind::phase_locked;
  Stability stability = Stability::degenerate;
  /// ω for a center, the growth rate for a saddle, 0 when degenerate.
  double omega_or_lyapunov = 0.0;
  double residual = 0.0;

  bool at_pole() const { return std::abs(p_bar) >= 1.0; }
  PhaseState state() const { return {p_bar, theta_bar}; }
};

struct BogoliubovMode {
  Stability stability = Stability::degenerate;
  double rate = 0.0;
  /// Determinant of the Hessian, i.e. ω² of the linearized oscillator.
  double det = 0.0;
};

inline constexpr double kFixedPointResidualTol = 1e-10;
inline constexpr double kSofteningTol = 1e-12;

/// Analytic Hessian of hamiltonian_full in the canonical pair (q, p) = (θ, p),
/// returned as the quadratic form (H_θθ, H_θp, H_pp) of the linearized
/// oscillator. Requires |p| < 1.
inline QuadraticForm hessian(const PhaseState& s, const ModelParams& m) {
  if (!(std::abs(s.p) < 1.0)) throw DomainError("hessian: |p| must be < 1");
  const double p = s.p;
  const double root = std::sqrt(1.0 - p * p);
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  const double tunnel = m.delta + m.beta * p;
  const double h_pp = m.gamma - 2.0 * m.beta * p * c / root -
                      tunnel * c / (root * root * root) - m.alpha * c * c;
  const double h_tt = -tunnel * root * c - m.alpha * root * root * std::cos(2.0 * s.theta);
  const double h_tp = -m.beta * root * sn + tunnel * p / root * sn + 2.0 * m.alpha * p * c * sn;
  return {h_tt, h_tp, h_pp};
}

/// ‖eom‖ at a candidate fixed point; the spin flow is used at the poles.
inline double fixed_point_residual(const PhaseState& s, const ModelParams& m) {
  if (std::abs(s.p) < 1.0) {
    const auto r = eom_full(s, m);
    return std::hypot(r.p_dot, r.theta_dot);
  }
  const auto r = spin_eom(phase_to_spin(s), m);
  return std::sqrt(r.dsx * r.dsx + r.dsy * r.dsy + r.dsz * r.dsz);
}

inline BogoliubovMode classify_hessian(const QuadraticForm& h) {
  const double det = h.omega_sq();
  if (std::abs(det) < kSofteningTol) return {Stability::degenerate, 0.0, det};
  if (det > 0) return {Stability::center, std::sqrt(det), det};
  return {Stability::saddle, std::sqrt(-det), det};
}

inline BogoliubovMode bogoliubov_frequency(const ModelParams& m, const FixedPoint& fp) {
  const double res = fixed_point_residual(fp.state(), m);
  if (!(res < kFixedPointResidualTol))
    throw InvalidInputError("bogoliubov_frequency: not a fixed point (residual " +
                            std::to_string(res) + ")");
  if (fp.at_pole()) return {Stability::degenerate, 0.0, 0.0};
  return classify_hessian(hessian(fp.state(), m));
}

namespace detail {

inline FixedPoint finish_fixed_point(const ModelParams& m, double p, double theta,
                                     FixedPointKind kind) {
  FixedPoint fp{p, theta, kind, Stability::degenerate, 0.0, 0.0};
  fp.residual = fixed_point_residual(fp.state(), m);
  if (!fp.at_pole() && fp.residual < kFixedPointResidualTol) {
    const auto mode = classify_hessian(hessian(fp.state(), m));
    fp.stability = mode.stability;
    fp.omega_or_lyapunov = mode.rate;
  }
  return fp;
}

}  // namespace detail

/// Fixed points with sinθ̄ ≠ 0 (E_J = E_C = 0). Returns the ±θ̄ pair, a single
/// point when θ̄ ∈ {0, π}, or nothing when the solution is infeasible.
inline std::vector<FixedPoint> fixed_points_phase_locked(const ModelParams& m) {
  const double denom = m.alpha * m.gamma - m.beta * m.beta;
  if (denom == 0.0)
    throw SingularDenominatorError("fixed_points_phase_locked: alpha*gamma == beta^2");
  const double p_bar = (m.beta * m.delta - m.alpha * m.epsilon) / denom;
  const double rc = (m.beta * m.epsilon - m.gamma * m.delta) / denom;
  if (std::abs(p_bar) > 1.0) return {};
  const double root = std::sqrt(1.0 - p_bar * p_bar);
  double cos_theta;
  if (root == 0.0) {
    if (rc != 0.0) return {};
    cos_theta = 0.0;
  } else {
    cos_theta = rc / root;
    if (std::abs(cos_theta) > 1.0) return {};
  }
  const double theta = std::acos(cos_theta);
  std::vector<FixedPoint> out;
  out.push_back(detail::finish_fixed_point(m, p_bar, theta, FixedPointKind::phase_locked));
  if (theta != 0.0 && theta != kPi)
    out.push_back(detail::finish_fixed_point(m, p_bar, -theta, FixedPointKind::phase_locked));
  return out;
}

/// Left-hand side of the θ̄ ∈ {0, π} fixed-point condition; branch = +1 for
/// θ̄ = 0 and −1 for θ̄ = π.
inline double real_phase_condition(double p, int branch, const ModelParams& m) {
  const double root = std::sqrt(1.0 - p * p);
  return m.epsilon + (m.gamma - m.alpha) * p +
         branch * (m.beta * (1.0 - 2.0 * p * p) - m.delta * p) / root;
}

inline constexpr std::size_t kRealPhaseGrid = 2000;

/// Fixed points with sinθ̄ = 0: bracketing on a uniform grid over (−1, 1)
/// followed by bisection. Poles that are fixed points (Δ ± β = 0) are
/// appended with degenerate stability.
inline std::vector<FixedPoint> fixed_points_real_phase(const ModelParams& m,
                                                       std::size_t grid = kRealPhaseGrid) {
  std::vector<FixedPoint> out;
  const double edge = 1.0 - 1e-13;
  for (int branch : {+1, -1}) {
    const double theta = branch > 0 ? 0.0 : kPi;
    auto f = [&](double p) { return real_phase_condition(p, branch, m); };
    std::vector<double> nodes(grid + 1), vals(grid + 1);
    for (std::size_t i = 0; i <= grid; ++i) {
      nodes[i] = std::clamp(-1.0 + 2.0 * static_cast<double>(i) / grid, -edge, edge);
      vals[i] = f(nodes[i]);
    }
    std::vector<double> roots;
    for (std::size_t i = 0; i <= grid; ++i)
      if (vals[i] == 0.0) roots.push_back(nodes[i]);
    for (std::size_t i = 0; i < grid; ++i) {
      if (vals[i] == 0.0 || vals[i + 1] == 0.0) continue;
      if ((vals[i] < 0) != (vals[i + 1] < 0))
        roots.push_back(bisect(f, nodes[i], nodes[i + 1], 0.0, 200));
    }
    std::sort(roots.begin(), roots.end());
    for (double p : roots)
      out.push_back(detail::finish_fixed_point(m, p, theta, FixedPointKind::real_phase));
  }
  const double scale = std::max({1.0, std::abs(m.delta), std::abs(m.beta)});
  for (double pole : {+1.0, -1.0}) {
    if (std::abs(m.delta + pole * m.beta) <= 1e-12 * scale) {
      FixedPoint fp{pole, 0.0, FixedPointKind::real_phase, Stability::degenerate, 0.0, 0.0};
      fp.residual = fixed_point_residual(fp.state(), m);
      out.push_back(fp);
    }
  }
  return out;
}

inline std::vector<FixedPoint> all_fixed_points(const ModelParams& m) {
  std::vector<FixedPoint> out;
  if (m.alpha * m.gamma - m.beta * m.beta != 0.0) out = fixed_points_phase_locked(m);
  auto real = fixed_points_real_phase(m);
  out.insert(out.end(), real.begin(), real.end());
  return out;
}

// ---------------------------------------------------------------------------
// Critical-surface scan

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 1;

  double at(std::size_t i) const {
    return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
};

struct ScanRegion {
  AxisRange alpha, beta, gamma;
};

struct ScanCell {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double omega_sq = 0.0;
  bool on_surface = false;
};

struct CriticalScan {
  ScanRegion region;
  /// Row-major over (α, β, γ) with γ fastest.
  std::vector<ScanCell> cells;
  /// Zero-level-set points: grid nodes with ω² = 0 and linear interpolation
  /// points on every sign-changing grid edge.
  std::vector<Vec3> zero_set;
  /// Marching-squares segments when exactly two axes vary.
  std::vector<std::pair<Vec3, Vec3>> segments;
};

inline double canonical_omega_sq(double alpha, double beta, double gamma) {
  return alpha * gamma - beta * beta;
}

inline CriticalScan critical_surface_scan(const ScanRegion& region) {
  const std::array<const AxisRange*, 3> axes = {&region.alpha, &region.beta, &region.gamma};
  for (const AxisRange* ax : axes) {
    if (!std::isfinite(ax->lo) || !std::isfinite(ax->hi))
      throw InvalidInputError("critical_surface_scan: region must be finite");
    if (ax->n == 0 || (ax->lo != ax->hi && ax->n < 2))
      throw InvalidInputError("critical_surface_scan: resolution must be >= 2 per varying axis");
  }
  const std::size_t na = region.alpha.n, nb = region.beta.n, ng = region.gamma.n;
  CriticalScan scan;
  scan.region = region;
  scan.cells.resize(na * nb * ng);
  auto index = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * nb + j) * ng + k; };
  parallel_for(na, [&](std::size_t i) {
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < ng; ++k) {
        ScanCell c;
        c.alpha = region.alpha.at(i);
        c.beta = region.beta.at(j);
        c.gamma = region.gamma.at(k);
        c.omega_sq = canonical_omega_sq(c.alpha, c.beta, c.gamma);
        c.on_surface = std::abs(c.omega_sq) <= kSofteningTol;
        scan.cells[index(i, j, k)] = c;
      }
  });

  auto point = [](const ScanCell& c) { return Vec3{c.alpha, c.beta, c.gamma}; };
  auto is_zero = [](const ScanCell& c) { return std::abs(c.omega_sq) <= kSofteningTol; };
  auto crossing = [&](const ScanCell& u, const ScanCell& v) -> std::optional<Vec3> {
    if (is_zero(u) || is_zero(v) || (u.omega_sq < 0) == (v.omega_sq < 0)) return std::nullopt;
    const double t = u.omega_sq / (u.omega_sq - v.omega_sq);
    return point(u) + t * (point(v) - point(u));
  };

  for (const auto& c : scan.cells)
    if (is_zero(c)) scan.zero_set.push_back(point(c));
  const std::array<std::array<std::size_t, 3>, 3> steps = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < ng; ++k)
        for (const auto& d : steps) {
          const std::size_t i2 = i + d[0], j2 = j + d[1], k2 = k + d[2];
          if (i2 >= na || j2 >= nb || k2 >= ng) continue;
          auto& u = scan.cells[index(i, j, k)];
          auto& v = scan.cells[index(i2, j2, k2)];
          if (auto x = crossing(u, v)) {
            scan.zero_set.push_back(*x);
            u.on_surface = v.on_surface = true;
          }
        }

  // Marching squares on a 2D slice.
  std::vector<int> varying;
  for (int a = 0; a < 3; ++a)
    if (axes[a]->n > 1) varying.push_back(a);
  if (varying.size() == 2) {
    const std::size_t n0 = axes[varying[0]]->n, n1 = axes[varying[1]]->n;
    auto at = [&](std::size_t u, std::size_t v) -> const ScanCell& {
      std::array<std::size_t, 3> idx{0, 0, 0};
      idx[varying[0]] = u;
      idx[varying[1]] = v;
      return scan.cells[index(idx[0], idx[1], idx[2])];
    };
    for (std::size_t u = 0; u + 1 < n0; ++u)
      for (std::size_t v = 0; v + 1 < n1; ++v) {
        const std::array<const ScanCell*, 4> corner = {&at(u, v), &at(u + 1, v), &at(u + 1, v + 1),
                                                       &at(u, v + 1)};
        std::vector<Vec3> pts;
        for (int e = 0; e < 4; ++e) {
          const ScanCell& p = *corner[e];
          const ScanCell& q = *corner[(e + 1) % 4];
          if (is_zero(p)) pts.push_back(point(p));
          else if (auto x = crossing(p, q)) pts.push_back(*x);
        }
        if (pts.size() == 2) {
          scan.segments.emplace_back(pts[0], pts[1]);
        } else if (pts.size() == 4) {
          double centre = 0.0;
          for (auto* c : corner) centre += 0.25 * c->omega_sq;
          const bool first_positive = corner[0]->omega_sq > 0;
          if ((centre > 0) == first_positive) {
            scan.segments.emplace_back(pts[0], pts[3]);
            scan.segments.emplace_back(pts[1], pts[2]);
          } else {
            scan.segments.emplace_back(pts[0], pts[1]);
            scan.segments.emplace_back(pts[2], pts[3]);
          }
        }
      }
  }
  return scan;
}

}  // namespace hc

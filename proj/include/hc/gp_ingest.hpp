#pragma once

// Two-mode parameters from a 1D double-well potential: Gaussian localized
// modes, symmetric (Löwdin) orthogonalization and overlap quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "hc/errors.hpp"
#include "hc/model.hpp"
#include "hc/numerics.hpp"

namespace hc {

/// V(x) = m/2 ω_x² (x − Δx)² + V₀ cos²(πx/d).
struct DoubleWell1D {
  double m = 1.0;
  double omega_x = 1.0;
  double dx_offset = 0.0;
  double v0 = 0.0;
  double d = 1.0;

  void validate() const {
    if (!(m > 0.0)) throw InvalidInputError("DoubleWell1D: mass must be positive");
    if (!(d > 0.0)) throw InvalidInputError("DoubleWell1D: period must be positive");
    if (!(v0 >= 0.0)) throw InvalidInputError("DoubleWell1D: barrier depth must be >= 0");
  }
};

struct UniformGrid {
  double x0 = 0.0;
  double dx = 0.0;
  std::size_t n = 0;

  double at(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double back() const { return at(n - 1); }
  /// Same span at twice the resolution.
  UniformGrid refined() const { return {x0, 0.5 * dx, 2 * n - 1}; }
};

struct ModePair {
  UniformGrid grid;
  std::vector<double> phi1;
  std::vector<double> phi2;
};

inline double potential_eval(double x, const DoubleWell1D& w) {
  const double c = std::cos(kPi * x / w.d);
  const double u = x - w.dx_offset;
  return 0.5 * w.m * w.omega_x * w.omega_x * u * u + w.v0 * c * c;
}

inline double integrate_grid(const std::vector<double>& f, const UniformGrid& g) {
  return simpson_samples(f, g.dx);
}

/// Overlap matrix entries (∫φ₁², ∫φ₂², ∫φ₁φ₂) by composite Simpson.
inline std::array<double, 3> overlap_matrix(const ModePair& mp) {
  std::vector<double> a(mp.grid.n), b(mp.grid.n), c(mp.grid.n);
  for (std::size_t i = 0; i < mp.grid.n; ++i) {
    a[i] = mp.phi1[i] * mp.phi1[i];
    b[i] = mp.phi2[i] * mp.phi2[i];
    c[i] = mp.phi1[i] * mp.phi2[i];
  }
  return {integrate_grid(a, mp.grid), integrate_grid(b, mp.grid), integrate_grid(c, mp.grid)};
}

inline double orthonormality_error(const ModePair& mp) {
  const auto s = overlap_matrix(mp);
  return std::max({std::abs(s[0] - 1.0), std::abs(s[1] - 1.0), std::abs(s[2])});
}

/// Normalized Gaussians exp(−(x − x_i)²/(2σ²)), symmetrically orthogonalized.
/// The grid must extend 6σ beyond both centres with dx ≤ σ/8 and an odd
/// number of points.
inline ModePair gaussian_modes(std::array<double, 2> centers, double sigma, const UniformGrid& grid) {
  if (!(sigma > 0.0)) throw InvalidInputError("gaussian_modes: sigma must be positive");
  if (grid.n < 3 || grid.n % 2 == 0)
    throw DiscretizationError("gaussian_modes: grid needs an odd number (>= 3) of points");
  if (!(grid.dx > 0.0) || grid.dx > sigma / 8.0)
    throw DiscretizationError("gaussian_modes: grid spacing must satisfy 0 < dx <= sigma/8");
  const double lo = std::min(centers[0], centers[1]) - 6.0 * sigma;
  const double hi = std::max(centers[0], centers[1]) + 6.0 * sigma;
  if (grid.x0 > lo || grid.back() < hi)
    throw DiscretizationError("gaussian_modes: grid must extend 6 sigma beyond both centers");

  ModePair mp{grid, std::vector<double>(grid.n), std::vector<double>(grid.n)};
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.at(i);
    const double u1 = (x - centers[0]) / sigma, u2 = (x - centers[1]) / sigma;
    mp.phi1[i] = std::exp(-0.5 * u1 * u1);
    mp.phi2[i] = std::exp(-0.5 * u2 * u2);
  }
  auto s = overlap_matrix(mp);
  for (auto& v : mp.phi1) v /= std::sqrt(s[0]);
  for (auto& v : mp.phi2) v /= std::sqrt(s[1]);
  // S^{-1/2} for S = [[1, s], [s, 1]].
  s = overlap_matrix(mp);
  const double ov = s[2];
  if (!(std::abs(ov) < 1.0)) throw InvalidInputError("gaussian_modes: modes are linearly dependent");
  const double ip = 1.0 / std::sqrt(1.0 + ov), im = 1.0 / std::sqrt(1.0 - ov);
  const double diag = 0.5 * (ip + im), off = 0.5 * (ip - im);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double a = mp.phi1[i], b = mp.phi2[i];
    mp.phi1[i] = diag * a + off * b;
    mp.phi2[i] = off * a + diag * b;
  }
  return mp;
}

namespace detail {

/// f'' by the 3-point stencil with zero values outside the grid,
/// Richardson-extrapolated over spacings h, 2h and 4h.
inline std::vector<double> second_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  auto at = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : f[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    auto d2 = [&](std::ptrdiff_t s) {
      const double hs = h * static_cast<double>(s);
      return (at(i + s) - 2.0 * at(i) + at(i - s)) / (hs * hs);
    };
    const double d1 = d2(1), d2h = d2(2), d4h = d2(4);
    const double r1 = (4.0 * d1 - d2h) / 3.0;
    const double r2 = (4.0 * d2h - d4h) / 3.0;
    out[k] = (16.0 * r1 - r2) / 15.0;
  }
  return out;
}

}  // namespace detail

/// ε_i = ∫φ_i ĥ φ_i, K = ∫φ₁ ĥ φ₂ with ĥ = −∂²/(2m) + V; U_i = gN∫φ_i⁴,
/// U_ij = gN∫φ_i³φ_j, I = gN∫φ₁²φ₂².
inline TwoModeOverlaps overlap_integrals(const ModePair& mp, const DoubleWell1D& w, double g,
                                         double n_atoms) {
  w.validate();
  if (mp.phi1.size() != mp.grid.n || mp.phi2.size() != mp.grid.n)
    throw InvalidInputError("overlap_integrals: mode samples do not match the grid");
  if (!(orthonormality_error(mp) < 1e-10))
    throw InvalidInputError("overlap_integrals: modes are not orthonormal to 1e-10");
  const std::size_t n = mp.grid.n;
  const auto lap1 = detail::second_derivative(mp.phi1, mp.grid.dx);
  const auto lap2 = detail::second_derivative(mp.phi2, mp.grid.dx);
  std::vector<double> h1(n), h2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = potential_eval(mp.grid.at(i), w);
    h1[i] = -lap1[i] / (2.0 * w.m) + v * mp.phi1[i];
    h2[i] = -lap2[i] / (2.0 * w.m) + v * mp.phi2[i];
  }
  const double gn = g * n_atoms;
  auto integral = [&](auto&& fn) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = fn(i);
    return integrate_grid(f, mp.grid);
  };
  const auto& p1 = mp.phi1;
  const auto& p2 = mp.phi2;
  TwoModeOverlaps o;
  o.eps1 = integral([&](std::size_t i) { return p1[i] * h1[i]; });
  o.eps2 = integral([&](std::size_t i) { return p2[i] * h2[i]; });
  o.k = integral([&](std::size_t i) { return p1[i] * h2[i]; });
  o.u1 = gn * integral([&](std::size_t i) { return p1[i] * p1[i] * p1[i] * p1[i]; });
  o.u2 = gn * integral([&](std::size_t i) { return p2[i] * p2[i] * p2[i] * p2[i]; });
  o.u12 = gn * integral([&](std::size_t i) { return p1[i] * p1[i] * p1[i] * p2[i]; });
  o.u21 = gn * integral([&](std::size_t i) { return p2[i] * p2[i] * p2[i] * p1[i]; });
  o.i_pair = gn * integral([&](std::size_t i) { return p1[i] * p1[i] * p2[i] * p2[i]; });
  return o;
}

/// Well geometry, mode ansatz and grid as read from a geometry file.
struct GeometrySpec {
  DoubleWell1D well;
  double sigma = 0.0;
  std::array<double, 2> centers{};
  UniformGrid grid;
  double g = 0.0;
  double n_atoms = 1.0;
};

struct Provenance {
  std::string ansatz = "gaussian+lowdin";
  GeometrySpec geometry;
  double orthonormality_error = 0.0;
};

struct BuiltModel {
  ModelParams params;
  TwoModeOverlaps overlaps;
  Provenance provenance;
};

inline BuiltModel build_model(const TwoModeOverlaps& o, const Provenance& prov) {
  return {params_from_overlaps(o), o, prov};
}

/// Default grid for a geometry: dx = σ/32, spanning 8σ beyond both centres,
/// symmetric about the midpoint of the centres.
inline UniformGrid default_grid(std::array<double, 2> centers, double sigma) {
  const double dx = sigma / 32.0;
  const double mid = 0.5 * (centers[0] + centers[1]);
  const double half = 0.5 * std::abs(centers[1] - centers[0]) + 8.0 * sigma;
  const auto half_n = static_cast<std::size_t>(std::ceil(half / dx));
  return {mid - dx * static_cast<double>(half_n), dx, 2 * half_n + 1};
}

inline BuiltModel run_geometry(const GeometrySpec& spec) {
  const auto modes = gaussian_modes(spec.centers, spec.sigma, spec.grid);
  Provenance prov;
  prov.geometry = spec;
  prov.orthonormality_error = orthonormality_error(modes);
  return build_model(overlap_integrals(modes, spec.well, spec.g, spec.n_atoms), prov);
}

}  // namespace hc

#pragma once

// 2+1 de Sitter space as the hyperboloid −T² + X² + Y² + Z² = 1 in
// Minkowski-4: embedding, FLRW and conformal charts, finite-difference
// curvature, and the tetrad forms of the unit hyperboloid slice.

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "hc/errors.hpp"
#include "hc/minkowski.hpp"
#include "hc/numerics.hpp"

namespace hc {

struct EmbeddingPoint {
  double t_mink = 0.0;
  double x_mink = 0.0;
  double y_mink = 0.0;
  double z_mink = 1.0;

  double constraint_residual() const {
    return -t_mink * t_mink + x_mink * x_mink + y_mink * y_mink + z_mink * z_mink - 1.0;
  }
  std::array<double, 4> as_array() const { return {t_mink, x_mink, y_mink, z_mink}; }
};

struct HyperboloidPoint {
  double psi = 0.0;
  double phi = 0.0;
};

struct MetricAt {
  std::array<std::string, 3> labels;
  Mat3 g{};
};

/// Z = cosh t, (T, X, Y) = sinh t (cosh ψ, sinh ψ cos φ, sinh ψ sin φ).
inline EmbeddingPoint embed(double t, const HyperboloidPoint& hp) {
  const double st = std::sinh(t);
  const double sp = std::sinh(hp.psi);
  return {st * std::cosh(hp.psi), st * sp * std::cos(hp.phi), st * sp * std::sin(hp.phi),
          std::cosh(t)};
}

/// ds² = −dt² + sinh²t (dψ² + sinh²ψ dφ²).
inline MetricAt flrw_metric(double t, double psi) {
  const double a2 = std::sinh(t) * std::sinh(t);
  const double s2 = std::sinh(psi) * std::sinh(psi);
  MetricAt m;
  m.labels = {"t", "psi", "phi"};
  m.g = {{{-1.0, 0.0, 0.0}, {0.0, a2, 0.0}, {0.0, 0.0, a2 * s2}}};
  return m;
}

/// Metric induced on chart coordinates x ↦ E(x) ∈ R^{3,1}, using
/// Richardson-extrapolated central differences of the embedding map.
inline Mat3 induced_metric(const std::function<std::array<double, 4>(const Vec3&)>& map,
                           const Vec3& x, double h = 1e-3) {
  auto partial = [&](int mu, double step) {
    Vec3 xp = x, xm = x;
    xp[mu] += step;
    xm[mu] -= step;
    const auto ep = map(xp), em = map(xm);
    std::array<double, 4> d{};
    for (int k = 0; k < 4; ++k) d[k] = (ep[k] - em[k]) / (2.0 * step);
    return d;
  };
  std::array<std::array<double, 4>, 3> tangent{};
  for (int mu = 0; mu < 3; ++mu) {
    const auto coarse = partial(mu, h), fine = partial(mu, 0.5 * h);
    for (int k = 0; k < 4; ++k) tangent[mu][k] = (4.0 * fine[k] - coarse[k]) / 3.0;
  }
  Mat3 g{};
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu)
      g[mu][nu] = -tangent[mu][0] * tangent[nu][0] + tangent[mu][1] * tangent[nu][1] +
                  tangent[mu][2] * tangent[nu][2] + tangent[mu][3] * tangent[nu][3];
  return g;
}

/// Embedding-induced metric in FLRW coordinates (t, ψ, φ).
inline MetricAt flrw_induced_metric(double t, double psi, double phi, double h = 1e-3) {
  MetricAt m;
  m.labels = {"t", "psi", "phi"};
  m.g = induced_metric([](const Vec3& x) { return embed(x[0], {x[1], x[2]}).as_array(); },
                       {t, psi, phi}, h);
  return m;
}

// ---------------------------------------------------------------------------
// Curvature by finite differences

struct CurvatureReport {
  double scalar = 0.0;
  double scalar_residual = 0.0;   ///< |R − 6|
  double ricci_residual = 0.0;    ///< max |R_μν − 2 g_μν|
  double riemann_residual = 0.0;  ///< max |R_μνλσ − (g_μλ g_νσ − g_μσ g_νλ)|
};

namespace detail {

using Tensor3 = std::array<Mat3, 3>;              // T[a][b][c]
using Tensor4 = std::array<std::array<Mat3, 3>, 3>;  // T[a][b][c][d]

inline Mat3 invert3(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

/// Γ^ρ_μν at x from central differences of the metric (φ-independent).
inline Tensor3 christoffel(const Vec3& x, double h) {
  std::array<Mat3, 3> dg{};  // dg[λ] = ∂_λ g
  for (int l = 0; l < 2; ++l) {
    Vec3 xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    const Mat3 gp = flrw_metric(xp[0], xp[1]).g, gm = flrw_metric(xm[0], xm[1]).g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
  }
  const Mat3 ginv = invert3(flrw_metric(x[0], x[1]).g);
  Tensor3 gam{};
  for (int r = 0; r < 3; ++r)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
          s += ginv[r][k] * (dg[m][k][n] + dg[n][k][m] - dg[k][m][n]);
        gam[r][m][n] = 0.5 * s;
      }
  return gam;
}

/// Covariant Riemann tensor R_ρσμν with
/// R^ρ_σμν = ∂_μ Γ^ρ_νσ − ∂_ν Γ^ρ_μσ + Γ^ρ_μλ Γ^λ_νσ − Γ^ρ_νλ Γ^λ_μσ.
inline Tensor4 riemann_lower(const Vec3& x, double h) {
  std::array<Tensor3, 3> dgam{};
  for (int l = 0; l < 3; ++l) {
    if (l == 2) continue;  // no φ dependence
    Vec3 xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    const auto gp = christoffel(xp, h), gm = christoffel(xm, h);
    for (int r = 0; r < 3; ++r)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) dgam[l][r][m][n] = (gp[r][m][n] - gm[r][m][n]) / (2.0 * h);
  }
  const auto gam = christoffel(x, h);
  const Mat3 g = flrw_metric(x[0], x[1]).g;
  Tensor4 up{};
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
          double v = dgam[m][r][n][s] - dgam[n][r][m][s];
          for (int l = 0; l < 3; ++l) v += gam[r][m][l] * gam[l][n][s] - gam[r][n][l] * gam[l][m][s];
          up[r][s][m][n] = v;
        }
  Tensor4 low{};
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
          double v = 0.0;
          for (int k = 0; k < 3; ++k) v += g[r][k] * up[k][s][m][n];
          low[r][s][m][n] = v;
        }
  return low;
}

}  // namespace detail

/// Checks the maximal-symmetry, Einstein-space and scalar-curvature
/// identities of the FLRW chart at (t, ψ) with Richardson-extrapolated
/// finite differences, (4 R(h/2) − R(h))/3.
inline CurvatureReport curvature_checks(double t, double psi, double h = 1e-3) {
  if (!(std::abs(std::sinh(t)) > 0.1) || !(psi > 0.1))
    throw ChartError("curvature_checks: point too close to a coordinate degeneracy");
  if (!(h >= 1e-5 && h <= 1e-3)) throw InvalidInputError("curvature_checks: h must lie in [1e-5, 1e-3]");
  const Vec3 x{t, psi, 0.0};
  const auto coarse = detail::riemann_lower(x, h), fine = detail::riemann_lower(x, 0.5 * h);
  detail::Tensor4 riem{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          riem[a][b][c][d] = (4.0 * fine[a][b][c][d] - coarse[a][b][c][d]) / 3.0;

  const Mat3 g = flrw_metric(t, psi).g;
  const Mat3 ginv = detail::invert3(g);
  CurvatureReport rep;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          const double expect = g[a][c] * g[b][d] - g[a][d] * g[b][c];
          rep.riemann_residual = std::max(rep.riemann_residual, std::abs(riem[a][b][c][d] - expect));
        }
  Mat3 ricci{};  // R_σν = g^ρκ R_κσρν
  for (int s = 0; s < 3; ++s)
    for (int n = 0; n < 3; ++n) {
      double v = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k) v += ginv[r][k] * riem[k][s][r][n];
      ricci[s][n] = v;
      rep.ricci_residual = std::max(rep.ricci_residual, std::abs(v - 2.0 * g[s][n]));
    }
  for (int s = 0; s < 3; ++s)
    for (int n = 0; n < 3; ++n) rep.scalar += ginv[s][n] * ricci[s][n];
  rep.scalar_residual = std::abs(rep.scalar - 6.0);
  return rep;
}

// ---------------------------------------------------------------------------
// Tetrad forms on the hyperboloid slice

/// A 1-form in the (dψ, dφ) basis.
struct OneForm2 {
  double d_psi = 0.0;
  double d_phi = 0.0;
};

struct HyperboloidForms {
  OneForm2 e1;        ///< a dψ
  OneForm2 e2;        ///< a sinhψ dφ
  OneForm2 omega12;   ///< coshψ dφ
  double r12 = 0.0;   ///< coefficient of dψ∧dφ: sinhψ
  double cartan_first_residual = 0.0;
  double cartan_second_residual = 0.0;
};

namespace detail {

inline OneForm2 vielbein1(double, double a) { return {a, 0.0}; }
inline OneForm2 vielbein2(double psi, double a) { return {0.0, a * std::sinh(psi)}; }
inline OneForm2 connection12(double psi) { return {0.0, std::cosh(psi)}; }

inline double wedge(const OneForm2& u, const OneForm2& v) { return u.d_psi * v.d_phi - u.d_phi * v.d_psi; }

/// Exterior derivative of a 1-form field, as the dψ∧dφ coefficient
/// ∂_ψ f_φ − ∂_φ f_ψ, by Richardson-extrapolated central differences.
template <class F>
double exterior_d(const F& form, double psi, double phi, double h = 1e-3) {
  auto once = [&](double s) {
    const double dpsi_fphi = (form(psi + s, phi).d_phi - form(psi - s, phi).d_phi) / (2.0 * s);
    const double dphi_fpsi = (form(psi, phi + s).d_psi - form(psi, phi - s).d_psi) / (2.0 * s);
    return dpsi_fphi - dphi_fpsi;
  };
  return (4.0 * once(0.5 * h) - once(h)) / 3.0;
}

}  // namespace detail

/// Vielbeins e¹ = a dψ, e² = a sinhψ dφ, connection ω¹₂ = coshψ dφ and
/// curvature R¹₂ = sinhψ dψ∧dφ, with the structure-equation residuals
/// max|de^a − ω^a_b∧e^b| and |R¹₂ − dω¹₂ − ω¹_c∧ω^c_2| (ω²₁ = −ω¹₂).
inline HyperboloidForms hyperboloid_forms(const HyperboloidPoint& hp, double a = 1.0) {
  HyperboloidForms f;
  f.e1 = detail::vielbein1(hp.psi, a);
  f.e2 = detail::vielbein2(hp.psi, a);
  f.omega12 = detail::connection12(hp.psi);
  f.r12 = std::sinh(hp.psi);

  const OneForm2 omega21{-f.omega12.d_psi, -f.omega12.d_phi};
  const double de1 = detail::exterior_d([&](double p, double) { return detail::vielbein1(p, a); }, hp.psi, hp.phi);
  const double de2 = detail::exterior_d([&](double p, double) { return detail::vielbein2(p, a); }, hp.psi, hp.phi);
  const double t1 = de1 - detail::wedge(f.omega12, f.e2);
  const double t2 = de2 - detail::wedge(omega21, f.e1);
  f.cartan_first_residual = std::max(std::abs(t1), std::abs(t2));

  const double domega = detail::exterior_d([](double p, double) { return detail::connection12(p); }, hp.psi, hp.phi);
  // ω¹_c ∧ ω^c_2 vanishes in two dimensions (ω¹₁ = ω²₂ = 0); kept explicit.
  const double ww = detail::wedge(OneForm2{}, f.omega12) + detail::wedge(f.omega12, OneForm2{});
  f.cartan_second_residual = std::abs(f.r12 - domega - ww);
  return f;
}

/// R¹₂ = [T dX∧dY + X dY∧dT + Y dT∧dX] / (T² − X² − Y²)^{3/2}.
inline TwoForm curvature_form_minkowski(const MinkowskiPoint& pt) {
  const double w2 = pt.interval();
  if (!(w2 > 0.0)) throw ConeSingularityError("curvature_form_minkowski: point on or outside the light cone");
  const double w3 = w2 * std::sqrt(w2);
  return {{pt.t_coord / w3, pt.x_coord / w3, pt.y_coord / w3}};
}

/// Pullback of a Minkowski 2-form to the (ψ, φ) chart of the unit
/// hyperboloid (T, X, Y) = (coshψ, sinhψ cosφ, sinhψ sinφ): the dψ∧dφ
/// coefficient.
inline double pullback_to_hyperboloid(const TwoForm& form, const HyperboloidPoint& hp) {
  const double ch = std::cosh(hp.psi), sh = std::sinh(hp.psi);
  const double c = std::cos(hp.phi), s = std::sin(hp.phi);
  const Vec3 d_psi{sh, ch * c, ch * s};
  const Vec3 d_phi{0.0, -sh * s, sh * c};
  return form.evaluate(d_psi, d_phi);
}

inline MinkowskiPoint hyperboloid_to_minkowski(const HyperboloidPoint& hp, double omega = 1.0) {
  const double sh = std::sinh(hp.psi);
  return {omega * std::cosh(hp.psi), omega * sh * std::cos(hp.phi), omega * sh * std::sin(hp.phi)};
}

struct HyperboloidProjection {
  HyperboloidPoint point;
  double omega = 0.0;
  bool at_pole = false;  ///< φ undefined; reported as 0
};

/// ω = √(T²−X²−Y²), ψ = arcosh(T/ω), φ = atan2(Y, X) ∈ [0, 2π).
inline HyperboloidProjection project_to_hyperboloid(const MinkowskiPoint& pt) {
  if (!pt.in_future_cone())
    throw ConeSingularityError("project_to_hyperboloid: point not inside the future light cone");
  HyperboloidProjection out;
  out.omega = std::sqrt(pt.interval());
  const double r = std::hypot(pt.x_coord, pt.y_coord);
  // asinh(r/ω) is accurate near the pole where acosh(T/ω) loses digits.
  out.point.psi = std::asinh(r / out.omega);
  out.at_pole = r == 0.0;
  out.point.phi = out.at_pole ? 0.0 : wrap_two_pi(std::atan2(pt.y_coord, pt.x_coord));
  return out;
}

// ---------------------------------------------------------------------------
// Conformal chart

struct ConformalPoint {
  double tau = 0.0;
  double psi_c = 0.0;  ///< polar angle on the spatial S², in [0, π]
  double phi = 0.0;
};

/// T = tanτ, (X, Y, Z) = secτ (sinψ_c cosφ, sinψ_c sinφ, cosψ_c).
inline EmbeddingPoint conformal_to_embedding(const ConformalPoint& c) {
  if (!(std::abs(c.tau) < 0.5 * kPi)) throw ChartError("conformal chart requires |tau| < pi/2");
  const double sec = 1.0 / std::cos(c.tau);
  const double sp = std::sin(c.psi_c);
  return {std::tan(c.tau), sec * sp * std::cos(c.phi), sec * sp * std::sin(c.phi), sec * std::cos(c.psi_c)};
}

inline ConformalPoint conformal_chart(const EmbeddingPoint& ep) {
  const auto v = ep.as_array();
  for (double x : v)
    if (!std::isfinite(x)) throw ChartError("conformal_chart: non-finite embedding point");
  if (!(std::abs(ep.constraint_residual()) <= 1e-9 * std::max(1.0, ep.t_mink * ep.t_mink)))
    throw ChartError("conformal_chart: point is not on the de Sitter hyperboloid");
  const double r = std::hypot(ep.x_mink, ep.y_mink);
  ConformalPoint c;
  c.tau = std::atan(ep.t_mink);
  c.psi_c = std::atan2(r, ep.z_mink);
  c.phi = r == 0.0 ? 0.0 : wrap_two_pi(std::atan2(ep.y_mink, ep.x_mink));
  return c;
}

/// ds² = sec²τ (−dτ² + dψ_c² + sin²ψ_c dφ²).
inline double conformal_factor(double tau) {
  if (!(std::abs(tau) < 0.5 * kPi)) throw ChartError("conformal chart requires |tau| < pi/2");
  const double c = std::cos(tau);
  return 1.0 / (c * c);
}

inline MetricAt conformal_metric(const ConformalPoint& c) {
  const double f = conformal_factor(c.tau);
  const double s = std::sin(c.psi_c);
  MetricAt m;
  m.labels = {"tau", "psi_c", "phi"};
  m.g = {{{-f, 0.0, 0.0}, {0.0, f, 0.0}, {0.0, 0.0, f * s * s}}};
  return m;
}

/// Max |g_conformal − g_induced| at a chart point.
inline double conformal_metric_residual(const ConformalPoint& c) {
  const Mat3 induced = induced_metric(
      [](const Vec3& x) { return conformal_to_embedding({x[0], x[1], x[2]}).as_array(); },
      {c.tau, c.psi_c, c.phi});
  const Mat3 g = conformal_metric(c).g;
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(g[i][j] - induced[i][j]));
  return r;
}

}  // namespace hc

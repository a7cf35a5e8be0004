#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "hc/fixed_points.hpp"

using namespace hc;
using Catch::Matchers::WithinAbs;

namespace {

bool contains_point(const std::vector<FixedPoint>& fps, double p, double theta, double tol = 1e-12) {
  return std::any_of(fps.begin(), fps.end(), [&](const FixedPoint& f) {
    return std::abs(f.p_bar - p) < tol && std::abs(wrap_pi(f.theta_bar - theta)) < tol;
  });
}

// ∂H/∂p at θ ∈ {0, π}, written out by hand.
double dh_dp(double p, double c, const ModelParams& m) {
  const double r = std::sqrt(1 - p * p);
  return m.epsilon + m.gamma * p + m.beta * r * c - (m.delta + m.beta * p) * p / r * c - m.alpha * p * c * c;
}

// Eigenvalues of the linearized flow from a finite-difference Jacobian.
std::pair<std::complex<double>, std::complex<double>> linear_eigs(const PhaseState& s, const ModelParams& m) {
  const double h = 1e-6;
  auto f = [&](double p, double t) { return eom_full({p, t}, m); };
  const auto fp1 = f(s.p + h, s.theta), fp0 = f(s.p - h, s.theta);
  const auto ft1 = f(s.p, s.theta + h), ft0 = f(s.p, s.theta - h);
  const double j11 = (fp1.p_dot - fp0.p_dot) / (2 * h), j12 = (ft1.p_dot - ft0.p_dot) / (2 * h);
  const double j21 = (fp1.theta_dot - fp0.theta_dot) / (2 * h), j22 = (ft1.theta_dot - ft0.theta_dot) / (2 * h);
  const double tr = j11 + j22, det = j11 * j22 - j12 * j21;
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4 - det));
  return {tr / 2 + disc, tr / 2 - disc};
}

}  // namespace

TEST_CASE("phase-locked fixed points") {
  for (double beta : {0.0, 0.5, 1.5}) {
    const ModelParams m{0.0, 0.0, 1.0, beta, 1.0};
    const auto fps = fixed_points_phase_locked(m);
    REQUIRE(fps.size() == 2);
    CHECK(contains_point(fps, 0.0, kPi / 2));
    CHECK(contains_point(fps, 0.0, -kPi / 2));
  }
  CHECK(fixed_points_phase_locked({1.0, 0.0, 2.0, 1.0, 1.0}).empty());

  const ModelParams m{0.1, 0.2, 1.0, 0.3, 1.0};
  const auto fps = fixed_points_phase_locked(m);
  REQUIRE(fps.size() == 2);
  for (const auto& fp : fps) {
    CHECK_THAT(fp.p_bar, WithinAbs(-0.18681318681318682, 1e-14));
    CHECK_THAT(std::cos(fp.theta_bar), WithinAbs(-0.044743737015, 1e-11));
    CHECK(fp.residual < 1e-12);
    const auto f = josephson_fields(fp.state(), m);
    CHECK_THAT(f.e_j, WithinAbs(0.0, 1e-12));
    CHECK_THAT(f.e_c, WithinAbs(0.0, 1e-12));
  }
  CHECK_THROWS_AS(fixed_points_phase_locked({0.0, 0.0, 1.0, 1.0, 1.0}), SingularDenominatorError);
}

TEST_CASE("real-phase fixed points, symmetric well") {
  const ModelParams m{0.3, 0.0, 0.5, 0.0, 1.0};
  const auto fps = fixed_points_real_phase(m);
  CHECK(contains_point(fps, 0.0, 0.0));
  CHECK(contains_point(fps, 0.0, kPi));
  // Λ = Δ/(γ − α) = 0.6 gives the θ̄ = 0 roots p̄ = ±√(1 − Λ²).
  CHECK(contains_point(fps, 0.8, 0.0, 1e-12));
  CHECK(contains_point(fps, -0.8, 0.0, 1e-12));
  CHECK(fps.size() == 4);
  for (const auto& fp : fps) CHECK(fp.residual < 1e-12);

  const auto edge = fixed_points_real_phase({0.0, 0.0, 0.5, 0.0, 1.0});
  CHECK(contains_point(edge, 0.0, 0.0));
  const auto poles = std::count_if(edge.begin(), edge.end(), [](const FixedPoint& f) { return f.at_pole(); });
  CHECK(poles == 2);
  for (const auto& f : edge)
    if (f.at_pole()) CHECK(f.stability == Stability::degenerate);
}

TEST_CASE("real-phase fixed points match a brute-force root scan") {
  const ModelParams m{0.2, 0.1, 0.3, 0.05, 0.8};
  const auto fps = fixed_points_real_phase(m);
  std::vector<std::pair<double, double>> oracle;
  for (double c : {1.0, -1.0}) {
    const int n = 200000;
    double prev_p = -1 + 1e-9, prev = dh_dp(prev_p, c, m);
    for (int i = 1; i <= n; ++i) {
      const double p = -1 + 1e-9 + (2 - 2e-9) * i / n;
      const double v = dh_dp(p, c, m);
      if ((prev < 0) != (v < 0)) {
        double lo = prev_p, hi = p;
        for (int k = 0; k < 100; ++k) {
          const double mid = 0.5 * (lo + hi);
          ((dh_dp(lo, c, m) < 0) == (dh_dp(mid, c, m) < 0) ? lo : hi) = mid;
        }
        oracle.emplace_back(0.5 * (lo + hi), c > 0 ? 0.0 : kPi);
      }
      prev_p = p, prev = v;
    }
  }
  REQUIRE(fps.size() == oracle.size());
  for (const auto& [p, t] : oracle) CHECK(contains_point(fps, p, t, 1e-10));
}

TEST_CASE("Bogoliubov frequencies and stability") {
  {
    const ModelParams m{0.0, 0.0, 1.0, 0.5, 1.0};
    const FixedPoint fp{0.0, kPi / 2, FixedPointKind::phase_locked};
    const auto mode = bogoliubov_frequency(m, fp);
    CHECK(mode.stability == Stability::center);
    CHECK_THAT(mode.rate, WithinAbs(std::sqrt(0.75), 1e-12));
    const auto [l1, l2] = linear_eigs(fp.state(), m);
    CHECK_THAT(std::abs(l1.imag()), WithinAbs(mode.rate, 1e-8));
    CHECK_THAT(l1.real(), WithinAbs(0.0, 1e-8));
  }
  {
    const ModelParams m{1.0, 0.0, 0.5, 0.0, 0.5};
    const auto mode = bogoliubov_frequency(m, {0.0, 0.0, FixedPointKind::real_phase});
    CHECK(mode.stability == Stability::center);
    CHECK_THAT(mode.rate, WithinAbs(std::sqrt(1.5), 1e-12));
  }
  {
    const ModelParams m{0.0, 0.0, 1.0, 1.5, 1.0};
    const FixedPoint fp{0.0, -kPi / 2, FixedPointKind::phase_locked};
    const auto mode = bogoliubov_frequency(m, fp);
    CHECK(mode.stability == Stability::saddle);
    CHECK_THAT(mode.rate, WithinAbs(std::sqrt(1.25), 1e-12));
    const auto [l1, l2] = linear_eigs(fp.state(), m);
    CHECK_THAT(std::max(l1.real(), l2.real()), WithinAbs(mode.rate, 1e-8));
    CHECK_THAT(l1.imag(), WithinAbs(0.0, 1e-12));
  }
  CHECK_THROWS_AS(bogoliubov_frequency({0.0, 0.0, 1.0, 0.5, 1.0}, {0.3, 0.2, FixedPointKind::phase_locked}),
                  InvalidInputError);
}

TEST_CASE("Hessian stability agrees with the linearized flow at random fixed points") {
  for (double beta : {-0.4, 0.2, 0.7}) {
    const ModelParams m{0.3, -0.1, 0.8, beta, 1.2};
    for (const auto& fp : all_fixed_points(m)) {
      if (fp.at_pole() || fp.stability == Stability::degenerate) continue;
      const auto [l1, l2] = linear_eigs(fp.state(), m);
      if (fp.stability == Stability::center)
        CHECK_THAT(std::abs(l1.imag()), WithinAbs(fp.omega_or_lyapunov, 1e-6));
      else
        CHECK_THAT(std::max(l1.real(), l2.real()), WithinAbs(fp.omega_or_lyapunov, 1e-6));
    }
  }
}

TEST_CASE("six fixed points of the easy-axis portrait") {
  const ModelParams m{0.0, 0.0, 1.0, 1.5, 1.0};
  const auto fps = all_fixed_points(m);
  REQUIRE(fps.size() == 6);
  const double r = 1 / std::sqrt(2.0);
  const std::vector<std::array<double, 3>> expect = {{0, 1, 0}, {0, -1, 0}, {r, 0, r}, {r, 0, -r}, {-r, 0, r}, {-r, 0, -r}};
  for (const auto& e : expect) {
    const bool found = std::any_of(fps.begin(), fps.end(), [&](const FixedPoint& f) {
      const auto s = phase_to_spin(f.state());
      return std::abs(s.sx - e[0]) < 1e-12 && std::abs(s.sy - e[1]) < 1e-12 && std::abs(s.sz - e[2]) < 1e-12;
    });
    CHECK(found);
  }
  for (const auto& f : fps) CHECK(f.residual < 1e-10);
}

TEST_CASE("critical surface scan") {
  CHECK(canonical_omega_sq(1.0, 1.0, 1.0) == 0.0);
  const auto one = critical_surface_scan({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].on_surface);

  const AxisRange ax{0.5, 2.0, 41};
  const auto scan = critical_surface_scan({ax, {1, 1, 1}, ax});
  REQUIRE(!scan.zero_set.empty());
  const double diag = std::sqrt(2.0) * (ax.hi - ax.lo) / (ax.n - 1);
  for (const auto& p : scan.zero_set) {
    // distance to the hyperbola αγ = 1 along γ
    double best = 1e9;
    for (int i = 0; i <= 20000; ++i) {
      const double a = 0.5 + 1.5 * i / 20000.0;
      best = std::min(best, std::hypot(p[0] - a, p[2] - 1.0 / a));
    }
    CHECK(best <= diag);
  }
  CHECK(!scan.segments.empty());

  const auto empty = critical_surface_scan({{1.5, 2.0, 11}, {-0.5, 0.5, 11}, {1.5, 2.0, 11}});
  CHECK(empty.zero_set.empty());
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hc/dynamics.hpp"
#include "hc/oscillator.hpp"

using namespace hc;
using Catch::Matchers::WithinAbs;

namespace {

Tolerances tolerances(double rel, double abs) {
  Tolerances t;
  t.rel_tol = rel;
  t.abs_tol = abs;
  return t;
}

// exp(tA) for A = [[b, c], [−a, −b]], using A² = −ω² I.
std::array<double, 2> oscillator_exact(const QuadraticForm& f, double q0, double p0, double t) {
  const double w = std::sqrt(f.omega_sq());
  const double cs = std::cos(w * t), sn = std::sin(w * t) / w;
  return {cs * q0 + sn * (f.b * q0 + f.c * p0), cs * p0 + sn * (-f.a * q0 - f.b * p0)};
}

double oscillator_oracle_error(const QuadraticForm& f, double rel) {
  const double w = std::sqrt(f.omega_sq());
  const double t1 = 10 * kTwoPi / w;
  const auto tr = simulate_oscillator(Schedule<QuadraticForm>::constant(f), 0.7, -0.4, 0.0, t1, 201,
                                      tolerances(rel, rel * 1e-2));
  double err = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto ex = oscillator_exact(f, 0.7, -0.4, tr.times[i]);
    err = std::max({err, std::abs(tr.states[i][0] - ex[0]), std::abs(tr.states[i][1] - ex[1])});
  }
  return err;
}

}  // namespace

TEST_CASE("integrator reproduces exponential decay at output times") {
  auto flow = [](double, const StateVec<1>& y) { return StateVec<1>{-y[0]}; };
  const auto ts = uniform_times(0.0, 5.0, 51);
  const auto tr = integrate(flow, StateVec<1>{1.0}, 0.0, 5.0, ts, Tolerances{});
  REQUIRE(tr.size() == 51);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.times[i] == ts[i]);
    CHECK_THAT(tr.states[i][0], WithinAbs(std::exp(-tr.times[i]), 1e-10));
  }
  CHECK(tr.stats.accepted > 0);
}

TEST_CASE("domain exit becomes a pole error with the last valid state") {
  auto flow = [](double t, const StateVec<1>& y) {
    if (t > 1.0) throw DomainError("outside");
    return StateVec<1>{y[0]};
  };
  try {
    integrate(flow, StateVec<1>{1.0}, 0.0, 2.0, uniform_times(0.0, 2.0, 3), Tolerances{});
    FAIL("expected a pole error");
  } catch (const PoleError& e) {
    CHECK_THAT(e.last_time(), WithinAbs(1.0, 1e-6));
    REQUIRE(e.last_state().size() == 1);
    CHECK_THAT(e.last_state()[0], WithinAbs(std::exp(e.last_time()), 1e-8));
  }
}

TEST_CASE("frozen oscillator against the closed-form solution") {
  const QuadraticForm unit{1.0, 0.0, 1.0};
  const auto tr = simulate_oscillator(Schedule<QuadraticForm>::constant(unit), 1.0, 0.0, 0.0, kTwoPi, 65);
  CHECK_THAT(tr.states.back()[0], WithinAbs(1.0, 1e-8));
  CHECK_THAT(tr.states.back()[1], WithinAbs(0.0, 1e-8));
  CHECK_THAT(tr.diagnostics.at("angle").back() - tr.diagnostics.at("angle").front(), WithinAbs(kTwoPi, 1e-8));

  const QuadraticForm f{2.0, 0.5, 1.0};
  CHECK(oscillator_oracle_error(f, 1e-10) < 1e-8);

  double prev = oscillator_oracle_error(f, 1e-6);
  for (int k = 1; k <= 12; ++k) {
    const double e = oscillator_oracle_error(f, 1e-6 / std::pow(2.0, k));
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("action-angle variables") {
  const auto aa = action_angle(1.0, 0.0, {1.0, 0.0, 1.0});
  CHECK_THAT(aa.angle, WithinAbs(kPi / 2, 1e-15));
  CHECK_THAT(aa.action, WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(action_angle(1.0, 0.0, {1.0, 1.0, 1.0}), UnsupportedRegimeError);
  CHECK_THROWS_AS(action_angle(1.0, 0.0, {-1.0, 0.0, -1.0}), UnsupportedRegimeError);
  CHECK_THROWS_AS(action_angle(0.0, 0.0, {1.0, 0.0, 1.0}), UndefinedAngleError);

  const QuadraticForm f{2.0, 0.5, 1.0};
  const double w = std::sqrt(f.omega_sq());
  const auto tr = simulate_oscillator(Schedule<QuadraticForm>::constant(f), 0.3, 1.1, 0.0, 10 * kTwoPi / w, 641,
                                      tolerances(1e-12, 1e-14));
  const auto& ang = tr.diagnostics.at("angle");
  const auto& act = tr.diagnostics.at("action");
  double angle_res = 0.0, action_drift = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    angle_res = std::max(angle_res, std::abs(ang[i] - ang[0] - w * tr.times[i]));
    action_drift = std::max(action_drift, std::abs(act[i] - act[0]) / act[0]);
  }
  CHECK(angle_res < 1e-8);
  CHECK(action_drift < 1e-10);
}

TEST_CASE("orbit area is 2πE/ω") {
  const QuadraticForm f{2.0, 0.5, 1.0};
  const double w = std::sqrt(f.omega_sq());
  const std::size_t n = 20000;
  const auto tr = simulate_oscillator(Schedule<QuadraticForm>::constant(f), 0.3, 1.1, 0.0, kTwoPi / w, n + 1,
                                      tolerances(1e-12, 1e-14));
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    area += tr.states[i][0] * tr.states[i + 1][1] - tr.states[i + 1][0] * tr.states[i][1];
  area = 0.5 * std::abs(area);
  CHECK_THAT(area, WithinAbs(kTwoPi * f.energy(0.3, 1.1) / w, 1e-6));
}

TEST_CASE("conservation in frozen-parameter runs") {
  const ModelParams m{0.3, -0.1, 0.8, 0.2, 1.2};
  const auto sched = Schedule<ModelParams>::constant(m);
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> up(-0.8, 0.8), ut(-kPi, kPi);
  for (int i = 0; i < 5; ++i) {
    const PhaseState s0{up(gen), ut(gen)};
    const auto phase = simulate_phase(sched, s0, 0.0, 1000.0, 2001, tolerances(1e-13, 1e-15));
    CHECK(conservation_report(phase, "energy").max_rel < 1e-9);
    const auto spin = simulate_spin(sched, phase_to_spin(s0), 0.0, 1000.0, 2001, tolerances(1e-13, 1e-15));
    CHECK(conservation_report(spin, "energy").max_rel < 1e-9);
    const auto loose = simulate_spin(sched, phase_to_spin(s0), 0.0, 1000.0, 2001, tolerances(1e-11, 1e-13));
    CHECK(conservation_report(loose, "norm").max_abs < 1e-9);
  }
  const auto phase = simulate_phase(sched, {0.2, 0.4}, 0.0, 1.0, 3);
  CHECK_THROWS_AS(conservation_report(phase, "norm"), InvalidInputError);
}

TEST_CASE("drift scales with the integrator tolerance") {
  const ModelParams m{0.0, 0.0, 1.0, 0.4, 1.0};
  const auto sched = Schedule<ModelParams>::constant(m);
  double prev_norm = 1.0, prev_energy = 1.0;
  for (double rel : {1e-9, 1e-10, 1e-11, 1e-12}) {
    const auto spin = simulate_spin(sched, phase_to_spin({0.3, 1.0}), 0.0, 1000.0, 1001, tolerances(rel, rel * 1e-2));
    const auto phase = simulate_phase(sched, {0.3, 1.0}, 0.0, 1000.0, 1001, tolerances(rel, rel * 1e-2));
    const double n = conservation_report(spin, "norm").max_abs;
    const double e = conservation_report(phase, "energy").max_rel;
    CHECK(n < prev_norm);
    CHECK(e < prev_energy);
    prev_norm = n;
    prev_energy = e;
  }
}

TEST_CASE("trivial trajectories") {
  Trajectory<3> one;
  one.times = {0.0};
  one.states = {{0.0, 1.0, 0.0}};
  one.diagnostics["norm"] = {1.0};
  const auto r = conservation_report(one, "norm");
  CHECK(r.max_abs == 0.0);
  CHECK(r.rms_abs == 0.0);

  const auto fixed = simulate_spin(Schedule<ModelParams>::constant({0.0, 0.0, 1.0, 1.5, 1.0}), {0.0, 1.0, 0.0}, 0.0,
                                   50.0, 101);
  for (const auto& s : fixed.states) {
    CHECK_THAT(s[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(s[1], WithinAbs(1.0, 1e-12));
    CHECK_THAT(s[2], WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("schedules") {
  const std::vector<QuadraticForm> frames = {{2, 0, 1}, {1.5, 0.3, 1.2}, {1.2, -0.2, 1.4}, {1.8, 0.1, 0.9}};
  const auto s = Schedule<QuadraticForm>::keyframed(frames, 8.0);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto v = s(2.0 * static_cast<double>(k));
    CHECK_THAT(v.a, WithinAbs(frames[k].a, 1e-14));
    CHECK_THAT(v.b, WithinAbs(frames[k].b, 1e-14));
    CHECK_THAT(v.c, WithinAbs(frames[k].c, 1e-14));
  }
  const auto w = s(3.3), w8 = s(11.3);
  CHECK_THAT(w.a, WithinAbs(w8.a, 1e-13));
  CHECK_THROWS_AS(Schedule<QuadraticForm>::keyframed({{1, 0, 1}, {2, 0, 1}}, 1.0), InvalidInputError);

  // A slowly ramped oscillator keeps its action.
  const auto ramp = Schedule<QuadraticForm>::closed_form([](double t) {
    const double u = t / 4000.0;
    return QuadraticForm{1.0 + u, 0.2 * u, 1.0 + 0.5 * u};
  });
  const auto tr = simulate_oscillator(ramp, 1.0, 0.0, 0.0, 4000.0, 4001);
  CHECK(conservation_report(tr, "action").max_rel < 1e-3);
}

TEST_CASE("phase portrait of the easy-axis model") {
  const ModelParams m{0.0, 0.0, 1.0, 1.5, 1.0};
  const auto por = classify_phase_portrait(m, {0.5, -0.1});
  CHECK(por.fixed_points.size() == 6);
  REQUIRE(por.separatrix_energies.size() == 1);
  CHECK_THAT(por.separatrix_energies[0], WithinAbs(0.0, 1e-14));
  CHECK(por.region_count == 4);
  std::size_t separatrices = 0;
  for (const auto& o : por.orbits) {
    REQUIRE(!o.points.empty());
    for (const auto& s : o.points) CHECK_THAT(spin_hamiltonian(s, m), WithinAbs(o.energy, 1e-5));
    separatrices += o.kind == PortraitOrbit::Kind::separatrix ? 1 : 0;
  }
  CHECK(separatrices > 0);

  const auto stable = classify_phase_portrait({0.0, 0.0, 1.0, 0.5, 1.0}, {});
  std::size_t centres_on_axis = 0;
  for (const auto& f : stable.fixed_points)
    if (std::abs(std::abs(f.spin.sy) - 1.0) < 1e-12 && f.point.stability == Stability::center) ++centres_on_axis;
  CHECK(centres_on_axis == 2);
}

TEST_CASE("spin and phase flows agree") {
  const ModelParams m{0.0, 0.0, 1.0, 0.4, 1.0};
  const auto loose = equivalence_check({0.3, 1.0}, m, 0.0, 100.0);
  CHECK(!loose.pole_hit);
  CHECK(loose.max_deviation < 1e-7);
  const auto tight = equivalence_check({0.3, 1.0}, m, 0.0, 100.0, tolerances(1e-12, 1e-14));
  CHECK(tight.max_deviation * 10 <= loose.max_deviation);

  const auto fixed = equivalence_check({0.0, kPi / 2}, m, 0.0, 100.0);
  CHECK(fixed.max_deviation < 1e-10);
}

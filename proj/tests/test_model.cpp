#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hc/model.hpp"
#include "hc/numerics.hpp"

using namespace hc;
using Catch::Matchers::WithinAbs;

namespace {

// Term-by-term energy, written independently of the library.
double energy_oracle(double p, double th, double d, double e, double a, double b, double g) {
  const double r = std::sqrt(1 - p * p);
  double h = e * p;
  h += g / 2 * p * p;
  h += (d + b * p) * r * std::cos(th);
  h += a / 2 * (1 - p * p) * std::pow(std::cos(th), 2);
  return h;
}

ModelParams random_params(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(gen), u(gen), u(gen), u(gen), u(gen)};
}

}  // namespace

TEST_CASE("hamiltonian values") {
  CHECK(hamiltonian_full({0.0, kPi / 2}, {0.0, 0.0, 0.7, -0.3, 2.0}) == Catch::Approx(0.0).margin(1e-16));
  CHECK(hamiltonian_full({0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0}) == 1.0);
  const double h = hamiltonian_full({0.5, 0.0}, {0.1, 0.2, 0.4, 0.3, 1.0});
  CHECK_THAT(h, WithinAbs(0.5915063509461097, 1e-15));
  CHECK_THAT(h, WithinAbs(energy_oracle(0.5, 0.0, 0.1, 0.2, 0.4, 0.3, 1.0), 1e-15));
  CHECK_THROWS_AS(hamiltonian_full({1.2, 0.0}, {}), DomainError);
}

TEST_CASE("equations of motion are the Hamiltonian gradient") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> up(-0.9, 0.9), ut(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_params(gen);
    const PhaseState s{up(gen), ut(gen)};
    const double h = 1e-5;
    const double dh_dp = (hamiltonian_full({s.p + h, s.theta}, m) - hamiltonian_full({s.p - h, s.theta}, m)) / (2 * h);
    const double dh_dt = (hamiltonian_full({s.p, s.theta + h}, m) - hamiltonian_full({s.p, s.theta - h}, m)) / (2 * h);
    const auto r = eom_full(s, m);
    CHECK_THAT(r.p_dot, WithinAbs(-dh_dt, 1e-8));
    CHECK_THAT(r.theta_dot, WithinAbs(dh_dp, 1e-8));
  }
  const auto zero = eom_full({0.0, kPi / 2}, {0.0, 0.0, 1.0, 0.5, 1.0});
  CHECK_THAT(zero.p_dot, WithinAbs(0.0, 1e-16));
  CHECK_THAT(zero.theta_dot, WithinAbs(0.0, 1e-16));
  CHECK_THROWS_AS(eom_full({1.0, 0.0}, {}), DomainError);
}

TEST_CASE("small-imbalance phase velocity") {
  const auto r = eom_full({0.01, 0.0}, {0.2, 0.0, 0.1, 0.0, 0.5});
  // θ̇ = p(γ − Δ − α) + O(p³)
  CHECK_THAT(r.theta_dot, WithinAbs(0.002, 1e-6));
  CHECK(std::abs(r.theta_dot - 0.002) > 0.0);
  CHECK_THAT(r.p_dot, WithinAbs(0.0, 1e-18));
}

TEST_CASE("Josephson form agrees with the full equations") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> up(-0.95, 0.95), ut(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_params(gen);
    const PhaseState s{up(gen), ut(gen)};
    const auto a = eom_full(s, m), b = eom_josephson(s, m);
    CHECK_THAT(a.p_dot, WithinAbs(b.p_dot, 1e-13));
    CHECK_THAT(a.theta_dot, WithinAbs(b.theta_dot, 1e-12));
  }
  const auto f = josephson_fields({0.0, kPi / 2}, {0.0, 0.0, 1.0, 0.5, 1.0});
  CHECK_THAT(f.e_j, WithinAbs(0.0, 1e-16));
  CHECK_THAT(f.e_c, WithinAbs(0.0, 1e-16));
  const auto g = josephson_fields({0.4, 2.0}, {1.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(g.e_j == 1.0);
  CHECK(g.e_c == 0.0);
  const PhaseState s{0.3, 1.0};
  const ModelParams m{0.1, 0.2, 0.4, 0.3, 1.0};
  const auto h = josephson_fields(s, m);
  const double rc = std::sqrt(1 - 0.09) * std::cos(1.0);
  CHECK_THAT(h.e_j, WithinAbs(0.1 + 0.3 * 0.3 + 0.4 * rc, 1e-15));
  CHECK_THAT(h.e_c, WithinAbs(0.2 + 1.0 * 0.3 + 0.3 * rc, 1e-15));
}

TEST_CASE("overlap integrals map to model parameters") {
  TwoModeOverlaps o;
  o.k = 1.0;
  const auto a = params_from_overlaps(o);
  CHECK(a == ModelParams{2.0, 0.0, 0.0, 0.0, 0.0});

  TwoModeOverlaps sym;
  sym.u1 = sym.u2 = 0.7;
  const auto b = params_from_overlaps(sym);
  CHECK(b == ModelParams{0.0, 0.0, 0.0, 0.0, 0.7});

  const TwoModeOverlaps full{1.0, 0.5, 0.2, 0.3, 0.1, 0.05, 0.02, 0.04};
  const auto c = params_from_overlaps(full);
  CHECK_THAT(c.delta, WithinAbs(0.47, 1e-15));
  CHECK_THAT(c.epsilon, WithinAbs(0.6, 1e-15));
  CHECK_THAT(c.alpha, WithinAbs(0.08, 1e-15));
  CHECK_THAT(c.beta, WithinAbs(0.03, 1e-15));
  CHECK_THAT(c.gamma, WithinAbs(0.16, 1e-15));
}

TEST_CASE("spin map") {
  const auto a = phase_to_spin({0.0, kPi / 2});
  CHECK_THAT(a.sx, WithinAbs(0.0, 1e-16));
  CHECK(a.sy == 1.0);
  CHECK(a.sz == 0.0);
  const auto b = phase_to_spin({1.0, 2.3});
  CHECK(b.sx == 0.0);
  CHECK(b.sy == 0.0);
  CHECK(b.sz == 1.0);
  const auto c = phase_to_spin({0.6, 0.0});
  CHECK_THAT(c.sx, WithinAbs(0.8, 1e-15));
  CHECK(c.sz == 0.6);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> up(-0.99, 0.99), ut(-3.1, 3.1);
  for (int i = 0; i < 100; ++i) {
    const PhaseState s{up(gen), ut(gen)};
    const auto back = spin_to_phase(phase_to_spin(s));
    CHECK_THAT(back.p, WithinAbs(s.p, 1e-15));
    CHECK_THAT(back.theta, WithinAbs(s.theta, 1e-12));
    CHECK_THAT(phase_to_spin(s).norm(), WithinAbs(1.0, 1e-15));
  }
  CHECK_THROWS_AS(make_spin(1.0, 1.0, 0.0), InvalidInputError);
  CHECK_THROWS_AS(phase_to_spin({1.5, 0.0}), DomainError);
}

TEST_CASE("spin energy") {
  CHECK_THAT(spin_hamiltonian({0, 1, 0}, {0.0, 0.0, 0.3, 0.4, 0.5}), WithinAbs(0.0, 1e-16));
  CHECK(spin_hamiltonian({1, 0, 0}, {0.0, 0.0, 2.0, 0.0, 0.0}) == 1.0);
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const ModelParams m{1.0, 0.2, 0.5, 0.3, 0.7};
  for (int i = 0; i < 100; ++i) {
    double x = n(gen), y = n(gen), z = n(gen);
    const double r = std::sqrt(x * x + y * y + z * z);
    x /= r, y /= r, z /= r;
    const double oracle = 1.0 * x + 0.2 * z + 0.25 * x * x + 0.3 * x * z + 0.35 * z * z;
    CHECK_THAT(spin_hamiltonian({x, y, z}, m), WithinAbs(oracle, 1e-14));
    // Same energy in both charts.
    const auto ph = spin_to_phase({x, y, z});
    CHECK_THAT(hamiltonian_full(ph, m), WithinAbs(oracle, 1e-13));
  }
}

TEST_CASE("spin precession") {
  const auto z = spin_eom({0, 1, 0}, {0.0, 0.0, 1.0, 1.5, 1.0});
  CHECK(z.dsx == 0.0);
  CHECK(z.dsy == 0.0);
  CHECK(z.dsz == 0.0);
  const auto t = spin_eom({0, 0, 1}, {1.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(t.dsx == 0.0);
  CHECK(t.dsy == -1.0);
  CHECK(t.dsz == 0.0);

  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> up(-0.9, 0.9), ut(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_params(gen);
    const PhaseState ph{up(gen), ut(gen)};
    const auto s = phase_to_spin(ph);
    const auto r = spin_eom(s, m);
    CHECK_THAT(s.sx * r.dsx + s.sy * r.dsy + s.sz * r.dsz, WithinAbs(0.0, 1e-15));
    // Chain rule through the spin map.
    const auto e = eom_full(ph, m);
    const double root = std::sqrt(1 - ph.p * ph.p);
    const double c = std::cos(ph.theta), sn = std::sin(ph.theta);
    const double dsx = -ph.p / root * c * e.p_dot - root * sn * e.theta_dot;
    const double dsy = -ph.p / root * sn * e.p_dot + root * c * e.theta_dot;
    CHECK_THAT(r.dsx, WithinAbs(dsx, 1e-12));
    CHECK_THAT(r.dsy, WithinAbs(dsy, 1e-12));
    CHECK_THAT(r.dsz, WithinAbs(e.p_dot, 1e-12));
  }
}

TEST_CASE("atomic current") {
  CHECK(atomic_current(0.0, 0.3, 0.2, 100.0) == 0.0);
  CHECK_THAT(atomic_current(0.7, 0.25, 0.0, 40.0), WithinAbs(40.0 * 0.25 * std::sin(0.7), 1e-13));
  CHECK_THAT(atomic_current(kPi / 4, 0.2, 0.1, 1000.0),
             WithinAbs(1000.0 * (0.2 * std::sqrt(2.0) / 2 + 0.05), 1e-11));
  CHECK_THROWS_AS(atomic_current(0.1, 0.1, 0.1, -1.0), InvalidInputError);
}

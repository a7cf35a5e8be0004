#pragma once

// Time-dependent parameter schedules, the three flows (p–θ, spin, linearized
// oscillator), conservation monitoring, phase portraits and the spin/p–θ
// cross-check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hc/errors.hpp"
#include "hc/fixed_points.hpp"
#include "hc/minkowski.hpp"
#include "hc/model.hpp"
#include "hc/numerics.hpp"
#include "hc/ode.hpp"
#include "hc/oscillator.hpp"

namespace hc {

// ---------------------------------------------------------------------------
// Schedules

template <class T>
struct ScheduleTraits;

template <>
struct ScheduleTraits<ModelParams> {
  static constexpr std::size_t size = 5;
  static std::array<double, 5> pack(const ModelParams& m) { return m.to_array(); }
  static ModelParams unpack(const std::array<double, 5>& a) { return ModelParams::from_array(a); }
};

template <>
struct ScheduleTraits<QuadraticForm> {
  static constexpr std::size_t size = 3;
  static std::array<double, 3> pack(const QuadraticForm& f) { return f.as_vec(); }
  static QuadraticForm unpack(const std::array<double, 3>& a) { return QuadraticForm::from_vec(a); }
};

/// t ↦ T, either constant, a periodic C² spline through equally spaced
/// keyframes, or an arbitrary closed-form function.
template <class T>
class Schedule {
 public:
  enum class Kind { constant, keyframed, closed_form };

  static Schedule constant(const T& value) {
    Schedule s;
    s.kind_ = Kind::constant;
    s.value_ = value;
    return s;
  }

  /// Keyframe k sits at t = k·period/n; the schedule repeats with `period`.
  static Schedule keyframed(const std::vector<T>& frames, double period) {
    using Tr = ScheduleTraits<T>;
    if (frames.size() < 3) throw InvalidInputError("keyframed schedule needs at least 3 frames");
    Schedule s;
    s.kind_ = Kind::keyframed;
    s.value_ = frames.front();
    s.splines_ = std::make_shared<std::vector<PeriodicCubicSpline>>();
    for (std::size_t c = 0; c < Tr::size; ++c) {
      std::vector<double> ys;
      ys.reserve(frames.size());
      for (const auto& f : frames) ys.push_back(Tr::pack(f)[c]);
      s.splines_->emplace_back(std::move(ys), period);
    }
    return s;
  }

  static Schedule closed_form(std::function<T(double)> fn) {
    if (!fn) throw InvalidInputError("closed-form schedule needs a callable");
    Schedule s;
    s.kind_ = Kind::closed_form;
    s.fn_ = std::move(fn);
    return s;
  }

  T operator()(double t) const {
    switch (kind_) {
      case Kind::constant:
        return value_;
      case Kind::keyframed: {
        using Tr = ScheduleTraits<T>;
        std::array<double, Tr::size> a{};
        for (std::size_t c = 0; c < Tr::size; ++c) a[c] = (*splines_)[c](t);
        return Tr::unpack(a);
      }
      case Kind::closed_form:
        return fn_(t);
    }
    return value_;
  }

  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::constant;
  T value_{};
  std::shared_ptr<std::vector<PeriodicCubicSpline>> splines_;
  std::function<T(double)> fn_;
};

// ---------------------------------------------------------------------------
// Flows

struct PhaseFlow {
  Schedule<ModelParams> schedule;

  StateVec<2> operator()(double t, const StateVec<2>& y) const {
    const auto r = eom_full({y[0], y[1]}, schedule(t));
    return {r.p_dot, r.theta_dot};
  }
};

struct SpinFlow {
  Schedule<ModelParams> schedule;

  StateVec<3> operator()(double t, const StateVec<3>& y) const {
    const auto r = spin_eom({y[0], y[1], y[2]}, schedule(t));
    return {r.dsx, r.dsy, r.dsz};
  }
};

/// Linearized flow q̇ = bq + cp, ṗ = −aq − bp.
struct OscillatorFlow {
  Schedule<QuadraticForm> schedule;

  StateVec<2> operator()(double t, const StateVec<2>& y) const {
    return oscillator_rate(y[0], y[1], schedule(t));
  }
};

// ---------------------------------------------------------------------------
// Simulations with diagnostics

/// p–θ run sampled at `samples` uniform times; diagnostic "energy".
inline Trajectory<2> simulate_phase(const Schedule<ModelParams>& sched, const PhaseState& s0,
                                    double t0, double t1, std::size_t samples,
                                    const Tolerances& tol = {}) {
  const auto ts = uniform_times(t0, t1, samples);
  Trajectory<2> out;
  PhaseFlow flow{sched};
  auto fill = [&] {
    auto& e = out.diagnostics["energy"];
    e.clear();
    for (std::size_t i = 0; i < out.size(); ++i)
      e.push_back(hamiltonian_full({out.states[i][0], out.states[i][1]}, sched(out.times[i])));
  };
  try {
    integrate_into(flow, StateVec<2>{s0.p, s0.theta}, t0, t1, ts, tol, out);
  } catch (const IntegrationFailure&) {
    fill();
    throw;
  }
  fill();
  return out;
}

/// Spin run; diagnostics "energy" and "norm". No renormalization is applied.
inline Trajectory<3> simulate_spin(const Schedule<ModelParams>& sched, const SpinState& s0,
                                   double t0, double t1, std::size_t samples,
                                   const Tolerances& tol = {}) {
  const auto ts = uniform_times(t0, t1, samples);
  Trajectory<3> out = integrate(SpinFlow{sched}, StateVec<3>{s0.sx, s0.sy, s0.sz}, t0, t1, ts, tol);
  auto& e = out.diagnostics["energy"];
  auto& n = out.diagnostics["norm"];
  for (std::size_t i = 0; i < out.size(); ++i) {
    const SpinState s{out.states[i][0], out.states[i][1], out.states[i][2]};
    e.push_back(spin_hamiltonian(s, sched(out.times[i])));
    n.push_back(s.norm());
  }
  return out;
}

/// Oscillator run; diagnostics "energy", "action" and the unwrapped "angle".
/// Unwrapping assumes consecutive samples are less than half a period apart.
inline Trajectory<2> simulate_oscillator(const Schedule<QuadraticForm>& sched, double q0, double p0,
                                         double t0, double t1, std::size_t samples,
                                         const Tolerances& tol = {}) {
  const auto ts = uniform_times(t0, t1, samples);
  Trajectory<2> out = integrate(OscillatorFlow{sched}, StateVec<2>{q0, p0}, t0, t1, ts, tol);
  auto& e = out.diagnostics["energy"];
  auto& act = out.diagnostics["action"];
  auto& ang = out.diagnostics["angle"];
  double prev = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto f = sched(out.times[i]);
    const auto aa = action_angle(out.states[i][0], out.states[i][1], f);
    e.push_back(f.energy(out.states[i][0], out.states[i][1]));
    act.push_back(aa.action);
    ang.push_back(i == 0 ? aa.angle : prev + wrap_pi(aa.angle - prev));
    prev = ang.back();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conservation

struct DriftReport {
  double initial = 0.0;
  double max_abs = 0.0;
  double rms_abs = 0.0;
  double max_rel = 0.0;  ///< max_abs / |initial| (equal to max_abs when initial = 0)
  double rms_rel = 0.0;
};

/// Drift of the named diagnostic relative to its first sample.
template <std::size_t N>
DriftReport conservation_report(const Trajectory<N>& traj, const std::string& kind) {
  const auto it = traj.diagnostics.find(kind);
  if (it == traj.diagnostics.end())
    throw InvalidInputError("conservation_report: trajectory has no '" + kind + "' diagnostic");
  const auto& v = it->second;
  DriftReport r;
  if (v.empty()) return r;
  r.initial = v.front();
  double sq = 0.0;
  for (double x : v) {
    const double d = std::abs(x - r.initial);
    r.max_abs = std::max(r.max_abs, d);
    sq += d * d;
  }
  r.rms_abs = std::sqrt(sq / static_cast<double>(v.size()));
  const double scale = r.initial != 0.0 ? std::abs(r.initial) : 1.0;
  r.max_rel = r.max_abs / scale;
  r.rms_rel = r.rms_abs / scale;
  return r;
}

// ---------------------------------------------------------------------------
// Phase portraits on the sphere

struct PortraitFixedPoint {
  FixedPoint point;
  SpinState spin;
  double energy = 0.0;
};

struct PortraitOrbit {
  enum class Kind { level, separatrix };
  Kind kind = Kind::level;
  double energy = 0.0;
  std::size_t around = 0;  ///< index of the centre (level) or saddle (separatrix)
  std::vector<double> times;
  std::vector<SpinState> points;
};

struct PhasePortrait {
  std::vector<PortraitFixedPoint> fixed_points;
  std::vector<double> separatrix_energies;
  std::size_t region_count = 0;
  std::vector<PortraitOrbit> orbits;
};

struct PortraitOptions {
  std::size_t grid_z = 200;    ///< cells in cos(colatitude)
  std::size_t grid_phi = 400;  ///< cells in azimuth
  double separatrix_offset = 1e-6;
  double separatrix_time = 40.0;
  double max_orbit_time = 200.0;
  std::size_t orbit_samples = 400;
  Tolerances tol{};
};

namespace detail {

inline Vec3 as_vec(const SpinState& s) { return {s.sx, s.sy, s.sz}; }
inline SpinState as_spin(const Vec3& v) { return {v[0], v[1], v[2]}; }

/// Counts connected components of the sphere minus the cells crossed by any
/// of the given level sets. Grid rows are uniform in z = cos(colatitude),
/// columns in φ (periodic); all cells touching a pole are mutually adjacent.
inline std::size_t count_regions(const ModelParams& m, const std::vector<double>& levels,
                                 std::size_t nz, std::size_t nphi) {
  if (levels.empty()) return 1;
  std::vector<double> h((nz + 1) * nphi);
  for (std::size_t i = 0; i <= nz; ++i) {
    const double z = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(nz);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(nphi);
      h[i * nphi + j] = spin_hamiltonian({rho * std::cos(phi), rho * std::sin(phi), z}, m);
    }
  }
  std::vector<char> blocked(nz * nphi, 0);
  for (std::size_t i = 0; i < nz; ++i) {
    for (std::size_t j = 0; j < nphi; ++j) {
      const std::size_t jn = (j + 1) % nphi;
      const double c[4] = {h[i * nphi + j], h[i * nphi + jn], h[(i + 1) * nphi + j],
                           h[(i + 1) * nphi + jn]};
      for (double e : levels) {
        const double lo = std::min({c[0], c[1], c[2], c[3]}) - e;
        const double hi = std::max({c[0], c[1], c[2], c[3]}) - e;
        if (lo <= 0.0 && hi >= 0.0) blocked[i * nphi + j] = 1;
      }
    }
  }
  std::vector<int> label(nz * nphi, -1);
  std::size_t regions = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < label.size(); ++start) {
    if (blocked[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(regions++);
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cell = stack.back();
      stack.pop_back();
      const std::size_t i = cell / nphi, j = cell % nphi;
      auto visit = [&](std::size_t ii, std::size_t jj) {
        const std::size_t k = ii * nphi + jj;
        if (!blocked[k] && label[k] < 0) {
          label[k] = id;
          stack.push_back(k);
        }
      };
      visit(i, (j + 1) % nphi);
      visit(i, (j + nphi - 1) % nphi);
      if (i + 1 < nz) visit(i + 1, j);
      if (i > 0) visit(i - 1, j);
      if (i == 0 || i + 1 == nz)
        for (std::size_t jj = 0; jj < nphi; ++jj) visit(i, jj);
    }
  }
  return regions;
}

/// Closed orbit of the spin flow around a centre, started where the energy
/// first reaches `level` on a geodesic leaving the centre. Returns nothing if
/// the level is not reached within a quarter turn of the sphere.
inline std::optional<PortraitOrbit> orbit_around(const ModelParams& m, const Vec3& centre,
                                                 std::size_t index, double level,
                                                 const PortraitOptions& opt) {
  Vec3 ref = std::abs(centre[2]) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  Vec3 e1 = cross(ref, centre);
  const double n1 = std::sqrt(dot(e1, e1));
  e1 = (1.0 / n1) * e1;
  const Vec3 e2 = cross(centre, e1);
  auto along = [&](double ang) { return std::cos(ang) * centre + std::sin(ang) * e1; };
  auto g = [&](double ang) { return spin_hamiltonian(as_spin(along(ang)), m) - level; };
  const double g0 = g(0.0);
  if (g0 == 0.0) return std::nullopt;
  constexpr int kSteps = 400;
  double lo = 0.0, hi = -1.0;
  for (int k = 1; k <= kSteps; ++k) {
    const double ang = 0.5 * kPi * k / kSteps;
    if ((g(ang) < 0) != (g0 < 0)) {
      lo = 0.5 * kPi * (k - 1) / kSteps;
      hi = ang;
      break;
    }
  }
  if (hi < 0) return std::nullopt;
  const Vec3 start = along(bisect(g, lo, hi, 1e-14));

  PortraitOrbit orbit;
  orbit.kind = PortraitOrbit::Kind::level;
  orbit.energy = level;
  orbit.around = index;
  const auto sched = Schedule<ModelParams>::constant(m);
  Trajectory<3> traj;
  const double dt = opt.max_orbit_time / static_cast<double>(opt.orbit_samples * 20);
  auto angle_of = [&](const StateVec<3>& y) {
    const Vec3 v{y[0], y[1], y[2]};
    return std::atan2(dot(v, e2), dot(v, e1));
  };
  StateVec<3> y{start[0], start[1], start[2]};
  double t = 0.0, swept = 0.0, prev = angle_of(y);
  orbit.times.push_back(0.0);
  orbit.points.push_back(as_spin(start));
  // Step with a fine fixed output spacing until the azimuth about the centre
  // has swept a full turn.
  while (t < opt.max_orbit_time && std::abs(swept) < kTwoPi) {
    const std::array<double, 1> out_t{t + dt};
    Trajectory<3> step;
    integrate_into(SpinFlow{sched}, y, t, t + dt, out_t, opt.tol, step);
    y = step.states.back();
    t += dt;
    const double a = angle_of(y);
    swept += wrap_pi(a - prev);
    prev = a;
    orbit.times.push_back(t);
    orbit.points.push_back(as_spin(Vec3{y[0], y[1], y[2]}));
  }
  return orbit;
}

}  // namespace detail

/// Fixed points of the spin flow, separatrix energies (the saddle energies),
/// the number of regions bounded by the separatrices, one closed orbit per
/// (energy level, centre) pair where the level is reachable, and two orbits
/// leaving each saddle along its unstable direction.
inline PhasePortrait classify_phase_portrait(const ModelParams& m,
                                             const std::vector<double>& energy_levels,
                                             const PortraitOptions& opt = {}) {
  PhasePortrait out;
  for (const auto& fp : all_fixed_points(m)) {
    if (fp.residual >= kFixedPointResidualTol) continue;
    PortraitFixedPoint pf{fp, phase_to_spin(fp.state()), 0.0};
    pf.energy = spin_hamiltonian(pf.spin, m);
    out.fixed_points.push_back(pf);
  }
  if (out.fixed_points.empty()) return out;

  for (const auto& pf : out.fixed_points) {
    if (pf.point.stability != Stability::saddle) continue;
    const bool seen = std::any_of(out.separatrix_energies.begin(), out.separatrix_energies.end(),
                                  [&](double e) { return std::abs(e - pf.energy) <= 1e-12; });
    if (!seen) out.separatrix_energies.push_back(pf.energy);
  }
  std::sort(out.separatrix_energies.begin(), out.separatrix_energies.end());
  out.region_count = detail::count_regions(m, out.separatrix_energies, opt.grid_z, opt.grid_phi);

  // Independent orbit jobs, filled in parallel and concatenated in job order.
  struct Job {
    bool separatrix;
    std::size_t fp;
    double level;
    int sign;
  };
  std::vector<Job> jobs;
  for (double e : energy_levels)
    for (std::size_t k = 0; k < out.fixed_points.size(); ++k)
      if (out.fixed_points[k].point.stability == Stability::center) jobs.push_back({false, k, e, 0});
  for (std::size_t k = 0; k < out.fixed_points.size(); ++k)
    if (out.fixed_points[k].point.stability == Stability::saddle)
      for (int sign : {+1, -1}) jobs.push_back({true, k, out.fixed_points[k].energy, sign});

  std::vector<std::optional<PortraitOrbit>> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& pf = out.fixed_points[job.fp];
    if (!job.separatrix) {
      results[j] = detail::orbit_around(m, detail::as_vec(pf.spin), job.fp, job.level, opt);
      return;
    }
    // Unstable eigenvector of [[b, c], [−a, −b]] in (θ, p).
    const auto hs = hessian(pf.point.state(), m);
    const double lam = std::sqrt(hs.b * hs.b - hs.a * hs.c);
    double vq = hs.c, vp = lam - hs.b;
    if (std::hypot(vq, vp) < 1e-14) {
      vq = lam + hs.b;
      vp = -hs.a;
    }
    const double nv = std::hypot(vq, vp);
    const double d = job.sign * opt.separatrix_offset / nv;
    const PhaseState s0{pf.point.p_bar + d * vp, pf.point.theta_bar + d * vq};
    PortraitOrbit orbit;
    orbit.kind = PortraitOrbit::Kind::separatrix;
    orbit.energy = job.level;
    orbit.around = job.fp;
    const auto traj = simulate_spin(Schedule<ModelParams>::constant(m), phase_to_spin(s0), 0.0,
                                    opt.separatrix_time, opt.orbit_samples, opt.tol);
    orbit.times = traj.times;
    for (const auto& y : traj.states) orbit.points.push_back({y[0], y[1], y[2]});
    results[j] = std::move(orbit);
  });
  for (auto& r : results)
    if (r) out.orbits.push_back(std::move(*r));
  return out;
}

// ---------------------------------------------------------------------------
// Spin / p–θ equivalence

struct EquivalenceResult {
  double max_deviation = 0.0;
  double t_reached = 0.0;
  bool pole_hit = false;
  std::size_t samples = 0;
};

/// Integrates the p–θ flow and the spin flow from matched initial conditions
/// and returns max_t ‖phase_to_spin(p, θ) − S‖. If the p–θ run stops at a
/// pole, the comparison covers the part computed before it.
inline EquivalenceResult equivalence_check(const PhaseState& s0, const ModelParams& m, double t0,
                                           double t1, const Tolerances& tol = {},
                                           std::size_t samples = 2001) {
  const auto ts = uniform_times(t0, t1, samples);
  const auto sched = Schedule<ModelParams>::constant(m);
  EquivalenceResult r;
  Trajectory<2> phase;
  try {
    integrate_into(PhaseFlow{sched}, StateVec<2>{s0.p, s0.theta}, t0, t1, ts, tol, phase);
  } catch (const PoleError&) {
    r.pole_hit = true;
  }
  const auto s_init = phase_to_spin(s0);
  const auto spin =
      integrate(SpinFlow{sched}, StateVec<3>{s_init.sx, s_init.sy, s_init.sz}, t0, t1, ts, tol);
  r.samples = phase.size();
  for (std::size_t i = 0; i < phase.size(); ++i) {
    const auto a = phase_to_spin({phase.states[i][0], phase.states[i][1]});
    const Vec3 d{a.sx - spin.states[i][0], a.sy - spin.states[i][1], a.sz - spin.states[i][2]};
    r.max_deviation = std::max(r.max_deviation, std::sqrt(dot(d, d)));
    r.t_reached = phase.times[i];
  }
  return r;
}

}  // namespace hc

#pragma once

// Subcommand implementations. Each returns a report plus optional CSV
// tables; the driver in app.hpp handles parsing, output and exit codes.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hc/cli/output.hpp"
#include "hc/desitter.hpp"
#include "hc/dynamics.hpp"
#include "hc/fixed_points.hpp"
#include "hc/gp_ingest.hpp"
#include "hc/hannay.hpp"
#include "hc/model.hpp"

namespace hc::cli {

struct Report {
  std::string subcommand;
  std::uint64_t seed = 0;
  Json inputs = Json::object();
  Json results = Json::object();
  Json criteria = Json::object();
  Json tolerances;

  void criterion(const std::string& name, double value, double tolerance, bool pass) {
    criteria[name] = {{"value", value}, {"tolerance", tolerance}, {"pass", pass}};
  }
  /// value ≤ tolerance
  void bound(const std::string& name, double value, double tolerance) {
    criterion(name, value, tolerance, value <= tolerance);
  }
  bool passed() const {
    for (const auto& [k, v] : criteria.items())
      if (!v.at("pass").get<bool>()) return false;
    return true;
  }
  Json to_json() const {
    Json j = {{"subcommand", subcommand}, {"seed", seed},         {"inputs", inputs},
              {"results", results},       {"criteria", criteria}, {"pass", passed()}};
    if (!tolerances.is_null()) j["tolerances"] = tolerances;
    return j;
  }
};

struct CommandOutput {
  Report report;
  std::vector<std::pair<std::string, CsvTable>> tables;
};

struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-12;

  Json to_json() const { return {{"rtol", rtol}, {"atol", atol}}; }

  Tolerances integrator() const {
    Tolerances t;
    t.rel_tol = rtol;
    t.abs_tol = atol;
    return t;
  }
};

inline Json params_json(const ModelParams& m) {
  return {{"delta", m.delta}, {"epsilon", m.epsilon}, {"alpha", m.alpha}, {"beta", m.beta}, {"gamma", m.gamma}};
}

/// Deterministic uniform variates in [lo, hi) from a 64-bit Mersenne twister.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 gen_;
};

inline Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw InvalidInputError("malformed JSON in " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// hannay

/// {"kind":"cap","psi0":…,"scale":…} | {"kind":"keyframes","points":[[a,b,c],…]}
/// | {"kind":"fourier","coeffs":{"a":{"mean":…,"cos":[…],"sin":[…]},"b":…,"c":…}};
/// optional "orientation" (±1) and "omega_min".
inline ParameterLoop loop_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const double omega_min = j.value("omega_min", 0.05);
    std::optional<ParameterLoop> loop;
    if (kind == "cap") {
      loop = ParameterLoop::cap(j.at("psi0").get<double>(), j.value("scale", 1.0), omega_min);
    } else if (kind == "keyframes") {
      std::vector<QuadraticForm> pts;
      for (const auto& p : j.at("points")) {
        if (p.size() != 3) throw InvalidInputError("keyframe points must be [a, b, c]");
        pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      }
      loop = ParameterLoop::keyframes(pts, omega_min);
    } else if (kind == "fourier") {
      std::array<FourierSeries, 3> abc;
      const char* names[3] = {"a", "b", "c"};
      for (int c = 0; c < 3; ++c) {
        const auto& s = j.at("coeffs").at(names[c]);
        abc[c].mean = s.value("mean", 0.0);
        abc[c].cos_terms = s.value("cos", std::vector<double>{});
        abc[c].sin_terms = s.value("sin", std::vector<double>{});
      }
      loop = ParameterLoop::fourier(abc, omega_min);
    } else {
      throw InvalidInputError("unknown loop kind '" + kind + "'");
    }
    const int orientation = j.value("orientation", 1);
    if (orientation != 1 && orientation != -1) throw InvalidInputError("orientation must be +1 or -1");
    return orientation < 0 ? loop->reversed() : *loop;
  } catch (const Json::exception& e) {
    throw InvalidInputError(std::string("invalid loop specification: ") + e.what());
  }
}

struct HannayConfig {
  std::string loop = "cap";
  std::string loop_file;
  double psi0 = 1.0;
  double scale = 1.0;
  int orientation = 1;
  double omega_min = 0.05;
  double loop_time = 2000.0;
  double q0 = 1.0;
  double p0 = 0.0;
  std::size_t samples_per_period = 64;
  Tolerance tol{1e-12, 1e-14};
  double ode_rel_tol = 0.02;  ///< |ode − area| ≤ max(ode_rel_tol·|area|, zero_tol)
  double geom_tol = 1e-6;     ///< |form − area|
  double zero_tol = 1e-8;
  std::vector<double> study;  ///< loop times for a convergence study
  double min_slope = 0.8;
};

inline CommandOutput cmd_hannay(const HannayConfig& cfg) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "hannay";
  Json loop_spec;
  if (!cfg.loop_file.empty()) {
    loop_spec = read_json_file(cfg.loop_file);
  } else if (cfg.loop == "cap") {
    loop_spec = {{"kind", "cap"}, {"psi0", cfg.psi0}, {"scale", cfg.scale}};
  } else {
    throw InvalidInputError("--loop " + cfg.loop + " needs --loop-file with the loop points or coefficients");
  }
  if (!loop_spec.contains("orientation")) loop_spec["orientation"] = cfg.orientation;
  if (!loop_spec.contains("omega_min")) loop_spec["omega_min"] = cfg.omega_min;
  const ParameterLoop loop = loop_from_json(loop_spec);
  rep.tolerances = cfg.tol.to_json();
  rep.inputs = {{"loop", loop_spec},
                {"loop_time", cfg.loop_time},
                {"state0", {cfg.q0, cfg.p0}},
                {"samples_per_period", cfg.samples_per_period},
                {"rtol", cfg.tol.rtol},
                {"atol", cfg.tol.atol}};

  HannayOptions opt;
  opt.tol = cfg.tol.integrator();
  opt.samples_per_period = cfg.samples_per_period;
  const auto r = adiabatic_run(loop, cfg.loop_time, cfg.q0, cfg.p0, opt);
  const auto area = hannay_area_breakdown(loop);
  rep.results = {{"theta_total", r.theta_total},
                 {"dynamical_phase", r.dynamical_phase},
                 {"hannay_ode", r.hannay_ode},
                 {"hannay_form", r.hannay_form},
                 {"hannay_area", r.hannay_area},
                 {"winding_number", area.winding},
                 {"action_drift", r.action_drift},
                 {"action_drift_max", r.action_drift_max},
                 {"loop_time", r.loop_time},
                 {"discrepancies", r.discrepancies},
                 {"integrator", {{"accepted", r.trajectory.stats.accepted},
                                 {"rejected", r.trajectory.stats.rejected},
                                 {"evaluations", r.trajectory.stats.evaluations}}}};
  const double ode_tol = std::max(cfg.ode_rel_tol * std::abs(r.hannay_area), cfg.zero_tol);
  rep.bound("ode_vs_area", r.discrepancies.at("ode_vs_area"), ode_tol);
  rep.bound("form_vs_area", r.discrepancies.at("form_vs_area"), cfg.geom_tol);

  CsvTable traj;
  traj.header = {"t", "q", "p", "energy", "action", "angle"};
  const auto& tr = r.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i)
    traj.add_row({tr.times[i], tr.states[i][0], tr.states[i][1], tr.diagnostics.at("energy")[i],
                  tr.diagnostics.at("action")[i], tr.diagnostics.at("angle")[i]});
  out.tables.emplace_back("hannay_trajectory.csv", std::move(traj));

  if (!cfg.study.empty()) {
    const auto st = convergence_study(loop, cfg.study, cfg.q0, cfg.p0, opt);
    Json rows = Json::array();
    CsvTable tab;
    tab.header = {"loop_time", "inv_loop_time", "hannay_ode", "error", "action_drift", "action_drift_max"};
    for (const auto& row : st.rows) {
      rows.push_back({{"loop_time", row.loop_time},
                      {"hannay_ode", row.hannay_ode},
                      {"error", row.error},
                      {"action_drift", row.action_drift},
                      {"action_drift_max", row.action_drift_max}});
      tab.add_row({row.loop_time, 1.0 / row.loop_time, row.hannay_ode, row.error, row.action_drift,
                   row.action_drift_max});
    }
    rep.results["convergence"] = {{"rows", rows},
                                  {"slope", st.slope},
                                  {"error_monotone", st.error_monotone},
                                  {"drift_monotone", st.drift_monotone}};
    rep.criterion("convergence_slope", st.slope, cfg.min_slope, st.slope >= cfg.min_slope);
    rep.criterion("convergence_error_monotone", st.error_monotone ? 1.0 : 0.0, 1.0, st.error_monotone);
    out.tables.emplace_back("hannay_convergence.csv", std::move(tab));
  }
  return out;
}

// ---------------------------------------------------------------------------
// geometry verify

struct GeometryConfig {
  std::size_t points = 1000;
  std::size_t curvature_points = 50;
  bool inject_fault = false;  ///< scales W by 1.01 (mutation check)
};

inline CommandOutput cmd_geometry_verify(const GeometryConfig& cfg, std::uint64_t seed) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "geometry verify";
  rep.seed = seed;
  rep.inputs = {{"points", cfg.points}, {"curvature_points", cfg.curvature_points},
                {"inject_fault", cfg.inject_fault}};
  if (cfg.points == 0) throw InvalidInputError("--points must be positive");
  Sampler rng(seed);
  const double fault = cfg.inject_fault ? 1.01 : 1.0;

  auto random_cone_point = [&] {
    const auto hp = HyperboloidPoint{rng.uniform(0.0, 2.0), rng.uniform(0.0, kTwoPi)};
    return hyperboloid_to_minkowski(hp, rng.uniform(0.5, 2.0));
  };

  double embed_res = 0.0, chart_res = 0.0, conformal_rt = 0.0, conformal_metric = 0.0;
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const double t = rng.uniform(-1.5, 1.5);
    const HyperboloidPoint hp{rng.uniform(0.0, 1.5), rng.uniform(0.0, kTwoPi)};
    const auto ep = embed(t, hp);
    const auto a = ep.as_array();
    double mag = 0.0;
    for (double v : a) mag += v * v;
    embed_res = std::max(embed_res, std::abs(ep.constraint_residual()) / mag);
    const auto back = conformal_to_embedding(conformal_chart(ep));
    const auto b = back.as_array();
    chart_res = std::max(chart_res, std::abs(back.constraint_residual()) / mag);
    for (int k = 0; k < 4; ++k) conformal_rt = std::max(conformal_rt, std::abs(a[k] - b[k]) / std::sqrt(mag));
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(cfg.points, 100); ++i)
    conformal_metric = std::max(conformal_metric, conformal_metric_residual({rng.uniform(-1.2, 1.2),
                                                                             rng.uniform(0.2, 2.9),
                                                                             rng.uniform(0.0, kTwoPi)}));

  double flrw_res = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(cfg.points, 100); ++i) {
    const double t = rng.uniform(0.2, 1.5), psi = rng.uniform(0.2, 1.5), phi = rng.uniform(0.0, kTwoPi);
    const auto gi = flrw_induced_metric(t, psi, phi).g, g = flrw_metric(t, psi).g;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) flrw_res = std::max(flrw_res, std::abs(gi[a][b] - g[a][b]));
  }

  double scalar_res = 0.0, ricci_res = 0.0, riemann_res = 0.0;
  for (std::size_t i = 0; i < cfg.curvature_points; ++i) {
    const double sign = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const auto c = curvature_checks(sign * rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0));
    scalar_res = std::max(scalar_res, c.scalar_residual);
    ricci_res = std::max(ricci_res, c.ricci_residual);
    riemann_res = std::max(riemann_res, c.riemann_residual);
  }

  double cartan1 = 0.0, cartan2 = 0.0, chart_pull = 0.0;
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const HyperboloidPoint hp{rng.uniform(0.0, 2.5), rng.uniform(0.0, kTwoPi)};
    const auto f = hyperboloid_forms(hp, rng.uniform(0.5, 2.0));
    cartan1 = std::max(cartan1, f.cartan_first_residual);
    cartan2 = std::max(cartan2, f.cartan_second_residual);
    chart_pull = std::max(chart_pull, std::abs(pullback_to_hyperboloid(curvature_form_minkowski(
                                                   hyperboloid_to_minkowski(hp)), hp) - std::sinh(hp.psi)));
  }

  double half_curv = 0.0, boost_inv = 0.0, scale_inv = 0.0, interval_res = 0.0;
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const auto pt = random_cone_point();
    const auto w = angle_two_form_minkowski(pt);
    const auto r = curvature_form_minkowski(pt);
    for (int k = 0; k < 3; ++k) half_curv = std::max(half_curv, std::abs(fault * w.w[k] - 0.5 * r.w[k]));

    const Mat3 boost = boost_matrix(rng.uniform(-2.0, 2.0), rng.uniform(0.0, kTwoPi));
    const auto moved = MinkowskiPoint::from_vec(hc::apply(boost, pt.as_vec()));
    const auto pulled = pullback_linear(curvature_form_minkowski(moved), boost);
    for (int k = 0; k < 3; ++k) boost_inv = std::max(boost_inv, std::abs(pulled.w[k] - r.w[k]));
    interval_res = std::max(interval_res, std::abs(moved.interval() - pt.interval()) / (pt.t_coord * pt.t_coord));

    const double lam = rng.uniform(0.2, 5.0);
    const Mat3 scale = {{{lam, 0, 0}, {0, lam, 0}, {0, 0, lam}}};
    const auto scaled = pullback_linear(angle_two_form_minkowski(scale_map(pt, lam)), scale);
    for (int k = 0; k < 3; ++k) scale_inv = std::max(scale_inv, std::abs(scaled.w[k] - w.w[k]));
  }

  rep.bound("embedding_constraint", embed_res, 1e-14);
  rep.bound("chart_constraint", chart_res, 1e-12);
  rep.bound("conformal_roundtrip", conformal_rt, 1e-12);
  rep.bound("conformal_metric", conformal_metric, 1e-8);
  rep.bound("flrw_pullback", flrw_res, 1e-10);
  rep.bound("scalar_curvature", scalar_res, 1e-5);
  rep.bound("ricci_einstein", ricci_res, 1e-5);
  rep.bound("riemann_maximal_symmetry", riemann_res, 1e-4);
  rep.bound("cartan_first", cartan1, 1e-10);
  rep.bound("cartan_second", cartan2, 1e-10);
  rep.bound("curvature_chart_pullback", chart_pull, 1e-10);
  rep.bound("angle_form_half_curvature", half_curv, 1e-12);
  rep.bound("boost_form_invariance", boost_inv, 1e-10);
  rep.bound("boost_interval", interval_res, 1e-12);
  rep.bound("scale_invariance", scale_inv, 1e-12);
  Json res = Json::object();
  for (const auto& [k, v] : rep.criteria.items())
    res[k] = {{"max_residual", v.at("value")}, {"tolerance", v.at("tolerance")}, {"pass", v.at("pass")}};
  rep.results = res;
  return out;
}

// ---------------------------------------------------------------------------
// fixed-points, portrait, spin

inline Json fixed_point_json(const FixedPoint& fp, const ModelParams& m) {
  const auto s = phase_to_spin(fp.state());
  return {{"p_bar", fp.p_bar},
          {"theta_bar", fp.theta_bar},
          {"kind", to_string(fp.kind)},
          {"stability", to_string(fp.stability)},
          {"omega_or_lyapunov", fp.omega_or_lyapunov},
          {"residual", fp.residual},
          {"energy", spin_hamiltonian(s, m)},
          {"spin", {s.sx, s.sy, s.sz}}};
}

inline CommandOutput cmd_fixed_points(const ModelParams& m) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "fixed-points";
  rep.inputs = {{"params", params_json(m)}};
  const auto fps = all_fixed_points(m);
  Json list = Json::array();
  double worst = 0.0;
  CsvTable tab;
  tab.header = {"p_bar", "theta_bar", "kind", "stability", "omega_or_lyapunov", "residual"};
  for (const auto& fp : fps) {
    list.push_back(fixed_point_json(fp, m));
    worst = std::max(worst, fp.residual);
    tab.add_row({format_double(fp.p_bar), format_double(fp.theta_bar), to_string(fp.kind),
                 to_string(fp.stability), format_double(fp.omega_or_lyapunov), format_double(fp.residual)});
  }
  rep.results = {{"fixed_points", list}, {"count", fps.size()}};
  rep.bound("max_residual", worst, kFixedPointResidualTol);
  out.tables.emplace_back("fixed_points.csv", std::move(tab));
  return out;
}

inline CommandOutput cmd_portrait(const ModelParams& m, const std::vector<double>& levels, const Tolerance& tol) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "portrait";
  rep.inputs = {{"params", params_json(m)}, {"levels", levels}, {"rtol", tol.rtol}, {"atol", tol.atol}};
  rep.tolerances = tol.to_json();
  PortraitOptions opt;
  opt.tol = tol.integrator();
  const auto por = classify_phase_portrait(m, levels, opt);
  Json fps = Json::array();
  for (const auto& pf : por.fixed_points) fps.push_back(fixed_point_json(pf.point, m));
  rep.results = {{"fixed_points", fps},
                 {"separatrix_energies", por.separatrix_energies},
                 {"region_count", por.region_count},
                 {"orbit_count", por.orbits.size()}};
  CsvTable tab;
  tab.header = {"orbit", "kind", "energy", "t", "sx", "sy", "sz", "p", "theta"};
  for (std::size_t k = 0; k < por.orbits.size(); ++k) {
    const auto& o = por.orbits[k];
    const char* kind = o.kind == PortraitOrbit::Kind::separatrix ? "separatrix" : "level";
    for (std::size_t i = 0; i < o.points.size(); ++i) {
      const auto& s = o.points[i];
      const auto ph = spin_to_phase(s);
      tab.add_row({std::to_string(k), kind, format_double(o.energy), format_double(o.times[i]),
                   format_double(s.sx), format_double(s.sy), format_double(s.sz), format_double(ph.p),
                   format_double(ph.theta)});
    }
  }
  out.tables.emplace_back("portrait_orbits.csv", std::move(tab));
  return out;
}

struct SpinConfig {
  std::optional<std::array<double, 3>> spin;
  double p = 0.3;
  double theta = 1.0;
  double t1 = 100.0;
  std::size_t samples = 1001;
  Tolerance tol;
};

inline CommandOutput cmd_spin(const ModelParams& m, const SpinConfig& cfg) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "spin";
  const SpinState s0 = cfg.spin ? make_spin((*cfg.spin)[0], (*cfg.spin)[1], (*cfg.spin)[2])
                                : phase_to_spin({cfg.p, cfg.theta});
  rep.inputs = {{"params", params_json(m)}, {"spin0", {s0.sx, s0.sy, s0.sz}}, {"t1", cfg.t1},
                {"samples", cfg.samples}, {"rtol", cfg.tol.rtol}, {"atol", cfg.tol.atol}};
  rep.tolerances = cfg.tol.to_json();
  if (!(cfg.t1 > 0.0)) throw InvalidInputError("--t1 must be positive");
  const auto tr = simulate_spin(Schedule<ModelParams>::constant(m), s0, 0.0, cfg.t1, cfg.samples,
                                cfg.tol.integrator());
  const auto norm = conservation_report(tr, "norm");
  const auto energy = conservation_report(tr, "energy");
  rep.results = {{"norm_drift_max", norm.max_abs}, {"norm_drift_rms", norm.rms_abs},
                 {"energy_drift_max", energy.max_abs}, {"energy_drift_rms", energy.rms_abs},
                 {"final", {tr.states.back()[0], tr.states.back()[1], tr.states.back()[2]}},
                 {"steps", tr.stats.accepted}, {"rejected", tr.stats.rejected}};
  CsvTable tab;
  tab.header = {"t", "sx", "sy", "sz", "energy", "norm"};
  for (std::size_t i = 0; i < tr.size(); ++i)
    tab.add_row({tr.times[i], tr.states[i][0], tr.states[i][1], tr.states[i][2], tr.diagnostics.at("energy")[i],
                 tr.diagnostics.at("norm")[i]});
  out.tables.emplace_back("spin_trajectory.csv", std::move(tab));
  return out;
}

// ---------------------------------------------------------------------------
// scan

/// "v" or "lo:hi" or "lo:hi:n".
inline AxisRange parse_axis(const std::string& text, std::size_t default_n = 41) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidInputError("invalid axis specification '" + text + "'");
    }
  };
  if (parts.size() == 1) {
    const double v = num(parts[0]);
    return {v, v, 1};
  }
  if (parts.size() == 2 || parts.size() == 3) {
    const double n = parts.size() == 3 ? num(parts[2]) : static_cast<double>(default_n);
    if (!(n >= 2) || n != std::floor(n)) throw InvalidInputError("axis resolution must be an integer >= 2");
    return {num(parts[0]), num(parts[1]), static_cast<std::size_t>(n)};
  }
  throw InvalidInputError("invalid axis specification '" + text + "'");
}

inline CommandOutput cmd_scan(const ScanRegion& region) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "scan";
  auto axis_json = [](const AxisRange& a) { return Json{{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}}; };
  rep.inputs = {{"alpha", axis_json(region.alpha)}, {"beta", axis_json(region.beta)},
                {"gamma", axis_json(region.gamma)}};
  const auto scan = critical_surface_scan(region);
  std::size_t on_surface = 0;
  CsvTable tab;
  tab.header = {"alpha", "beta", "gamma", "omega_sq", "on_surface"};
  for (const auto& c : scan.cells) {
    on_surface += c.on_surface ? 1 : 0;
    tab.add_row({format_double(c.alpha), format_double(c.beta), format_double(c.gamma),
                 format_double(c.omega_sq), c.on_surface ? "1" : "0"});
  }
  double max_dev = 0.0;
  for (const auto& p : scan.zero_set) max_dev = std::max(max_dev, std::abs(p[0] * p[2] - p[1] * p[1]));
  CsvTable zs;
  zs.header = {"alpha", "beta", "gamma"};
  for (const auto& p : scan.zero_set) zs.add_row({p[0], p[1], p[2]});
  rep.results = {{"cells", scan.cells.size()},
                 {"on_surface_cells", on_surface},
                 {"zero_set_points", scan.zero_set.size()},
                 {"segments", scan.segments.size()},
                 {"max_zero_set_omega_sq", max_dev}};
  out.tables.emplace_back("scan.csv", std::move(tab));
  out.tables.emplace_back("scan_zero_set.csv", std::move(zs));
  return out;
}

// ---------------------------------------------------------------------------
// gp

/// {m, omega_x, dx_offset, v0, d, sigma, centers, grid:{x0,dx,n}, g, n_atoms};
/// the grid is optional.
inline GeometrySpec geometry_from_json(const Json& j) {
  try {
    GeometrySpec s;
    s.well.m = j.at("m").get<double>();
    s.well.omega_x = j.at("omega_x").get<double>();
    s.well.dx_offset = j.value("dx_offset", 0.0);
    s.well.v0 = j.at("v0").get<double>();
    s.well.d = j.at("d").get<double>();
    s.sigma = j.at("sigma").get<double>();
    const auto c = j.at("centers");
    if (c.size() != 2) throw InvalidInputError("centers must have two entries");
    s.centers = {c[0].get<double>(), c[1].get<double>()};
    s.g = j.at("g").get<double>();
    s.n_atoms = j.at("n_atoms").get<double>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      s.grid = {g.at("x0").get<double>(), g.at("dx").get<double>(), g.at("n").get<std::size_t>()};
    } else {
      if (!(s.sigma > 0.0)) throw InvalidInputError("sigma must be positive");
      s.grid = default_grid(s.centers, s.sigma);
    }
    return s;
  } catch (const Json::exception& e) {
    throw InvalidInputError(std::string("invalid well geometry: ") + e.what());
  }
}

inline CommandOutput cmd_gp(const std::string& input) {
  CommandOutput out;
  Report& rep = out.report;
  rep.subcommand = "gp";
  const auto spec = geometry_from_json(read_json_file(input));
  const auto built = run_geometry(spec);
  const auto& o = built.overlaps;
  const auto& g = spec.grid;
  rep.inputs = {{"input", input},
                {"well", {{"m", spec.well.m}, {"omega_x", spec.well.omega_x}, {"dx_offset", spec.well.dx_offset},
                          {"v0", spec.well.v0}, {"d", spec.well.d}}},
                {"sigma", spec.sigma},
                {"centers", {spec.centers[0], spec.centers[1]}},
                {"grid", {{"x0", g.x0}, {"dx", g.dx}, {"n", g.n}}},
                {"g", spec.g},
                {"n_atoms", spec.n_atoms}};
  rep.results = {{"params", params_json(built.params)},
                 {"overlaps", {{"eps1", o.eps1}, {"eps2", o.eps2}, {"k", o.k}, {"u1", o.u1}, {"u2", o.u2},
                               {"u12", o.u12}, {"u21", o.u21}, {"i_pair", o.i_pair}}},
                 {"provenance", {{"ansatz", built.provenance.ansatz},
                                 {"orthonormality_error", built.provenance.orthonormality_error}}}};
  rep.bound("orthonormality", built.provenance.orthonormality_error, 1e-10);
  return out;
}

}  // namespace hc::cli

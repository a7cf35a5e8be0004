#pragma once

// Command-line driver. Exit codes: 0 all criteria pass, 1 a criterion
// failed, 2 invalid input or a cone singularity, 3 numerical failure.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hc/cli/commands.hpp"

namespace hc::cli {

enum ExitCode : int { kPass = 0, kCriterionFail = 1, kInvalidInput = 2, kNumericalFailure = 3 };

namespace detail {

inline std::string config_value(const std::string& key, const Json& v) {
  switch (v.type()) {
    case Json::value_t::string:
      return v.get<std::string>();
    case Json::value_t::number_float:
      return format_double(v.get<double>());
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::boolean:
      return v.dump();
    case Json::value_t::array: {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config_value(key, v[i]);
      return s;
    }
    default:
      throw InvalidInputError("config key '" + key + "' must be a scalar or a list");
  }
}

/// Splices the flat keys of a --config file in as flags right after the
/// subcommand, so flags given on the command line win under TakeLast.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const Json cfg = read_json_file(path);
  if (!cfg.is_object()) throw InvalidInputError("config file must hold a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back("--" + key);
      continue;
    }
    extra.push_back("--" + key);
    extra.push_back(config_value(key, value));
  }
  std::size_t at = 0;
  while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
  if (at < args.size()) {
    ++at;
    if (args[at - 1] == "geometry" && at < args.size() && args[at] == "verify") ++at;
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInputError("invalid number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

}  // namespace detail

struct Common {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::optional<double> rtol;
  std::optional<double> atol;

  Tolerance tolerance(Tolerance fallback) const {
    if (rtol) fallback.rtol = *rtol;
    if (atol) fallback.atol = *atol;
    return fallback;
  }
};

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Two-mode condensate dynamics, fixed points and Hannay angles", "hc"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", common.config, "JSON file of flag values");
    sub->add_option("--out", common.out_dir, "directory for JSON and CSV output");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--rtol", common.rtol, "integrator relative tolerance");
    sub->add_option("--atol", common.atol, "integrator absolute tolerance");
  };
  ModelParams params{1.0, 0.0, 0.0, 0.0, 0.0};
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--delta", params.delta, "tunnelling Δ");
    sub->add_option("--eps", params.epsilon, "bias ε");
    sub->add_option("--alpha", params.alpha, "α");
    sub->add_option("--beta", params.beta, "β");
    sub->add_option("--gamma", params.gamma, "γ");
  };

  std::function<CommandOutput()> action;

  HannayConfig hcfg;
  std::string study;
  auto* hannay = app.add_subcommand("hannay", "adiabatic Hannay angle around a parameter loop");
  add_common(hannay);
  hannay->add_option("--loop", hcfg.loop, "cap | keyframes | fourier")
      ->check(CLI::IsMember({"cap", "keyframes", "fourier"}));
  hannay->add_option("--loop-file", hcfg.loop_file, "loop specification (JSON)");
  hannay->add_option("--psi0", hcfg.psi0, "cap opening rapidity");
  hannay->add_option("--scale", hcfg.scale, "frequency scale of the cap");
  hannay->add_option("--orientation", hcfg.orientation, "+1 or -1");
  hannay->add_option("--omega-min", hcfg.omega_min, "minimum admissible ω along the loop");
  hannay->add_option("--loop-time", hcfg.loop_time, "time to traverse the loop");
  hannay->add_option("--q0", hcfg.q0);
  hannay->add_option("--p0", hcfg.p0);
  hannay->add_option("--samples-per-period", hcfg.samples_per_period);
  hannay->add_option("--ode-rel-tol", hcfg.ode_rel_tol, "relative tolerance on ODE vs area");
  hannay->add_option("--geom-tol", hcfg.geom_tol, "tolerance on form vs area");
  hannay->add_option("--study", study, "comma-separated loop times for a convergence study");
  hannay->callback([&] {
    hcfg.tol = common.tolerance(hcfg.tol);
    if (!study.empty()) hcfg.study = detail::parse_list(study);
    action = [&] { return cmd_hannay(hcfg); };
  });

  GeometryConfig gcfg;
  auto* geometry = app.add_subcommand("geometry", "de Sitter geometry checks");
  geometry->require_subcommand(1);
  auto* verify = geometry->add_subcommand("verify", "randomized identity checks");
  add_common(verify);
  verify->add_option("--points", gcfg.points, "random points per identity");
  verify->add_option("--curvature-points", gcfg.curvature_points);
  verify->add_flag("--inject-fault", gcfg.inject_fault, "perturb the angle form by 1%");
  verify->callback([&] { action = [&] { return cmd_geometry_verify(gcfg, common.seed); }; });

  auto* fixed = app.add_subcommand("fixed-points", "fixed points and their stability");
  add_common(fixed);
  add_params(fixed);
  fixed->callback([&] { action = [&] { return cmd_fixed_points(params); }; });

  std::string levels;
  auto* portrait = app.add_subcommand("portrait", "phase portrait on the Bloch sphere");
  add_common(portrait);
  add_params(portrait);
  portrait->add_option("--levels", levels, "comma-separated energy levels");
  portrait->callback([&] {
    action = [&] { return cmd_portrait(params, detail::parse_list(levels), common.tolerance({})); };
  });

  std::string ax = "0", bx = "0", gx = "0";
  auto* scan = app.add_subcommand("scan", "critical surface ω² = 0 over a parameter box");
  add_common(scan);
  scan->add_option("--alpha", ax, "v | lo:hi[:n]");
  scan->add_option("--beta", bx, "v | lo:hi[:n]");
  scan->add_option("--gamma", gx, "v | lo:hi[:n]");
  scan->callback([&] {
    action = [&] { return cmd_scan({parse_axis(ax), parse_axis(bx), parse_axis(gx)}); };
  });

  std::string gp_input;
  auto* gp = app.add_subcommand("gp", "two-mode parameters from a double-well geometry");
  add_common(gp);
  gp->add_option("--input", gp_input, "well geometry (JSON)")->required();
  gp->callback([&] { action = [&] { return cmd_gp(gp_input); }; });

  SpinConfig scfg;
  std::vector<double> spin0;
  auto* spin = app.add_subcommand("spin", "spin trajectory at fixed parameters");
  add_common(spin);
  add_params(spin);
  spin->add_option("--spin0", spin0, "initial spin sx,sy,sz")->delimiter(',')->expected(3);
  spin->add_option("--p", scfg.p, "initial population imbalance");
  spin->add_option("--theta", scfg.theta, "initial phase");
  spin->add_option("--t1", scfg.t1, "final time");
  spin->add_option("--samples", scfg.samples, "output samples");
  spin->callback([&] {
    scfg.tol = common.tolerance(scfg.tol);
    if (spin0.size() == 3) scfg.spin = std::array<double, 3>{spin0[0], spin0[1], spin0[2]};
    action = [&] { return cmd_spin(params, scfg); };
  });

  int code = kPass;
  try {
    try {
      auto expanded = detail::expand_config(std::move(args));
      expanded.insert(expanded.begin(), "hc");
      std::vector<char*> argv;
      for (auto& a : expanded) argv.push_back(a.data());
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out, err);
      return rc == 0 ? kPass : kInvalidInput;
    }
    CommandOutput result = action();
    Json j = result.report.to_json();
    j["seed"] = common.seed;
    if (!j.contains("tolerances")) j["tolerances"] = Json::object();
    const std::string text = to_json_text(j);
    out << text;
    if (!common.out_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(common.out_dir, ec);
      if (ec) throw InvalidInputError("cannot create output directory " + common.out_dir);
      std::string stem = result.report.subcommand;
      std::replace(stem.begin(), stem.end(), ' ', '_');
      const std::filesystem::path dir(common.out_dir);
      write_text_file((dir / (stem + ".json")).string(), text);
      for (const auto& [name, table] : result.tables) write_csv_file((dir / name).string(), table);
    }
    code = result.report.passed() ? kPass : kCriterionFail;
  } catch (const InvalidInputError& e) {
    err << "error: " << e.what() << '\n';
    code = kInvalidInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    code = kInvalidInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    code = kNumericalFailure;
  }
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  err << "wall_time_s " << std::fixed << std::setprecision(3) << wall.count() << '\n';
  return code;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args), out, err);
}

}  // namespace hc::cli

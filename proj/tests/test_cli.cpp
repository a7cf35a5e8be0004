#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hc/cli/app.hpp"

using namespace hc;
using namespace hc::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

const std::string kSamples = HC_SAMPLES_DIR;

}  // namespace

TEST_CASE("deterministic JSON text") {
  const Json j = {{"b", 0.1}, {"a", 1}, {"c", {{"z", 1e-300}, {"y", "s"}}}};
  CHECK(to_json_text(j) ==
        "{\n  \"a\": 1,\n  \"b\": 0.10000000000000001,\n  \"c\": {\n    \"y\": \"s\",\n    \"z\": 1e-300\n  }\n}\n");
  CHECK(format_double(std::nan("")) == "null");
  CsvTable t;
  t.header = {"x", "y"};
  t.add_row(std::vector<double>{0.1, 2.0});
  std::ostringstream os;
  t.write(os);
  CHECK(os.str() == "x,y\n0.10000000000000001,2\n");
}

TEST_CASE("fixed-points subcommand") {
  const auto r = run({"fixed-points", "--alpha", "1", "--beta", "0.5", "--gamma", "1", "--eps", "0", "--delta", "0"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  int centres = 0;
  for (const auto& fp : j["results"]["fixed_points"])
    if (std::abs(fp["p_bar"].get<double>()) < 1e-12 && std::abs(std::abs(fp["theta_bar"].get<double>()) - kPi / 2) < 1e-12 &&
        fp["stability"] == "center") {
      CHECK(std::abs(fp["omega_or_lyapunov"].get<double>() - 0.8660254037844386) < 1e-12);
      ++centres;
    }
  CHECK(centres == 2);
  CHECK(j["seed"] == 1);
  CHECK(j.contains("tolerances"));
  CHECK(r.err.find("wall_time_s") != std::string::npos);
}

TEST_CASE("hannay subcommand") {
  const auto r = run({"hannay", "--loop", "cap", "--psi0", "1", "--loop-time", "2000"});
  REQUIRE(r.code == 0);
  const auto res = r.json()["results"];
  const double area = res["hannay_area"].get<double>();
  CHECK(std::abs(area - kPi * (std::cosh(1.0) - 1.0)) < 1e-10);
  CHECK(std::abs(res["hannay_ode"].get<double>() - area) / area <= 0.02);
  CHECK(r.json()["tolerances"]["rtol"] == 1e-12);

  const auto zero = run({"hannay", "--loop", "cap", "--psi0", "0"});
  REQUIRE(zero.code == 0);
  for (const char* k : {"hannay_ode", "hannay_form", "hannay_area"})
    CHECK(std::abs(zero.json()["results"][k].get<double>()) <= 1e-8);

  const auto dir = scratch_dir("cone");
  std::ofstream(dir / "loop.json") << R"({"kind": "keyframes", "points": [[2, 0, 1], [1, 1.5, 1], [1, 0, 2]]})";
  const auto bad = run({"hannay", "--loop-file", (dir / "loop.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.out.empty());

  CHECK(run({"hannay", "--loop", "keyframes"}).code == 2);
  CHECK(run({"hannay", "--loop", "spiral"}).code == 2);
}

TEST_CASE("hannay convergence study from a config file") {
  const auto dir = scratch_dir("study");
  std::ofstream(dir / "cfg.json") << R"({"loop-file": ")" << kSamples
                                  << R"(/cap_loop.json", "loop-time": 500, "study": [250, 500, 1000, 2000]})";
  const auto r = run({"hannay", "--config", (dir / "cfg.json").string(), "--loop-time", "2000", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["inputs"]["loop_time"] == 2000.0);
  CHECK(j["results"]["convergence"]["slope"].get<double>() >= 0.8);
  CHECK(fs::exists(dir / "hannay.json"));
  CHECK(fs::exists(dir / "hannay_trajectory.csv"));
  CHECK(slurp(dir / "hannay_convergence.csv").rfind("loop_time,inv_loop_time,hannay_ode,error,", 0) == 0);
}

TEST_CASE("geometry verify") {
  const auto ok = run({"geometry", "verify"});
  REQUIRE(ok.code == 0);
  for (const auto& [k, v] : ok.json()["results"].items()) {
    CHECK(v["pass"] == true);
    CHECK(v["max_residual"].get<double>() <= v["tolerance"].get<double>());
  }
  const auto a = run({"geometry", "verify", "--points", "5000", "--seed", "7"});
  const auto b = run({"geometry", "verify", "--points", "5000", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.json()["seed"] == 7);

  const auto fault = run({"geometry", "verify", "--inject-fault"});
  CHECK(fault.code == 1);
  CHECK(fault.json()["results"]["angle_form_half_curvature"]["pass"] == false);
  CHECK(fault.json()["results"]["scalar_curvature"]["pass"] == true);
}

TEST_CASE("scan subcommand") {
  const auto dir = scratch_dir("scan");
  const auto r = run({"scan", "--beta", "1", "--alpha", "0.5:2", "--gamma", "0.5:2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::ifstream zs(dir / "scan_zero_set.csv");
  std::string line;
  std::getline(zs, line);
  CHECK(line == "alpha,beta,gamma");
  std::size_t rows = 0;
  while (std::getline(zs, line)) {
    double a = 0, b = 0, g = 0;
    char c1, c2;
    std::istringstream(line) >> a >> c1 >> b >> c2 >> g;
    CHECK(std::abs(a * g - 1.0) < 0.01);
    ++rows;
  }
  CHECK(rows > 10);
  CHECK(slurp(dir / "scan.csv").rfind("alpha,beta,gamma,omega_sq,on_surface\n", 0) == 0);
  CHECK(run({"scan", "--alpha", "1:2:x"}).code == 2);
}

TEST_CASE("gp, spin and portrait subcommands") {
  const auto g1 = run({"gp", "--input", kSamples + "/symmetric_well.json"});
  const auto g2 = run({"gp", "--input", kSamples + "/symmetric_well.json"});
  REQUIRE(g1.code == 0);
  CHECK(g1.out == g2.out);
  CHECK(std::abs(g1.json()["results"]["params"]["epsilon"].get<double>()) < 1e-10);
  CHECK(run({"gp", "--input", "/nonexistent/well.json"}).code == 2);
  CHECK(run({"gp"}).code == 2);

  const auto dir = scratch_dir("spin");
  const auto s = run({"spin", "--beta", "0.4", "--alpha", "1", "--gamma", "1", "--delta", "0", "--t1", "20", "--out", dir.string()});
  REQUIRE(s.code == 0);
  CHECK(slurp(dir / "spin_trajectory.csv").rfind("t,sx,sy,sz,energy,norm\n", 0) == 0);
  CHECK(run({"spin", "--spin0", "1,1,0"}).code == 2);

  const auto p = run({"portrait", "--alpha", "1", "--beta", "1.5", "--gamma", "1", "--delta", "0", "--levels", "0.5"});
  REQUIRE(p.code == 0);
  CHECK(p.json()["results"]["region_count"] == 4);
}

TEST_CASE("exit codes and argument handling") {
  CHECK(run({}).code == 2);
  CHECK(run({"nope"}).code == 2);
  CHECK(run({"fixed-points", "--bogus", "1"}).code == 2);
  CHECK(run({"fixed-points", "--help"}).code == 0);
  CHECK(run({"fixed-points", "--config", "/nonexistent.json"}).code == 2);
  CHECK(run({"fixed-points", "--alpha", "1", "--beta", "1", "--gamma", "1", "--delta", "0.2"}).code == 0);
}

TEST_CASE("repeated runs write identical files") {
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  for (const auto& d : {a, b}) {
    REQUIRE(run({"hannay", "--loop-file", kSamples + "/keyframe_loop.json", "--loop-time", "500", "--out", d.string()}).code == 0);
    REQUIRE(run({"portrait", "--alpha", "1", "--beta", "1.5", "--gamma", "1", "--delta", "0", "--out", d.string()}).code == 0);
  }
  for (const auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
}

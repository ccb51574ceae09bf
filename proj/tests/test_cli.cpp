#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli_app.hpp"
#include "oracles.hpp"
#include "weylsheet/errors.hpp"

using namespace weylsheet;
using namespace weylsheet::cli;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

RunConfig config_in(const json& doc, const oracle::TempDir& dir) {
  RunConfig c = parse_config(doc, dir.path);
  c.out_dir = dir.path / "out";
  return c;
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "weylsheet");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const oracle::TempDir& dir, const std::string& name, const json& doc) {
  const fs::path p = dir.path / name;
  std::ofstream(p) << doc.dump();
  return p;
}

int count_lines(const std::string& text, char first) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty() && line[0] == first;
  return n;
}

}  // namespace

TEST_CASE("config validation") {
  oracle::TempDir dir;
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"catalog", "sphere"}}}, {"colour", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"catalog", "sphere"}, {"params", {{"Q", 1}}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"expression", "u1; u2; 0"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"catalog", "plane"}}}, {"chart", {{"n", {1, 5}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"catalog", "plane"}}}, {"signature", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"grid", "missing.grid"}}}}, dir.path), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"surface", {{"catalog", "plane"}}}, {"thermal", {{"r", "x"}}}}), ConfigError);
  CHECK_THROWS_AS(load_config(dir.path / "absent.json"), ConfigError);

  const RunConfig ok = parse_config(json{{"surface", {{"catalog", "sphere"}, {"params", {{"R", 2}}}}},
                                         {"chart", {{"n", {9, 11}}}},
                                         {"energy", {{"region", {{"u1", {1, 2}}, {"u2", {0, 1}}}}}}});
  REQUIRE(ok.surface);
  CHECK(ok.surface->name == "sphere");
  CHECK(ok.energy->density == "willmore");
  CHECK(ok.energy->region->u1_max == 2);
  const SampledSurface s = build_surface(ok);
  CHECK(s.chart().n1() == 9);
  CHECK(s.chart().n2() == 11);
}

TEST_CASE("curvature command") {
  oracle::TempDir dir;
  const json sphere = cmd_curvature(config_in({{"surface", {{"catalog", "sphere"}, {"params", {{"R", 2}}}}}}, dir));
  CHECK(sphere["K"]["mean"].get<double>() == Approx(0.25).epsilon(1e-10));
  CHECK(sphere["H"]["min"].get<double>() == Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(sphere["developable"].get<bool>());
  for (const char* f : {"K.csv", "H.csv", "principal.csv", "forms.csv", "developability.json"})
    CHECK(fs::exists(dir.path / "out" / f));
  const std::string k = slurp(dir.path / "out" / "K.csv");
  CHECK(k.rfind("u1,u2,K\n", 0) == 0);
  CHECK(count_lines(k, '0') + count_lines(k, '1') + count_lines(k, '2') + count_lines(k, '3') > 0);

  oracle::TempDir d2;
  const json cyl = cmd_curvature(config_in({{"surface", {{"catalog", "cylinder"}, {"params", {{"rho", 2}}}}}}, d2));
  CHECK(cyl["developable"].get<bool>());
  CHECK(cyl["H"]["mean"].get<double>() == Approx(0.25).epsilon(1e-10));
}

TEST_CASE("thermal command") {
  oracle::TempDir dir;
  const json flat = cmd_thermal(config_in({{"surface", {{"catalog", "plane"}}}, {"thermal", {{"r", 4}}}}, dir));
  CHECK(flat["K_theta_sign"]["positive"].get<bool>());
  CHECK(flat["K_theta_sign"]["matches_sign_of_r"].get<bool>());
  CHECK(flat["solver"]["residual_inf"].get<double>() <= flat["solver"]["tolerance"].get<double>());
  CHECK(fs::exists(dir.path / "out" / "sigma.csv"));

  oracle::TempDir d2;
  const json sph = cmd_thermal(config_in(
      {{"surface", {{"catalog", "sphere"}, {"params", {{"R", 2}}}}}, {"thermal", {{"r", 0.5}}}}, d2));
  CHECK(sph["solver"]["residual_inf"].get<double>() <= 1e-10);
  CHECK(sph["nu"]["defined"].get<bool>());

  oracle::TempDir d3;
  CHECK_THROWS_AS(cmd_thermal(config_in({{"surface", {{"catalog", "torus"}}}, {"thermal", {{"r", 1}}}}, d3)),
                  NumericalError);
  CHECK_THROWS_AS(cmd_thermal(config_in({{"surface", {{"catalog", "plane"}}}}, d3)), ConfigError);
}

TEST_CASE("congruence command") {
  oracle::TempDir dir;
  const json mer = cmd_congruence(config_in({{"surface", {{"catalog", "sphere"}, {"params", {{"R", 2}}}}},
                                             {"congruence", {{"name", "meridian"}}}},
                                            dir));
  CHECK(mer["summary"]["probes"].get<int>() == 25);
  CHECK(mer["summary"]["tangent_probes"].get<int>() == 25);
  CHECK(mer["summary"]["coupling_residual_max_tangent"].get<double>() <= 1e-8);
  for (const json& p : mer["probes"]) CHECK(p["nu"].get<double>() == Approx(2).epsilon(1e-6));

  oracle::TempDir d2;
  const json cyl = cmd_congruence(config_in(
      {{"surface", {{"catalog", "cylinder"}}},
       {"congruence", {{"name", "circular"}, {"flat_state", {{"v", {"1", "0"}}, {"r", 0}}}}}},
      d2));
  CHECK(cyl["flat_state"]["flat"].get<bool>());
  CHECK(fs::exists(d2.path / "out" / "report.json"));

  oracle::TempDir d3;
  const json con = cmd_congruence(config_in(
      {{"surface", {{"catalog", "plane"}}}, {"congruence", {{"name", "constant"}}}}, d3));
  CHECK(con["summary"]["kappa_zero_probes"].get<int>() == 25);
}

TEST_CASE("energy command") {
  oracle::TempDir dir;
  const json e = cmd_energy(config_in({{"surface", {{"catalog", "sphere"}, {"params", {{"R", 2}}}}},
                                       {"chart", {{"u1", {0, std::numbers::pi}}, {"n", {65, 65}}}},
                                       {"energy", {{"density", "willmore"}}}},
                                      dir));
  CHECK(e["energy"].get<double>() == Approx(4 * std::numbers::pi).epsilon(5e-4));
  CHECK(e["el_residual_max"].is_null());

  oracle::TempDir d2;
  const json c = cmd_energy(config_in({{"surface", {{"catalog", "catenoid"}}}, {"energy", {{"density", "1"}}}}, d2));
  CHECK(c["el_residual_max_interior"].get<double>() <= 1e-8);
  CHECK(fs::exists(d2.path / "out" / "el_residual.csv"));
}

TEST_CASE("export-obj") {
  oracle::TempDir dir;
  const json j = cmd_export_obj(config_in({{"surface", {{"catalog", "plane"}}}, {"chart", {{"n", {3, 3}}}}}, dir), true);
  CHECK(j["vertices"].get<int>() == 9);
  CHECK(j["faces"].get<int>() == 8);
  const std::string obj = slurp(dir.path / "out" / "surface.obj");
  CHECK(count_lines(obj, 'v') == 9);
  CHECK(count_lines(obj, 'f') == 8);

  // the grid file reloads bit-exactly
  const SampledSurface a = build_surface(config_in({{"surface", {{"catalog", "plane"}}}, {"chart", {{"n", {3, 3}}}}}, dir));
  const SampledSurface b = load_grid(dir.path / "out" / "surface.grid");
  for (std::size_t k = 0; k < a.positions().size(); ++k) CHECK(a.positions()[k] == b.positions()[k]);

  const fs::path cfg = write_config(dir, "grid.json", {{"surface", {{"grid", "out/surface.grid"}}}});
  const RunConfig g = load_config(cfg);
  CHECK(build_surface(g).positions() == a.positions());
}

TEST_CASE("estimate") {
  EstimateArgs args;
  args.l = 10.0;
  const json j = cmd_estimate(args);
  CHECK(j["qualitative"].get<bool>());
  CHECK(j["h_eff_nm"].get<double>() == Approx(std::sqrt(12.0 / 2120.0)));
  CHECK(j["h_eff_below_1_angstrom"].get<bool>());
  CHECK(j["boundary_ratio"].get<double>() == Approx(4.92e-4).epsilon(1e-3));
  CHECK(j.contains("critical_strain"));

  const CliResult r = invoke({"estimate", "--k", "1.2", "--r", "1000"});
  CHECK(r.code == 0);
  const json out = json::parse(r.out);
  CHECK(out["h_eff_nm"].get<double>() == Approx(std::sqrt(12 * 1.2 / 2120.0)));
  CHECK(invoke({"estimate", "--nu", "0.7"}).code == kConfig);
}

TEST_CASE("exit codes") {
  oracle::TempDir dir;
  CHECK(invoke({"--help"}).code == kOk);
  CHECK(invoke({}).code == kConfig);
  CHECK(invoke({"frobnicate"}).code == kConfig);
  CHECK(invoke({"curvature"}).code == kConfig);
  CHECK(invoke({"curvature", "--config", (dir.path / "nope.json").string()}).code == kConfig);

  const fs::path bad = write_config(dir, "bad.json", {{"surface", {{"grid", "nope.grid"}}}});
  const CliResult b = invoke({"curvature", "--config", bad.string()});
  CHECK(b.code == kConfig);
  CHECK(b.err.find("grid file not found") != std::string::npos);

  const fs::path torus = write_config(dir, "torus.json", {{"surface", {{"catalog", "torus"}}}, {"thermal", {{"r", 1}}}});
  CHECK(invoke({"thermal", "--config", torus.string(), "--out-dir", (dir.path / "t").string()}).code == kNumerical);

  const fs::path plane = write_config(dir, "plane.json", {{"surface", {{"catalog", "plane"}}}, {"chart", {{"n", {5, 5}}}}});
  CHECK(invoke({"curvature", "--config", plane.string(), "--out-dir", "/proc/weylsheet/out"}).code == kIo);
  CHECK(invoke({"curvature", "--config", plane.string(), "--out-dir", (dir.path / "p").string(), "--threads", "0"}).code ==
        kConfig);
  CHECK(invoke({"thermal", "--config", plane.string(), "--tolerance", "-1"}).code == kConfig);

  const CliResult ok = invoke({"curvature", "--config", plane.string(), "--out-dir", (dir.path / "p").string()});
  CHECK(ok.code == kOk);
  CHECK(json::parse(ok.out)["command"] == "curvature");
}

TEST_CASE("outputs are deterministic") {
  oracle::TempDir dir;
  const fs::path cfg = write_config(dir, "torus.json",
                                    {{"surface", {{"catalog", "torus"}}}, {"chart", {{"n", {33, 33}}}}});
  const CliResult a = invoke({"curvature", "--config", cfg.string(), "--out-dir", (dir.path / "a").string()});
  const CliResult b =
      invoke({"curvature", "--config", cfg.string(), "--out-dir", (dir.path / "b").string(), "--threads", "1"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* f : {"K.csv", "H.csv", "principal.csv", "forms.csv", "developability.json"})
    CHECK(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f));
}

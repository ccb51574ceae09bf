#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>

#include <CLI11.hpp>

#include "weylsheet/errors.hpp"
#include "weylsheet/geometry.hpp"
#include "weylsheet/io.hpp"
#include "weylsheet/parallel.hpp"
#include "weylsheet/selfcheck.hpp"
#include "weylsheet/thermal.hpp"

namespace weylsheet::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void allow_keys(const json& j, const std::string& section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError("'" + section + "' must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + section);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& section) {
  return j.contains(key) ? number(j[key], section + "." + key) : fallback;
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + " must be a string");
  return j.get<std::string>();
}

std::array<double, 2> range(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(what + " must be [min, max]");
  std::array<double, 2> out{number(j[0], what), number(j[1], what)};
  if (!(out[0] < out[1])) throw ConfigError(what + " needs min < max");
  return out;
}

Vector3d vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + " must have three entries");
  return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

double positive(const json& j, const std::string& what) {
  const double v = number(j, what);
  if (!(v > 0)) throw ConfigError(what + " must be positive");
  return v;
}

ChartSpec parse_chart(const json& j) {
  allow_keys(j, "chart", {"u1", "u2", "n", "periodic"});
  ChartSpec c;
  if (j.contains("u1")) c.u1 = range(j["u1"], "chart.u1");
  if (j.contains("u2")) c.u2 = range(j["u2"], "chart.u2");
  if (j.contains("n")) {
    const json& n = j["n"];
    if (n.is_number_integer()) {
      c.n = {n.get<int>(), n.get<int>()};
    } else if (n.is_array() && n.size() == 2 && n[0].is_number_integer() && n[1].is_number_integer()) {
      c.n = {n[0].get<int>(), n[1].get<int>()};
    } else {
      throw ConfigError("chart.n must be an integer or [n1, n2]");
    }
    if ((*c.n)[0] < 3 || (*c.n)[1] < 3) throw ConfigError("chart.n must be at least 3 per axis");
  }
  if (j.contains("periodic")) {
    const json& p = j["periodic"];
    if (!p.is_array() || p.size() != 2 || !p[0].is_boolean() || !p[1].is_boolean())
      throw ConfigError("chart.periodic must be [bool, bool]");
    c.periodic = {p[0].get<bool>(), p[1].get<bool>()};
  }
  return c;
}

SurfaceSpec parse_surface_spec(const json& j, const fs::path& base) {
  allow_keys(j, "surface", {"catalog", "params", "height", "expression", "grid"});
  const int sources = int(j.contains("catalog")) + int(j.contains("expression")) + int(j.contains("grid"));
  if (sources != 1)
    throw ConfigError("surface needs exactly one of 'catalog', 'expression' or 'grid'");
  SurfaceSpec s;
  if (j.contains("catalog")) {
    s.kind = SurfaceSpec::Kind::Catalog;
    s.name = text(j["catalog"], "surface.catalog");
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), s.name) == names.end())
      throw ConfigError("unknown catalog surface '" + s.name + "'");
    if (j.contains("params")) {
      allow_keys(j["params"], "surface.params", {"R", "r", "rho", "c", "a"});
      for (const auto& [key, value] : j["params"].items())
        s.params.values[key] = number(value, "surface.params." + key);
    }
    if (j.contains("height")) s.params.expression = text(j["height"], "surface.height");
  } else if (j.contains("expression")) {
    s.kind = SurfaceSpec::Kind::Expression;
    s.expression = text(j["expression"], "surface.expression");
  } else {
    s.kind = SurfaceSpec::Kind::Grid;
    s.grid = base / text(j["grid"], "surface.grid");
    if (!fs::exists(s.grid)) throw ConfigError("grid file not found: " + s.grid.string());
  }
  if (s.kind != SurfaceSpec::Kind::Catalog && (j.contains("params") || j.contains("height")))
    throw ConfigError("'params' and 'height' only apply to catalog surfaces");
  return s;
}

ThermalProfile parse_profile(const json& j) {
  allow_keys(j, "thermal.profile", {"form", "b", "c0", "c1", "theta", "beta", "theta0", "l0", "range"});
  const std::string form = text(j.value("form", json("constant")), "thermal.profile.form");
  const double theta0 = number_or(j, "theta0", 0.0, "thermal.profile");
  const double l0 = j.contains("l0") ? positive(j["l0"], "thermal.profile.l0") : 1.0;
  try {
    ThermalProfile p = [&] {
      if (form == "constant") return ThermalProfile::constant(number_or(j, "b", 0.0, "thermal.profile"), theta0, l0);
      if (form == "inverse") return ThermalProfile::inverse(theta0, l0);
      if (form == "linear")
        return ThermalProfile::linear(number_or(j, "c0", 0.0, "thermal.profile"),
                                      number_or(j, "c1", 0.0, "thermal.profile"), theta0, l0);
      if (form == "tabulated") {
        if (!j.contains("theta") || !j.contains("beta") || !j["theta"].is_array() ||
            !j["beta"].is_array())
          throw ConfigError("tabulated profile needs 'theta' and 'beta' arrays");
        std::vector<double> theta, beta;
        for (const json& x : j["theta"]) theta.push_back(number(x, "thermal.profile.theta"));
        for (const json& x : j["beta"]) beta.push_back(number(x, "thermal.profile.beta"));
        return ThermalProfile::tabulated(std::move(theta), std::move(beta), theta0, l0);
      }
      throw ConfigError("unknown thermal profile form '" + form + "'");
    }();
    if (j.contains("range")) {
      const auto r = range(j["range"], "thermal.profile.range");
      p.with_range(r[0], r[1]);
    }
    return p;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("thermal profile: ") + e.what());
  }
}

ThermalSpec parse_thermal(const json& j) {
  allow_keys(j, "thermal", {"r", "boundary", "profile", "theta", "max_iterations"});
  ThermalSpec t;
  if (!j.contains("r")) throw ConfigError("thermal.r is required");
  t.r = number(j["r"], "thermal.r");
  if (j.contains("boundary")) t.boundary = text(j["boundary"], "thermal.boundary");
  if (j.contains("profile")) t.profile = parse_profile(j["profile"]);
  if (j.contains("theta")) {
    t.theta = number(j["theta"], "thermal.theta");
    if (*t.theta < 0) throw ConfigError("thermal.theta must be nonnegative");
  }
  if (j.contains("max_iterations")) {
    if (!j["max_iterations"].is_number_integer() || j["max_iterations"].get<int>() < 0)
      throw ConfigError("thermal.max_iterations must be a nonnegative integer");
    t.max_iterations = j["max_iterations"].get<int>();
  }
  return t;
}

CongruenceSpec parse_congruence(const json& j) {
  allow_keys(j, "congruence", {"name", "params", "field", "box", "probes", "l_theta", "flat_state"});
  if (j.contains("name") == j.contains("field"))
    throw ConfigError("congruence needs exactly one of 'name' or 'field'");
  CongruenceSpec c;
  if (j.contains("name")) {
    c.name = text(j["name"], "congruence.name");
    const auto names = congruence_names();
    if (std::find(names.begin(), names.end(), c.name) == names.end())
      throw ConfigError("unknown congruence '" + c.name + "'");
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw ConfigError("congruence.params must be an object");
      for (const auto& [key, value] : j["params"].items())
        c.params[key] = number(value, "congruence.params." + key);
    }
  } else {
    const json& f = j["field"];
    if (!f.is_array() || f.size() != 3) throw ConfigError("congruence.field needs three expressions");
    for (int k = 0; k < 3; ++k) c.field[k] = text(f[k], "congruence.field");
    if (j.contains("box")) {
      const json& b = j["box"];
      if (!b.is_array() || b.size() != 2) throw ConfigError("congruence.box must be [[lo], [hi]]");
      c.lo = vec3(b[0], "congruence.box");
      c.hi = vec3(b[1], "congruence.box");
      if (!((c.hi - c.lo).minCoeff() > 0)) throw ConfigError("congruence.box needs lo < hi");
    }
  }
  if (j.contains("probes")) {
    if (!j["probes"].is_array()) throw ConfigError("congruence.probes must be a list of [u1, u2]");
    for (const json& p : j["probes"]) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("congruence.probes must be a list of [u1, u2]");
      c.probes.emplace_back(number(p[0], "probe"), number(p[1], "probe"));
    }
  }
  if (j.contains("l_theta")) c.l_theta = positive(j["l_theta"], "congruence.l_theta");
  if (j.contains("flat_state")) {
    const json& f = j["flat_state"];
    allow_keys(f, "congruence.flat_state", {"v", "r"});
    if (!f.contains("v") || !f["v"].is_array() || f["v"].size() != 2)
      throw ConfigError("congruence.flat_state.v needs two expressions in u1, u2");
    c.flat_v = std::array<std::string, 2>{text(f["v"][0], "flat_state.v"), text(f["v"][1], "flat_state.v")};
    c.flat_r = number_or(f, "r", 0.0, "congruence.flat_state");
  }
  return c;
}

EnergySpec parse_energy(const json& j) {
  allow_keys(j, "energy", {"density", "region"});
  EnergySpec e;
  if (j.contains("density")) e.density = text(j["density"], "energy.density");
  if (j.contains("region")) {
    allow_keys(j["region"], "energy.region", {"u1", "u2"});
    if (!j["region"].contains("u1") || !j["region"].contains("u2"))
      throw ConfigError("energy.region needs u1 and u2 ranges");
    const auto a = range(j["region"]["u1"], "energy.region.u1");
    const auto b = range(j["region"]["u2"], "energy.region.u2");
    e.region = Region{a[0], a[1], b[0], b[1]};
  }
  return e;
}

// ---------------------------------------------------------------------------

json chart_json(const Chart& c) {
  return {{"u1", {c.min(0), c.max(0)}},
          {"u2", {c.min(1), c.max(1)}},
          {"n", {c.n1(), c.n2()}},
          {"periodic", {c.periodic(0), c.periodic(1)}}};
}

json surface_json(const RunConfig& config, const SampledSurface& s) {
  const SurfaceSpec& spec = *config.surface;
  json j;
  switch (spec.kind) {
    case SurfaceSpec::Kind::Catalog:
      j["catalog"] = spec.name;
      j["params"] = spec.params.values;
      if (!spec.params.expression.empty()) j["height"] = spec.params.expression;
      break;
    case SurfaceSpec::Kind::Expression:
      j["expression"] = to_string(*s.source());
      break;
    case SurfaceSpec::Kind::Grid:
      j["grid"] = spec.grid.string();
      break;
  }
  j["chart"] = chart_json(s.chart());
  j["signature"] = config.signature;
  return j;
}

// Periodic duplicates are skipped so that closed surfaces are not double counted.
bool canonical_node(const Chart& c, int i, int j) {
  return c.canonical(0, i) == i && c.canonical(1, j) == j;
}

json stats(const ScalarField& f) {
  const Chart& c = f.chart();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> kept;
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j) {
      if (!canonical_node(c, i, j)) continue;
      const double v = f(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      kept.push_back(v);
    }
  return {{"min", lo}, {"max", hi}, {"mean", pairwise_sum(kept) / double(kept.size())}};
}

fs::path prepare_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec || !fs::is_directory(config.out_dir))
    throw IoError("cannot create output directory " + config.out_dir.string());
  return config.out_dir;
}

double max_over(const ScalarField& f, int margin, bool all_nodes) {
  const Chart& c = f.chart();
  double m = 0;
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      if (all_nodes || c.interior(i, j, margin)) m = std::max(m, std::abs(f(i, j)));
  return m;
}

// Closest node, for probes on grid surfaces.
std::pair<int, int> nearest_node(const Chart& c, const Vector2d& u) {
  std::pair<int, int> out;
  for (int a = 0; a < 2; ++a) {
    const double t = (u[a] - c.min(a)) / c.h(a);
    const int k = std::clamp(static_cast<int>(std::lround(t)), 0, c.n(a) - 1);
    (a == 0 ? out.first : out.second) = k;
  }
  return out;
}

std::vector<Vector2d> default_probes(const Chart& c) {
  std::vector<Vector2d> out;
  auto lattice = [&](int axis) {
    const int lo = c.periodic(axis) ? 0 : std::min(2, c.n(axis) / 2);
    const int hi = c.periodic(axis) ? c.n(axis) - 2 : std::max(lo, c.n(axis) - 3);
    std::vector<int> ks;
    for (int q = 0; q < 5; ++q) ks.push_back(lo + static_cast<int>(std::lround(q * (hi - lo) / 4.0)));
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
  };
  for (int i : lattice(0))
    for (int j : lattice(1)) out.emplace_back(c.coord(0, i), c.coord(1, j));
  return out;
}

json vec_json(const Vector3d& v) { return {v[0], v[1], v[2]}; }

const char* kHConvention =
    "H = (kappa1 + kappa2)/2 with n = r1 x r2 normalised; in the congruence relations H is taken "
    "along the curve's principal normal and enters with factor 1: "
    "2H/kappa - K/kappa^2 - 1 - (tau/kappa)^2";

}  // namespace

// ---------------------------------------------------------------------------

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunConfig parse_config(const json& doc, const fs::path& base) {
  try {
    allow_keys(doc, "config",
               {"surface", "chart", "signature", "thermal", "congruence", "energy", "out_dir",
                "tolerances"});
    RunConfig c;
    if (doc.contains("surface")) c.surface = parse_surface_spec(doc["surface"], base);
    if (doc.contains("chart")) {
      c.chart = parse_chart(doc["chart"]);
      if (c.surface && c.surface->kind == SurfaceSpec::Kind::Grid)
        throw ConfigError("a grid surface takes its chart from the file; remove 'chart'");
    }
    if (c.surface && c.surface->kind == SurfaceSpec::Kind::Expression && (!c.chart.u1 || !c.chart.u2))
      throw ConfigError("an expression surface needs chart.u1 and chart.u2");
    if (doc.contains("signature")) {
      const json& s = doc["signature"];
      if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
        throw ConfigError("signature must be 1 or -1");
      c.signature = s.get<int>();
    }
    if (doc.contains("thermal")) c.thermal = parse_thermal(doc["thermal"]);
    if (doc.contains("congruence")) c.congruence = parse_congruence(doc["congruence"]);
    if (doc.contains("energy")) c.energy = parse_energy(doc["energy"]);
    if (doc.contains("out_dir")) c.out_dir = base / text(doc["out_dir"], "out_dir");
    if (doc.contains("tolerances")) {
      const json& t = doc["tolerances"];
      allow_keys(t, "tolerances", {"solver", "developability", "flat_state"});
      if (t.contains("solver")) c.tolerances.solver = positive(t["solver"], "tolerances.solver");
      if (t.contains("developability"))
        c.tolerances.developability = positive(t["developability"], "tolerances.developability");
      if (t.contains("flat_state"))
        c.tolerances.flat_state = positive(t["flat_state"], "tolerances.flat_state");
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

SampledSurface build_surface(const RunConfig& config) {
  if (!config.surface) throw ConfigError("config has no surface section");
  const SurfaceSpec& spec = *config.surface;
  const ChartSpec& cs = config.chart;
  if (spec.kind == SurfaceSpec::Kind::Grid) return load_grid(spec.grid);

  SurfaceExpr expr;
  Chart base;
  try {
    if (spec.kind == SurfaceSpec::Kind::Catalog) {
      const CatalogSurface cat = catalog(spec.name, spec.params);
      expr = cat.expr;
      base = cat.chart;
    } else {
      expr = parse_surface(spec.expression);
      base = Chart((*cs.u1)[0], (*cs.u1)[1], (*cs.u2)[0], (*cs.u2)[1], 33, 33);
    }
  } catch (const ParseError& e) {
    throw ConfigError(std::string("surface: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("surface: ") + e.what());
  }
  const auto u1 = cs.u1.value_or(std::array<double, 2>{base.min(0), base.max(0)});
  const auto u2 = cs.u2.value_or(std::array<double, 2>{base.min(1), base.max(1)});
  const auto n = cs.n.value_or(std::array<int, 2>{base.n1(), base.n2()});
  const auto periodic = cs.periodic.value_or(std::array<bool, 2>{base.periodic(0), base.periodic(1)});
  const Chart chart(u1[0], u1[1], u2[0], u2[1], n[0], n[1], periodic[0], periodic[1]);
  try {
    return SampledSurface::from_expr(expr, chart);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("surface cannot be evaluated on the chart: ") + e.what());
  }
}

json cmd_curvature(const RunConfig& config) {
  const SampledSurface s = build_surface(config);
  const Chart& c = s.chart();
  const SurfaceGeometry geo = surface_geometry(s, config.signature);
  const ScalarField K = geo.K(), H = geo.H(), k1 = geo.kappa1(), k2 = geo.kappa2();
  std::array<std::vector<double>, 6> forms;
  for (const FundamentalForms& f : geo.forms) {
    const double v[6] = {f.E, f.F, f.G, f.L, f.M, f.N};
    for (int q = 0; q < 6; ++q) forms[q].push_back(v[q]);
  }
  const DevelopabilityReport dev = developability(s, config.tolerances.developability, config.signature);

  // intrinsic curvature of the induced metric as a consistency figure
  const MetricField metric = s.induced_metric(config.signature);
  const ScalarField Kin = intrinsic_gauss_curvature(metric);
  std::vector<double> diff(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) diff[k] = Kin.values()[k] - K.values()[k];
  const double te = max_over(ScalarField(c, diff), 2, metric.analytic());

  const fs::path out = prepare_out_dir(config);
  save_csv(out / "K.csv", c, {{"K", &K.values()}});
  save_csv(out / "H.csv", c, {{"H", &H.values()}});
  save_csv(out / "principal.csv", c, {{"kappa1", &k1.values()}, {"kappa2", &k2.values()}});
  save_csv(out / "forms.csv", c,
           {{"E", &forms[0]}, {"F", &forms[1]}, {"G", &forms[2]}, {"L", &forms[3]}, {"M", &forms[4]},
            {"N", &forms[5]}});

  json summary = {{"command", "curvature"},
                  {"surface", surface_json(config, s)},
                  {"K", stats(K)},
                  {"H", stats(H)},
                  {"developable", dev.is_developable},
                  {"developability_measure", dev.measure},
                  {"developability_tolerance", dev.tolerance},
                  {"intrinsic_minus_extrinsic_K_max", te},
                  {"h_convention", "H = (kappa1 + kappa2)/2 with n = r1 x r2 normalised"},
                  {"files", {"K.csv", "H.csv", "principal.csv", "forms.csv", "developability.json"}}};
  save_text(out / "developability.json", dump(summary));
  return summary;
}

json cmd_thermal(const RunConfig& config) {
  if (!config.thermal) throw ConfigError("config has no thermal section");
  const ThermalSpec& t = *config.thermal;
  const SampledSurface s = build_surface(config);
  const Chart& c = s.chart();
  const MetricField metric = s.induced_metric(config.signature);
  const SurfaceGeometry geo = surface_geometry(s, config.signature);
  const ScalarField K = geo.K();

  ThermalStateProblem problem{metric, K, t.r, std::nullopt, config.tolerances.solver, t.max_iterations};
  if (!t.boundary.empty()) {
    if (c.periodic(0) && c.periodic(1))
      throw ConfigError("thermal.boundary given for a chart without boundary");
    try {
      problem.boundary = ScalarField::from_expr(c, parse_expr(t.boundary, kSurfaceVars)).sampled();
    } catch (const ParseError& e) {
      throw ConfigError(std::string("thermal.boundary: ") + e.what());
    }
  }
  const SolveReport rep = solve_sigma(problem);

  const ScalarField Kt = conformal_curvature(K, rep.sigma, metric, LaplacianScheme::Flux);
  double sigma_max = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (rep.solved[k]) sigma_max = std::max(sigma_max, rep.sigma.values()[k]);
  const double verdict_tol = rep.tolerance * std::exp(2.0 * sigma_max);
  const SignVerdict v = sign_verdict(Kt, rep.solved, verdict_tol);
  const bool expected = t.r > 0 ? v.positive : (t.r < 0 ? v.negative : v.zero);

  double l_theta = 1.0, theta = 0.0;
  if (t.profile) {
    theta = t.theta.value_or(t.profile->theta0());
    try {
      l_theta = t.profile->length(theta);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("thermal.theta: ") + e.what());
    }
  }
  std::vector<double> nu(c.size(), kNaN);
  json nu_json;
  try {
    const ShapeParameter sp = shape_parameter(geo.H(), K, l_theta);
    for (std::size_t k = 0; k < c.size(); ++k)
      if (sp.valid[k]) nu[k] = sp.nu.values()[k];
    nu_json = {{"defined", true}, {"excluded_nodes", sp.excluded}};
  } catch (const DegenerateError& e) {
    nu_json = {{"defined", false}, {"reason", e.what()}};
  }
  nu_json["l_theta"] = l_theta;

  const fs::path out = prepare_out_dir(config);
  save_csv(out / "sigma.csv", c, {{"sigma", &rep.sigma.values()}});
  save_csv(out / "Ktheta.csv", c, {{"K_theta", &Kt.values()}});
  save_csv(out / "nu.csv", c, {{"nu", &nu}});

  std::size_t solved = 0;
  for (char x : rep.solved) solved += x ? 1 : 0;
  json report = {{"command", "thermal"},
                 {"surface", surface_json(config, s)},
                 {"r", t.r},
                 {"boundary", t.boundary.empty() ? (c.periodic(0) && c.periodic(1) ? "mean-zero" : "0")
                                                  : t.boundary},
                 {"solver",
                  {{"residual_inf", rep.residual_inf},
                   {"tolerance", rep.tolerance},
                   {"scale", rep.scale},
                   {"iterations", rep.iterations},
                   {"compatibility_defect", rep.compatibility_defect},
                   {"solved_nodes", solved}}},
                 {"K_theta_sign",
                  {{"min", v.min},
                   {"max", v.max},
                   {"positive", v.positive},
                   {"negative", v.negative},
                   {"zero", v.zero},
                   {"constant_sign", v.constant_sign()},
                   {"matches_sign_of_r", expected},
                   {"tolerance", verdict_tol}}},
                 {"nu", nu_json},
                 {"files", {"sigma.csv", "Ktheta.csv", "nu.csv", "report.json"}}};
  if (t.profile) report["theta"] = theta;
  save_text(out / "report.json", dump(report));
  return report;
}

json cmd_congruence(const RunConfig& config) {
  if (!config.congruence) throw ConfigError("config has no congruence section");
  const CongruenceSpec& spec = *config.congruence;
  const SampledSurface s = build_surface(config);
  const Chart& c = s.chart();
  const int eps = config.signature;

  CongruenceField field;
  try {
    if (!spec.name.empty()) {
      field = congruence_catalog(spec.name, spec.params);
    } else {
      std::array<Expr, 3> v;
      for (int k = 0; k < 3; ++k) v[k] = parse_expr(spec.field[k], kSpaceVars);
      field = CongruenceField::from_exprs(v, eps, spec.lo, spec.hi);
    }
  } catch (const ParseError& e) {
    throw ConfigError(std::string("congruence: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("congruence: ") + e.what());
  }
  if (field.signature() != eps)
    throw ConfigError("congruence '" + field.name() + "' uses signature " +
                      std::to_string(field.signature()) + " but the surface uses " + std::to_string(eps));

  const std::vector<Vector2d> probes = spec.probes.empty() ? default_probes(c) : spec.probes;
  json rows = json::array();
  double coupling_max = 0, frenet_max = 0;
  int kappa_zero = 0, on_surface = 0;
  for (const Vector2d& u : probes) {
    SurfaceJet jet;
    Vector2d at = u;
    if (s.source()) {
      if (!c.contains(u[0], u[1])) throw ConfigError("probe outside the chart");
      jet = eval_jet(*s.source(), u[0], u[1]);
    } else {
      const auto [i, j] = nearest_node(c, u);
      jet = s.jet(i, j);
      at = {c.coord(0, i), c.coord(1, j)};
    }
    const FundamentalForms forms = fundamental_forms(jet, eps);
    const CurvatureData curv = curvatures(forms);
    json row = {{"u", {at[0], at[1]}}, {"point", vec_json(jet.r)}, {"K", curv.K}, {"H", curv.H}};
    try {
      const FrenetFrame fr = frenet_at(field, jet.r);
      const FrenetResidual res = frenet_residual(field, jet.r);
      const double tangency = std::abs(inner_e(fr.l, forms.normal, eps));
      const double orient = inner_e(fr.n, forms.normal, eps) < 0 ? -1.0 : 1.0;
      const double H = orient * curv.H;
      const double coupling = surface_coupling_residual(H, curv.K, fr.kappa, fr.tau);
      const Darboux d = darboux(fr);
      double nu = kNaN;
      try {
        nu = shape_from_congruence(fr.kappa, d.theta, curv.K, spec.l_theta);
      } catch (const Error&) {
      }
      row["kappa"] = fr.kappa;
      row["tau"] = fr.tau;
      row["l"] = vec_json(fr.l);
      row["n"] = vec_json(fr.n);
      row["m"] = vec_json(fr.m);
      row["frenet_residual"] = res.max();
      row["normal_congruence_measure"] = normal_congruence_measure(field, jet.r);
      row["tangency"] = tangency;
      row["H_along_normal"] = H;
      row["coupling_residual"] = coupling;
      row["darboux_angle"] = d.theta;
      row["nu"] = nu;
      frenet_max = std::max(frenet_max, res.max());
      if (tangency <= 1e-6) {
        ++on_surface;
        coupling_max = std::max(coupling_max, std::abs(coupling));
      }
    } catch (const DegenerateError& e) {
      ++kappa_zero;
      row["kappa_zero"] = true;
      row["message"] = e.what();
    }
    rows.push_back(std::move(row));
  }

  json report = {{"command", "congruence"},
                 {"surface", surface_json(config, s)},
                 {"congruence", field.name()},
                 {"l_theta", spec.l_theta},
                 {"h_convention", kHConvention},
                 {"probes", rows},
                 {"summary",
                  {{"probes", probes.size()},
                   {"kappa_zero_probes", kappa_zero},
                   {"tangent_probes", on_surface},
                   {"frenet_residual_max", frenet_max},
                   {"coupling_residual_max_tangent", coupling_max}}}};

  if (spec.flat_v) {
    Expr v1, v2;
    try {
      v1 = parse_expr((*spec.flat_v)[0], kSurfaceVars);
      v2 = parse_expr((*spec.flat_v)[1], kSurfaceVars);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("congruence.flat_state.v: ") + e.what());
    }
    const VectorField v = VectorField::from_expr(c, v1, v2);
    ParamVectorFunction exact;
    if (s.source())
      exact = [v1, v2](double a, double b) {
        const double vars[2] = {a, b};
        return Vector2d(v1.eval<double>(vars), v2.eval<double>(vars));
      };
    const FlatStateReport f =
        flat_state_report(s, v, spec.flat_r, exact, eps, config.tolerances.flat_state);
    report["flat_state"] = {{"r", spec.flat_r},
                            {"developable", f.developable()},
                            {"developability_measure", f.developability.measure},
                            {"divergence_residual", f.divergence_residual},
                            {"coupling_residual", f.coupling_residual},
                            {"flatness", f.flatness},
                            {"tolerance", f.tolerance},
                            {"flat", f.flat()}};
  }
  const fs::path out = prepare_out_dir(config);
  save_text(out / "report.json", dump(report));
  return report;
}

json cmd_energy(const RunConfig& config) {
  const EnergySpec spec = config.energy.value_or(EnergySpec{});
  const SampledSurface s = build_surface(config);
  EnergyDensity density;
  try {
    density = EnergyDensity::parse(spec.density);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("energy.density: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("energy.density: ") + e.what());
  }
  double energy = 0;
  try {
    energy = total_energy(s, density, spec.region, config.signature);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("energy.region: ") + e.what());
  }
  const fs::path out = prepare_out_dir(config);
  json report = {{"command", "energy"},
                 {"surface", surface_json(config, s)},
                 {"density", density.describe()},
                 {"depends_on_K", density.depends_on_K()},
                 {"energy", energy}};
  // The energy quadrature avoids nodes, so a chart reaching a coordinate pole
  // still has an energy even though the residual is undefined there.
  try {
    const ScalarField el = el_residual(s, density, config.signature);
    save_csv(out / "el_residual.csv", s.chart(), {{"el_residual", &el.values()}});
    report["el_residual_max"] = max_over(el, 0, true);
    report["el_residual_max_interior"] = max_over(el, 2, s.source().has_value());
    report["files"] = {"el_residual.csv", "energy.json"};
  } catch (const DegenerateError& e) {
    report["el_residual_max"] = nullptr;
    report["el_residual_error"] = e.what();
    report["files"] = {"energy.json"};
  }
  if (spec.region)
    report["region"] = {{"u1", {spec.region->u1_min, spec.region->u1_max}},
                        {"u2", {spec.region->u2_min, spec.region->u2_max}}};
  save_text(out / "energy.json", dump(report));
  return report;
}

json cmd_export_obj(const RunConfig& config, bool with_grid) {
  const SampledSurface s = build_surface(config);
  const Chart& c = s.chart();
  const fs::path out = prepare_out_dir(config);
  save_obj(out / "surface.obj", s);
  json files = {"surface.obj"};
  if (with_grid) {
    save_grid(out / "surface.grid", s);
    files.push_back("surface.grid");
  }
  return {{"command", "export-obj"},
          {"surface", surface_json(config, s)},
          {"vertices", c.size()},
          {"faces", 2 * (c.n1() - 1) * (c.n2() - 1)},
          {"files", files}};
}

json cmd_estimate(const EstimateArgs& args) {
  const MaterialConstants& m = args.material;
  m.validate();
  const double h = effective_thickness(m.k, m.E2D);
  json j = {{"command", "estimate"},
            {"qualitative", true},
            {"note", "order-of-magnitude estimates for a graphene-like sheet"},
            {"inputs",
             {{"k_eV", m.k}, {"E2D_eV_per_nm2", m.E2D}, {"b_nm", m.b}, {"nu", m.nu}, {"r_nm", args.r}}},
            {"h_eff_nm", h},
            {"h_eff_angstrom", units::nm_to_angstrom(h)},
            {"h_eff_below_1_angstrom", units::nm_to_angstrom(h) < 1.0},
            {"boundary_ratio", boundary_ratio(m.b, args.r)}};
  if (args.l) {
    j["inputs"]["l_nm"] = *args.l;
    j["critical_strain"] = critical_strain(h, *args.l, m.nu);
  }
  return j;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"weylsheet: curvature, thermal states and congruences on parametrised sheets"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  unsigned threads = 0;
  std::optional<double> tolerance;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out-dir", out_dir, "output directory (overrides out_dir in the config)");
  app.add_option("--threads", threads, "worker threads (default: hardware concurrency)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerance, "absolute tolerance of the thermal-state solver");

  CLI::App* curvature = app.add_subcommand("curvature", "fundamental forms and curvatures");
  CLI::App* thermal = app.add_subcommand("thermal", "solve the isothermal state equation");
  CLI::App* congruence = app.add_subcommand("congruence", "Frenet analysis of a congruence");
  CLI::App* energy = app.add_subcommand("energy", "curvature energy and Euler-Lagrange residual");
  CLI::App* export_obj = app.add_subcommand("export-obj", "write the sampled surface as an OBJ mesh");
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the identity suite");
  CLI::App* estimate = app.add_subcommand("estimate", "material estimates (qualitative)");

  bool with_grid = false;
  export_obj->add_flag("--with-grid", with_grid, "also write surface.grid");

  EstimateArgs est;
  std::optional<double> est_l;
  estimate->add_option("--k", est.material.k, "bending rigidity, eV");
  estimate->add_option("--E2D", est.material.E2D, "tensile rigidity, eV/nm^2");
  estimate->add_option("--b", est.material.b, "bond length, nm");
  estimate->add_option("--nu", est.material.nu, "Poisson ratio");
  estimate->add_option("--r", est.r, "flake radius, nm");
  estimate->add_option("--l", est_l, "sheet length for the critical strain, nm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (threads > 0) set_thread_count(threads);

    if (*selfcheck) {
      int passed = 0, total = 0;
      run_selfcheck([&](const CheckResult& r) {
        out << format_result(r) << '\n' << std::flush;
        ++total;
        passed += r.pass() ? 1 : 0;
      });
      out << "selfcheck: " << passed << "/" << total << " passed\n";
      return passed == total ? kOk : kNumerical;
    }
    if (*estimate) {
      est.l = est_l;
      out << dump(cmd_estimate(est));
      return kOk;
    }

    if (config_path.empty()) throw ConfigError("--config is required for this command");
    RunConfig config = load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (tolerance) {
      if (!(*tolerance > 0)) throw ConfigError("--tolerance must be positive");
      config.tolerances.solver = *tolerance;
    }

    json summary;
    if (*curvature) summary = cmd_curvature(config);
    else if (*thermal) summary = cmd_thermal(config);
    else if (*congruence) summary = cmd_congruence(config);
    else if (*energy) summary = cmd_energy(config);
    else if (*export_obj) summary = cmd_export_obj(config, with_grid);
    out << dump(summary);
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DegenerateError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace weylsheet::cli

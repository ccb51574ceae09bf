#include "weylsheet/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "weylsheet/congruence.hpp"
#include "weylsheet/diffops.hpp"
#include "weylsheet/estimates.hpp"
#include "weylsheet/geometry.hpp"
#include "weylsheet/minkowski.hpp"
#include "weylsheet/surface.hpp"
#include "weylsheet/thermal.hpp"
#include "weylsheet/variational.hpp"
#include "weylsheet/weyl.hpp"

namespace weylsheet {

using std::numbers::pi;

bool Measure::ok() const {
  if (!std::isfinite(value)) return false;
  return upper ? value <= bound : value > bound;
}

bool CheckResult::pass() const {
  if (!error.empty()) return false;
  for (const Measure& m : measures)
    if (!m.ok()) return false;
  return !measures.empty();
}

std::string format_result(const CheckResult& r) {
  std::string line = r.pass() ? "PASS" : "FAIL";
  char buf[64];
  std::snprintf(buf, sizeof buf, " %2d ", r.id);
  line += buf;
  line += r.name;
  for (const Measure& m : r.measures) {
    std::snprintf(buf, sizeof buf, "=%.3e%s%.1e", m.value, m.upper ? "<=" : ">", m.bound);
    line += "  " + m.label + buf;
  }
  if (!r.error.empty()) line += "  error: " + r.error;
  return line;
}

namespace {

template <class Body>
CheckResult run_check(int id, std::string name, Body&& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  try {
    body(r.measures);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

void upper(std::vector<Measure>& out, std::string label, double value, double bound) {
  out.push_back({std::move(label), value, bound, true});
}

void lower(std::vector<Measure>& out, std::string label, double value, double bound) {
  out.push_back({std::move(label), value, bound, false});
}

Expr num(double c) { return Expr::constant(c); }

// A smooth random function of (u1,u2): sum of two products of sines.
Expr random_smooth(std::mt19937_64& rng, double amplitude, double max_freq) {
  std::uniform_real_distribution<double> freq(-max_freq, max_freq), phase(0.0, 2 * pi),
      amp(-amplitude, amplitude);
  const Expr u1 = Expr::variable(0), u2 = Expr::variable(1);
  Expr out = num(amp(rng));
  for (int k = 0; k < 2; ++k) {
    const double a = amp(rng), f1 = freq(rng), f2 = freq(rng), p1 = phase(rng), p2 = phase(rng);
    out = out + num(a) * sin(num(f1) * u1 + num(p1)) * cos(num(f2) * u2 + num(p2));
  }
  return out;
}

double log2_ratio(double coarse, double fine) { return std::log2(coarse / fine); }

// --- criterion 3 -----------------------------------------------------------

struct EgregiumErrors {
  double analytic = 0;
  double grid = 0;
};

double curvature_scale(const std::vector<double>& K, double diameter) {
  double m = 1.0 / (diameter * diameter);
  for (double k : K) m = std::max(m, std::abs(k));
  return m;
}

double analytic_egregium_error(const CatalogSurface& cs, int n) {
  const Chart chart = cs.chart.with_resolution(n, n);
  const SampledSurface s = SampledSurface::from_expr(cs.expr, chart);
  std::vector<double> Kex(chart.size()), Kin(chart.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u1 = chart.coord(0, i), u2 = chart.coord(1, j);
      Kex[chart.index(i, j)] = curvatures(fundamental_forms(eval_jet(cs.expr, u1, u2))).K;
      Kin[chart.index(i, j)] = intrinsic_gauss_curvature(induced_metric_jet(cs.expr, u1, u2));
    }
  const double scale = curvature_scale(Kex, s.diameter());
  double err = 0;
  for (std::size_t k = 0; k < Kex.size(); ++k) err = std::max(err, std::abs(Kin[k] - Kex[k]));
  return err / scale;
}

double grid_egregium_error(const CatalogSurface& cs, int n) {
  const Chart chart = cs.chart.with_resolution(n, n);
  const SampledSurface exact = SampledSurface::from_expr(cs.expr, chart);
  const SampledSurface s = exact.sampled();
  const ScalarField Kex = surface_geometry(s).K();
  const ScalarField Kin = intrinsic_gauss_curvature(s.induced_metric());
  const double scale = curvature_scale(surface_geometry(exact).K().values(), exact.diameter());
  double err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (chart.interior(i, j, 2)) err = std::max(err, std::abs(Kin(i, j) - Kex(i, j)));
  return err / scale;
}

// --- criterion 7/8 probes --------------------------------------------------

struct SurfaceProbe {
  double H, K, kappa, tau;
};

SurfaceProbe sphere_probe(double R, double u1, double u2) {
  CatalogParams p;
  p.values["R"] = R;
  const CatalogSurface cs = catalog("sphere", p);
  const FundamentalForms f = fundamental_forms(eval_jet(cs.expr, u1, u2));
  const CurvatureData cd = curvatures(f);
  const FrenetFrame F = frenet_at(congruence_catalog("meridian"), cs.expr.position(u1, u2));
  return {cd.H, cd.K, F.kappa, F.tau};
}

SurfaceProbe cylinder_probe(double rho, double u1, double u2) {
  CatalogParams p;
  p.values["rho"] = rho;
  const CatalogSurface cs = catalog("cylinder", p);
  const FundamentalForms f = fundamental_forms(eval_jet(cs.expr, u1, u2));
  const CurvatureData cd = curvatures(f);
  const FrenetFrame F = frenet_at(congruence_catalog("circular"), cs.expr.position(u1, u2));
  return {cd.H, cd.K, F.kappa, F.tau};
}

const std::vector<Vector3d>& probe_points() {
  static const std::vector<Vector3d> pts{{1.3, 0.4, 0.5}, {-0.7, 1.1, -0.6}, {0.9, -1.2, 0.8},
                                         {1.6, 0.9, -0.3}};
  return pts;
}

}  // namespace

// ---------------------------------------------------------------------------

CheckResult check_effective_thickness() {
  return run_check(1, "effective-thickness", [](std::vector<Measure>& m) {
    const double h = effective_thickness(1.0, 2.12e3);
    const double expected = std::sqrt(12.0 / 2120.0);
    upper(m, "rel_err", std::abs(h - expected) / expected, 1e-12);
    upper(m, "h_nm", h, 0.1);  // below 1 angstrom
    upper(m, "abs(h-0.0752)", std::abs(h - 0.0752), 5e-5);
  });
}

CheckResult check_boundary_ratio() {
  return run_check(2, "boundary-ratio", [](std::vector<Measure>& m) {
    const double b = units::angstrom_to_nm(1.42);
    const double r = units::um_to_nm(0.75);
    const double ratio = boundary_ratio(b, r);
    const double expected = 1.5 * std::sqrt(3.0) * 0.142 / 750.0;
    upper(m, "rel_err", std::abs(ratio - expected) / expected, 1e-12);
    upper(m, "rel_dev_from_5e-4", std::abs(ratio - 5e-4) / 5e-4, 0.02);
  });
}

CheckResult check_theorema_egregium() {
  return run_check(3, "theorema-egregium", [](std::vector<Measure>& m) {
    double analytic = 0, grid = 0, worst_order = 1e300;
    for (const std::string& name : catalog_names()) {
      const CatalogSurface cs = catalog(name);
      analytic = std::max(analytic, analytic_egregium_error(cs, 17));
      const double e17 = grid_egregium_error(cs, 17);
      const double e33 = grid_egregium_error(cs, 33);
      const double e65 = grid_egregium_error(cs, 65);
      grid = std::max(grid, e65);
      // surfaces whose discrete curvature is exact carry no convergence signal
      if (e65 > 1e-9) worst_order = std::min({worst_order, log2_ratio(e17, e33), log2_ratio(e33, e65)});
    }
    upper(m, "analytic_rel", analytic, 1e-6);
    upper(m, "grid65_rel", grid, 1e-3);
    lower(m, "min_order", worst_order, 1.8);
  });
}

CheckResult check_weyl() {
  return run_check(4, "weyl-metricity-gauge", [](std::vector<Measure>& m) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> point(-1.0, 1.0);
    const Expr u1 = Expr::variable(0), u2 = Expr::variable(1);
    double metricity = 0, gauge = 0, field = 0, corrupted = 1e300;
    for (int trial = 0; trial < 20; ++trial) {
      const Expr a11 = num(1.5) + num(0.5) * sin(random_smooth(rng, 1.0, 1.5));
      const Expr a22 = num(1.5) + num(0.5) * cos(random_smooth(rng, 1.0, 1.5));
      const Expr a12 = num(0.5) * sin(random_smooth(rng, 1.0, 1.5));
      const Expr w1 = random_smooth(rng, 0.8, 1.5), w2 = random_smooth(rng, 0.8, 1.5);
      const Expr sigma = random_smooth(rng, 0.5, 1.5);
      const double x = point(rng), y = point(rng);
      const MetricJet a = metric_jet(a11, a12, a22, x, y);
      const CovectorJet w = covector_jet(w1, w2, x, y);
      metricity = std::max(metricity, max_abs(metricity_residual(a, w.w)));

      const ScalarJet s = scalar_jet(sigma, x, y);
      const auto [at, wt] = gauge_transform(a, w, s);
      const Christoffel g0 = weyl_connection(a, w.w), g1 = weyl_connection(at, wt.w);
      for (int k = 0; k < 2; ++k) gauge = std::max(gauge, (g0[k] - g1[k]).cwiseAbs().maxCoeff());
      // ε -> ε - dσ leaves F unchanged
      CovectorJet shifted = w;
      shifted.w -= s.d;
      shifted.dw -= s.dd;
      field = std::max(field, std::abs(field_strength(w) - field_strength(shifted)));

      Christoffel bad = g0;
      bad[trial % 2](trial % 2, 1 - trial % 2) += 0.1;
      bad[trial % 2](1 - trial % 2, trial % 2) += 0.1;
      corrupted = std::min(corrupted, max_abs(metricity_residual(a, w.w, bad)));
    }
    upper(m, "metricity", metricity, 1e-8);
    upper(m, "gauge_connection", gauge, 1e-8);
    upper(m, "gauge_F", field, 1e-8);
    lower(m, "corrupted_detected", corrupted, 0.05);
  });
}

CheckResult check_thermal_solver() {
  return run_check(5, "thermal-solver", [](std::vector<Measure>& m) {
    // manufactured solution on a curved graph metric
    const CatalogSurface graph = catalog("graph");
    const Expr u1 = Expr::variable(0), u2 = Expr::variable(1);
    const Expr sigma_star =
        num(0.5) * sin(num(1.3) * u1 + num(0.4)) * cos(num(0.9) * u2) + num(0.2) * u1 * u2;
    const double r = 1.0;
    std::vector<double> errors;
    for (int n : {17, 33, 65}) {
      const Chart chart = graph.chart.with_resolution(n, n);
      const MetricField metric = SampledSurface::from_expr(graph.expr, chart).induced_metric();
      const ScalarField exact = ScalarField::from_expr(chart, sigma_star);
      const ScalarField K = ScalarField::from_function(chart, [&](double x, double y) {
        return 0.5 * r - laplace_beltrami_divergence_form(induced_metric_jet(graph.expr, x, y),
                                                          scalar_jet(sigma_star, x, y));
      });
      ThermalStateProblem problem{metric, K, r, exact.sampled(), 1e-12, 0};
      const SolveReport rep = solve_sigma(problem);
      double err = 0;
      for (std::size_t k = 0; k < chart.size(); ++k)
        err = std::max(err, std::abs(rep.sigma.values()[k] - exact.values()[k]));
      errors.push_back(err);
    }
    upper(m, "mms_err65", errors[2], 1e-3);
    lower(m, "mms_order1", log2_ratio(errors[0], errors[1]), 1.8);
    lower(m, "mms_order2", log2_ratio(errors[1], errors[2]), 1.8);

    // unit sphere with r = 2: σ ≡ 0
    const CatalogSurface sphere = catalog("sphere");
    const MetricField sm = SampledSurface::from_expr(sphere.expr, sphere.chart).induced_metric();
    ThermalStateProblem sp{sm, ScalarField(sphere.chart, 1.0), 2.0, std::nullopt, 0.0, 0};
    const SolveReport srep = solve_sigma(sp);
    upper(m, "sphere_sigma", srep.sigma.max_abs(), srep.tolerance);

    // sign constancy of K_θ on the flat chart
    const Chart flat(0, 1, 0, 1, 33, 33);
    const MetricField fm = MetricField::flat(flat);
    bool verdicts = true;
    for (double rr : {-4.0, 0.0, 4.0}) {
      ThermalStateProblem fp{fm, ScalarField(flat, 0.0), rr, std::nullopt, 0.0, 0};
      const SolveReport frep = solve_sigma(fp);
      const ScalarField Kt =
          conformal_curvature(ScalarField(flat, 0.0), frep.sigma, fm, LaplacianScheme::Flux);
      const SignVerdict v = sign_verdict(Kt, frep.solved, frep.tolerance);
      verdicts = verdicts && (rr > 0 ? v.positive : rr < 0 ? v.negative : v.zero);
    }
    upper(m, "sign_verdicts_failed", verdicts ? 0.0 : 1.0, 0.0);
  });
}

CheckResult check_conformal_law() {
  return run_check(6, "conformal-law", [](std::vector<Measure>& m) {
    CatalogParams params;
    params.expression = "0.3*sin(u1 + 2*u2)";
    const CatalogSurface graph = catalog("graph", params);
    const Chart chart(0, 1, 0, 1, 65, 65);
    const SampledSurface s = SampledSurface::from_expr(graph.expr, chart);
    const MetricField metric = s.induced_metric().sampled();
    const ScalarField K = intrinsic_gauss_curvature(metric);
    std::mt19937_64 rng(7);
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField sigma = ScalarField::from_expr(chart, random_smooth(rng, 0.3, 2.0)).sampled();
      const ScalarField law = conformal_curvature(K, sigma, metric);
      const ScalarField direct = intrinsic_gauss_curvature(conformal_metric(metric, sigma));
      for (int i = 0; i < chart.n1(); ++i)
        for (int j = 0; j < chart.n2(); ++j)
          if (chart.interior(i, j, 2)) worst = std::max(worst, std::abs(law(i, j) - direct(i, j)));
    }
    upper(m, "max_abs_diff", worst, 1e-4);
  });
}

CheckResult check_congruence() {
  return run_check(7, "congruence", [](std::vector<Measure>& m) {
    double frenet = 0, cn = 0, cm = 0;
    for (const std::string name : {"circular", "helix", "meridian", "gradient", "sheared"}) {
      const CongruenceField f = congruence_catalog(name);
      for (const Vector3d& p : probe_points()) {
        frenet = std::max(frenet, frenet_residual(f, p).max());
        const CurlDecomposition c = curl_decompose(f, p);
        cn = std::max(cn, std::abs(c.c_n));
        cm = std::max(cm, std::abs(std::abs(c.c_m) - c.kappa));
      }
    }
    upper(m, "frenet", frenet, 1e-5);
    upper(m, "curl_n", cn, 1e-5);
    upper(m, "curl_m_minus_kappa", cm, 1e-5);

    double geodesic = 0, sheared = 1e300;
    const CongruenceField meridian = congruence_catalog("meridian");
    const CongruenceField circular = congruence_catalog("circular");
    const CongruenceField shear = congruence_catalog("sheared");
    for (const Vector3d& p : probe_points()) {
      geodesic = std::max({geodesic, std::abs(normal_congruence_measure(meridian, p)),
                           std::abs(normal_congruence_measure(circular, p))});
      sheared = std::min(sheared, std::abs(normal_congruence_measure(shear, p)));
    }
    upper(m, "normal_congruence_geodesic", geodesic, 1e-6);
    lower(m, "normal_congruence_sheared", sheared, 1e-2);

    double coupling = 0;
    for (double R : {1.0, 2.0})
      for (double u1 : {0.6, 1.4, 2.3}) {
        const SurfaceProbe p = sphere_probe(R, u1, 0.7);
        coupling = std::max(coupling, std::abs(surface_coupling_residual(p.H, p.K, p.kappa, p.tau)));
      }
    for (double rho : {1.0, 2.0})
      for (double u1 : {0.3, 2.0, 4.1}) {
        const SurfaceProbe p = cylinder_probe(rho, u1, 0.25);
        coupling = std::max(coupling, std::abs(surface_coupling_residual(p.H, p.K, p.kappa, p.tau)));
      }
    upper(m, "coupling", coupling, 1e-6);

    const FrenetFrame helix = frenet_at(congruence_catalog("helix", {{"b", 4.0}}), Vector3d(3, 0, 0.5));
    upper(m, "helix_kappa", std::abs(helix.kappa - 0.12), 1e-6);
    upper(m, "helix_tau", std::abs(helix.tau - 0.16), 1e-6);
  });
}

CheckResult check_shape_parameter() {
  return run_check(8, "shape-parameter", [](std::vector<Measure>& m) {
    const double l_theta = 1.7;
    double worst = 0;
    int qualifying = 0;
    for (double R : {1.0, 2.0, 5.0})
      for (double u1 : {0.7, 1.2, 2.0})
        for (double u2 : {0.3, 2.5}) {
          const SurfaceProbe p = sphere_probe(R, u1, u2);
          if (std::abs(surface_coupling_residual(p.H, p.K, p.kappa, p.tau)) > 1e-6) continue;
          ++qualifying;
          const double theta = std::atan2(p.kappa, p.tau);
          const double nu129 = shape_from_congruence(p.kappa, theta, p.K, l_theta);
          const double nu111 = p.H / (l_theta * p.K);
          worst = std::max(worst, std::abs(nu129 - nu111));
        }
    upper(m, "max_abs_diff", worst, 1e-8);
    lower(m, "qualifying_probes", qualifying, 0.5);
  });
}

CheckResult check_variational() {
  return run_check(9, "variational", [](std::vector<Measure>& m) {
    const CatalogSurface cat = catalog("catenoid");
    const SampledSurface cs = SampledSurface::from_expr(cat.expr, cat.chart);
    upper(m, "catenoid_const", el_residual(cs, EnergyDensity::constant(1.0)).max_abs(), 1e-4);

    const CatalogSurface sph = catalog("sphere");
    const SampledSurface ss = SampledSurface::from_expr(sph.expr, sph.chart);
    upper(m, "sphere_willmore", el_residual(ss, EnergyDensity::willmore()).max_abs(), 1e-4);

    double energy = 0;
    for (double R : {1.0, 2.0, 5.0}) {
      CatalogParams p;
      p.values["R"] = R;
      const CatalogSurface full = catalog("sphere", p);
      const Chart chart(0, pi, 0, 2 * pi, 129, 129, false, true);
      const SampledSurface s = SampledSurface::from_expr(full.expr, chart);
      energy = std::max(energy, std::abs(total_energy(s, EnergyDensity::willmore()) - 4 * pi));
    }
    upper(m, "willmore_energy_4pi", energy, 1e-3);
  });
}

CheckResult check_minkowski() {
  return run_check(10, "minkowski", [](std::vector<Measure>& m) {
    const Vector3d n(0, 0, 1), s(1, 0, 0);
    upper(m, "nn_h_plus_1", std::abs(inner_h(n, n, n) + 1.0), 0.0);
    const auto [ep, em] = isotropic_pair(s, n);
    const double iso = std::max({std::abs(inner_h(ep, ep, n)), std::abs(inner_h(em, em, n)),
                                 std::abs(inner_h(ep, em, n) - 1.0)});
    upper(m, "isotropy", iso, 4.5e-16);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double orth = 0;
    for (int k = 0; k < 100; ++k) {
      const Vector3d u(d(rng), d(rng), d(rng)), v(d(rng), d(rng), d(rng));
      Vector3d nn(d(rng), d(rng), d(rng));
      nn.normalize();
      const Vector3d c = cross_h(u, v, nn);
      const double scale = u.norm() * v.norm();
      orth = std::max({orth, std::abs(inner_h(c, u, nn)) / (scale * u.norm()),
                       std::abs(inner_h(c, v, nn)) / (scale * v.norm())});
    }
    upper(m, "cross_h_orthogonality", orth, 1e-12);

    const CongruenceField f = congruence_catalog("minkowski_helix");
    double frenet = 0;
    for (const Vector3d& p : {Vector3d(0.2, 0.1, 1.5), Vector3d(-0.5, 0.3, 2.0), Vector3d(0.7, -0.4, 1.8)}) {
      const FrenetResidual r = frenet_residual(f, p);
      frenet = std::max(frenet, std::max({r.tangent, r.normal, r.binormal}));
      upper(m, "orthonormality", r.orthonormality, 1e-10);
    }
    upper(m, "frenet_eps_minus", frenet, 1e-5);
  });
}

CheckResult check_grid_round_trip() {
  return run_check(11, "grid-round-trip", [](std::vector<Measure>& m) {
    const CatalogSurface torus = catalog("torus");
    const SampledSurface s = SampledSurface::from_expr(torus.expr, torus.chart);
    std::ostringstream os;
    write_grid(os, s);
    std::istringstream is(os.str());
    const SampledSurface back = read_grid(is);
    double mismatches = back.chart() == s.chart() ? 0 : 1;
    for (std::size_t k = 0; k < s.positions().size(); ++k)
      if (back.positions()[k] != s.positions()[k]) ++mismatches;
    upper(m, "mismatched_nodes", mismatches, 0.0);
  });
}

std::vector<CheckResult> run_selfcheck(const std::function<void(const CheckResult&)>& on_result) {
  using Fn = CheckResult (*)();
  const Fn checks[] = {check_effective_thickness, check_boundary_ratio, check_theorema_egregium,
                       check_weyl,                check_thermal_solver, check_conformal_law,
                       check_congruence,          check_shape_parameter, check_variational,
                       check_minkowski,           check_grid_round_trip};
  std::vector<CheckResult> out;
  for (Fn fn : checks) {
    out.push_back(fn());
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace weylsheet

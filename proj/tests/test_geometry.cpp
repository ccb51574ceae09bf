#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/geometry.hpp"
#include "weylsheet/minkowski.hpp"

using namespace weylsheet;
using std::numbers::pi;

namespace {
CatalogSurface sphere_of(double R, int n = 33) {
  CatalogParams p;
  p.values["R"] = R;
  return catalog("sphere", p, n);
}
}  // namespace

TEST_CASE("plane has flat forms") {
  const FundamentalForms f = fundamental_forms(eval_jet(parse_surface("u1;u2;0"), 0.2, 0.4));
  CHECK(f.E == 1);
  CHECK(f.F == 0);
  CHECK(f.G == 1);
  CHECK(f.L == 0);
  CHECK(f.M == 0);
  CHECK(f.N == 0);
  const CurvatureData k = curvatures(f);
  CHECK(k.K == 0);
  CHECK(k.H == 0);
}

TEST_CASE("sphere and cylinder curvatures") {
  for (double R : {1.0, 2.0, 5.0}) {
    const CatalogSurface s = sphere_of(R);
    const CurvatureData k = curvatures(fundamental_forms(eval_jet(s.expr, 1.1, 0.7)));
    CHECK(k.K == doctest::Approx(1 / (R * R)).epsilon(1e-13));
    CHECK(k.H == doctest::Approx(1 / R).epsilon(1e-13));  // inward normal
    // umbilic: the square root of H^2 - K loses half the digits
    CHECK(k.kappa1 == doctest::Approx(1 / R).epsilon(1e-7));
    CHECK(k.kappa2 == doctest::Approx(1 / R).epsilon(1e-7));
  }
  CatalogParams p;
  p.values["rho"] = 2;
  const CatalogSurface cyl = catalog("cylinder", p);
  const FundamentalForms f = fundamental_forms(eval_jet(cyl.expr, 0.3, 0.2));
  const CurvatureData k = curvatures(f);
  CHECK(std::abs(k.K) < 1e-15);
  CHECK(k.H == doctest::Approx(0.25));
  // the normal points to the axis
  const Vector3d r = cyl.expr.position(0.3, 0.2);
  CHECK(f.normal.dot(Vector3d(r[0], r[1], 0)) < 0);
}

TEST_CASE("principal curvatures solve the characteristic equation") {
  std::mt19937_64 rng(5);
  for (const std::string& name : catalog_names()) {
    const CatalogSurface cs = catalog(name);
    for (int t = 0; t < 20; ++t) {
      const auto [a, b] = oracle::interior_point(rng, cs.chart);
      const CurvatureData k = curvatures(fundamental_forms(eval_jet(cs.expr, a, b)));
      for (double kap : {k.kappa1, k.kappa2}) {
        const double scale = std::max({1.0, kap * kap, std::abs(k.K)});
        CHECK(std::abs(kap * kap - 2 * k.H * kap + k.K) / scale <= 1e-12);
      }
      CHECK(k.kappa1 >= k.kappa2);
    }
  }
}

TEST_CASE("normal curvature is bracketed by the principal curvatures") {
  std::mt19937_64 rng(8);
  for (const std::string name : {"torus", "saddle", "graph", "helicoid"}) {
    const CatalogSurface cs = catalog(name);
    const auto [a, b] = oracle::interior_point(rng, cs.chart);
    const FundamentalForms f = fundamental_forms(eval_jet(cs.expr, a, b));
    const CurvatureData k = curvatures(f);
    double lo = 1e300, hi = -1e300;
    for (int d = 0; d < 360; ++d) {
      const double t = d * pi / 180;
      const double kn = normal_curvature(f, Vector2d(std::cos(t), std::sin(t)));
      lo = std::min(lo, kn);
      hi = std::max(hi, kn);
    }
    CHECK(lo >= k.kappa2 - 1e-6);
    CHECK(hi <= k.kappa1 + 1e-6);
    CHECK(lo == doctest::Approx(k.kappa2).epsilon(1e-3));
    CHECK(hi == doctest::Approx(k.kappa1).epsilon(1e-3));
  }
}

TEST_CASE("rigid motions leave the forms unchanged") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Quaterniond q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
    const Eigen::Matrix3d Q = q.toRotationMatrix();
    const Vector3d shift(g(rng), g(rng), g(rng));
    const CatalogSurface cs = catalog(catalog_names()[t % 8]);
    const auto [a, b] = oracle::interior_point(rng, cs.chart);
    const SurfaceJet j = eval_jet(cs.expr, a, b);
    SurfaceJet m = j;
    m.r = Q * j.r + shift;
    m.r1 = Q * j.r1;
    m.r2 = Q * j.r2;
    m.r11 = Q * j.r11;
    m.r12 = Q * j.r12;
    m.r22 = Q * j.r22;
    const FundamentalForms f0 = fundamental_forms(j), f1 = fundamental_forms(m);
    const CurvatureData k0 = curvatures(f0), k1 = curvatures(f1);
    for (auto [x, y] : {std::pair{f0.E, f1.E}, {f0.F, f1.F}, {f0.G, f1.G}, {f0.L, f1.L}, {f0.M, f1.M},
                        {f0.N, f1.N}, {k0.K, k1.K}, {k0.H, k1.H}})
      CHECK(std::abs(x - y) <= 1e-10);
  }
}

TEST_CASE("sphere Christoffel symbols") {
  const CatalogSurface s = sphere_of(1);
  const double t = 1.0;
  const Christoffel g = christoffel(induced_metric_jet(s.expr, t, 0.4));
  CHECK(g[0](1, 1) == doctest::Approx(-std::sin(t) * std::cos(t)).epsilon(1e-13));
  CHECK(g[1](0, 1) == doctest::Approx(std::cos(t) / std::sin(t)).epsilon(1e-13));
  CHECK(g[1](1, 0) == g[1](0, 1));
  CHECK(std::abs(g[0](0, 0)) < 1e-14);
  CHECK(std::abs(g[1](1, 1)) < 1e-14);
}

TEST_CASE("intrinsic and extrinsic Gaussian curvature agree (analytic)") {
  std::mt19937_64 rng(1);
  for (const std::string& name : catalog_names()) {
    CAPTURE(name);
    const CatalogSurface cs = catalog(name);
    for (int t = 0; t < 25; ++t) {
      const auto [a, b] = oracle::interior_point(rng, cs.chart);
      const double Kin = intrinsic_gauss_curvature(induced_metric_jet(cs.expr, a, b));
      const double Kex = curvatures(fundamental_forms(eval_jet(cs.expr, a, b))).K;
      CHECK(std::abs(Kin - Kex) <= 1e-6 * std::max(1.0, std::abs(Kex)));
    }
  }
}

TEST_CASE("grid curvature of the unit sphere metric") {
  const CatalogSurface s = sphere_of(1, 65);
  const SampledSurface grid = SampledSurface::from_expr(s.expr, s.chart).sampled();
  const ScalarField K = intrinsic_gauss_curvature(grid.induced_metric());
  double worst = 0;
  for (int i = 0; i < 65; ++i)
    for (int j = 0; j < 65; ++j) worst = std::max(worst, std::abs(K(i, j) - 1));
  CHECK(worst <= 1e-4);
}

TEST_CASE("Gauss-Weingarten equations hold") {
  std::mt19937_64 rng(4);
  for (const std::string& name : catalog_names()) {
    CAPTURE(name);
    const CatalogSurface cs = catalog(name);
    for (int t = 0; t < 10; ++t) {
      const auto [a, b] = oracle::interior_point(rng, cs.chart);
      CHECK(gauss_weingarten_residual(cs.expr, a, b).max_norm() <= 1e-6);
    }
  }
  const CatalogSurface torus = catalog("torus", {}, 65);
  const SampledSurface grid = SampledSurface::from_expr(torus.expr, torus.chart).sampled();
  CHECK(gauss_weingarten_residual(grid, 20, 30).max_norm() <= 3e-3);
}

TEST_CASE("catenoid is minimal") {
  CatalogParams p;
  p.values["c"] = 1;
  const CatalogSurface cs = catalog("catenoid", p);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const auto [a, b] = oracle::interior_point(rng, cs.chart, 0);
    CHECK(std::abs(curvatures(fundamental_forms(eval_jet(cs.expr, a, b))).H) <= 1e-12);
  }
}

TEST_CASE("degenerate points are refused") {
  const SurfaceExpr s = sphere_of(1).expr;
  CHECK_THROWS_AS(fundamental_forms(eval_jet(s, 0.0, 0.3)), DegenerateError);
  CHECK_THROWS_AS(fundamental_forms(eval_jet(parse_surface("u1; u1; u1"), 0.1, 0.2)), DegenerateError);
}

TEST_CASE("developability") {
  const CatalogSurface cyl = catalog("cylinder");
  CHECK(developability(SampledSurface::from_expr(cyl.expr, cyl.chart)).is_developable);
  const CatalogSurface sph = sphere_of(1);
  CHECK_FALSE(developability(SampledSurface::from_expr(sph.expr, sph.chart)).is_developable);
  const CatalogSurface plane = catalog("plane");
  CHECK(developability(SampledSurface::from_expr(plane.expr, plane.chart).sampled()).is_developable);
}

TEST_CASE("surface geometry fields") {
  const CatalogSurface s = sphere_of(2, 17);
  const SurfaceGeometry g = surface_geometry(SampledSurface::from_expr(s.expr, s.chart));
  const ScalarField K = g.K(), H = g.H();
  for (double k : K.values()) CHECK(k == doctest::Approx(0.25));
  for (double h : H.values()) CHECK(h == doctest::Approx(0.5));
  // LN - M^2 carries sin^2 u1 and vanishes at the poles
  const ScalarField d = g.det_b();
  for (int i = 1; i + 1 < 17; ++i)
    for (int j = 0; j < 17; ++j) CHECK(d(i, j) > 0);
}

TEST_CASE("space-like surfaces with the Lorentzian signature") {
  // z = 0.3 (u1^2 + u2^2) is space-like near the origin in diag(1, 1, -1)
  const SurfaceExpr s = parse_surface("u1; u2; 0.3*(u1^2 + u2^2)");
  const FundamentalForms f = fundamental_forms(eval_jet(s, 0.2, -0.1), -1);
  CHECK(f.E == doctest::Approx(1 - 0.36 * 0.04));
  CHECK(inner_e(f.normal, f.normal, -1) == doctest::Approx(-1));
  const double Kin = intrinsic_gauss_curvature(induced_metric_jet(s, 0.2, -0.1, -1));
  const double Kex = curvatures(f).K;
  // det b / det a carries the sign of (n, n) relative to the intrinsic curvature
  CHECK(std::abs(Kin + Kex) <= 1e-10);
  const double Kin0 = intrinsic_gauss_curvature(induced_metric_jet(s, 0, 0, -1));
  CHECK(Kin0 == doctest::Approx(-0.36));
  CHECK_THROWS_AS(fundamental_forms(eval_jet(parse_surface("u1; 0; u2"), 0.1, 0.1), -1), DegenerateError);
}

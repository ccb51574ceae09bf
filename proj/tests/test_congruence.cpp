#include <doctest.h>

#include <cmath>
#include <numbers>

#include "weylsheet/congruence.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/surface.hpp"

using namespace weylsheet;
using doctest::Approx;
using std::numbers::pi;

TEST_CASE("circle on a cylinder") {
  const CongruenceField f = congruence_catalog("circular");
  const Vector3d p(2, 0, 0.3);
  const FrenetFrame fr = frenet_at(f, p);
  CHECK(fr.kappa == Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(fr.tau) <= 1e-8);
  CHECK((fr.l - Vector3d(0, 1, 0)).norm() <= 1e-10);
  CHECK((fr.n - Vector3d(-1, 0, 0)).norm() <= 1e-8);
  CHECK(frenet_residual(f, p).max() <= 1e-6);
}

TEST_CASE("helix curvature and torsion") {
  // radius 3, pitch parameter 4: κ = 3/25, τ = 4/25
  const CongruenceField f = congruence_catalog("helix", {{"b", 4.0}});
  for (double phi : {0.0, 1.0, 2.5}) {
    const Vector3d p(3 * std::cos(phi), 3 * std::sin(phi), 0.7);
    const FrenetFrame fr = frenet_at(f, p);
    CHECK(fr.kappa == Approx(0.12).epsilon(1e-8));
    CHECK(fr.tau == Approx(0.16).epsilon(1e-8));
    CHECK(frenet_residual(f, p).max() <= 1e-6);
    const Darboux d = darboux(fr);
    CHECK(d.theta == Approx(std::atan2(3.0, 4.0)).epsilon(1e-8));
    CHECK((d.d - (fr.tau * fr.l + fr.kappa * fr.m)).norm() <= 1e-10);
  }
}

TEST_CASE("Frenet residuals are small across the catalog") {
  for (const std::string& name : congruence_names()) {
    if (name == "constant" || name == "radial_inward" || name == "axial_inward") continue;  // straight lines
    CAPTURE(name);
    const CongruenceField f = congruence_catalog(name);
    const Vector3d p = f.lo() + 0.37 * (f.hi() - f.lo()) + Vector3d(0.05, 0.11, 0.02);
    const FrenetResidual r = frenet_residual(f, p);
    CHECK(r.max() <= 1e-5);
    CHECK(r.orthonormality <= 1e-8);
  }
}

TEST_CASE("curl decomposition") {
  const CongruenceField circ = congruence_catalog("circular");
  const CurlDecomposition c = curl_decompose(circ, Vector3d(2, 0, 0));
  CHECK(std::abs(c.omega) <= 1e-8);
  CHECK(c.c_m == Approx(c.kappa).epsilon(1e-8));

  const CongruenceField helix = congruence_catalog("helix");
  const Vector3d p(3, 0, 0);
  const CurlDecomposition h = curl_decompose(helix, p);
  CHECK(h.c_m == Approx(h.kappa).epsilon(1e-8));
  // recombined vector against a direct curl of l
  const FrenetFrame fr = frenet_at(helix, p);
  const Vector3d direct = curl3(Metric3::signature(1), [&](const Vector3d& q) { return helix.l(q); }, p, 1e-3);
  CHECK((direct - (h.omega * fr.l + h.c_m * fr.m + h.c_n * fr.n)).norm() <= 1e-8);
}

TEST_CASE("normal congruences") {
  // meridians are geodesics on the spheres around the origin
  const CongruenceField mer = congruence_catalog("meridian");
  CHECK(std::abs(normal_congruence_measure(mer, Vector3d(0.6, 0.3, 0.8))) <= 1e-6);
  const CongruenceField sh = congruence_catalog("sheared", {{"alpha", 0.5}});
  CHECK(std::abs(normal_congruence_measure(sh, Vector3d(1.5, 0.2, 0.3))) > 1e-3);
}

TEST_CASE("coupling to the surface curvature") {
  for (double R : {1.0, 2.0, 5.0}) CHECK(std::abs(surface_coupling_residual(1 / R, 1 / (R * R), 1 / R, 0)) <= 1e-14);
  CHECK(std::abs(surface_coupling_residual(0.25, 0.0, 0.5, 0.0)) <= 1e-14);  // cylinder ρ = 2
  CHECK(std::abs(surface_coupling_residual(0.25, 0.0, 0.5, 0.1)) > 1e-3);

  // meridian on a sphere of radius 2, ϑ = π/2: ν = R / l
  CHECK(shape_from_congruence(0.5, pi / 2, 0.25, 1.0) == Approx(2));
  CHECK(shape_from_congruence(0.5, pi / 2, 0.25, 2.0) == Approx(1));

  const FrenetFrame fr = frenet_at(congruence_catalog("circular"), Vector3d(0, 2, 0));
  CHECK(darboux(fr).theta == Approx(pi / 2));
}

TEST_CASE("flat states on the cylinder") {
  CatalogParams p;
  p.values["rho"] = 2;
  const CatalogSurface cyl = catalog("cylinder", p, 17);
  const SampledSurface s = SampledSurface::from_expr(cyl.expr, cyl.chart);
  const std::vector<Vector2d> around(cyl.chart.size(), Vector2d(1, 0)), along(cyl.chart.size(), Vector2d(0, 1));

  const FlatStateReport circle = flat_state_report(s, VectorField(cyl.chart, around), 0.0,
                                                   [](double, double) { return Vector2d(1, 0); });
  CHECK(circle.developable());
  CHECK(circle.flat());
  CHECK(circle.coupling_residual <= 1e-8);

  const FlatStateReport axis = flat_state_report(s, VectorField(cyl.chart, along), 0.0,
                                                 [](double, double) { return Vector2d(0, 1); });
  CHECK(axis.flat());

  // grid path
  const FlatStateReport grid = flat_state_report(s.sampled(), VectorField(cyl.chart, around), 0.0);
  CHECK(grid.coupling_residual <= 1e-2);

  // wrong r
  CHECK_FALSE(flat_state_report(s, VectorField(cyl.chart, around), 1.0).flat());

  const std::vector<Vector2d> zero(cyl.chart.size(), Vector2d::Zero());
  CHECK_THROWS_AS(flat_state_report(s, VectorField(cyl.chart, zero), 0.0), DegenerateError);
}

TEST_CASE("the sphere admits no flat state") {
  const CatalogSurface sph = catalog("sphere", {}, 17);
  const SampledSurface s = SampledSurface::from_expr(sph.expr, sph.chart);
  const std::vector<Vector2d> v(sph.chart.size(), Vector2d(0, 1));
  const FlatStateReport r = flat_state_report(s, VectorField(sph.chart, v), 0.0);
  CHECK_FALSE(r.developable());
  CHECK_FALSE(r.flat());
  CHECK(r.flatness > 1e-2);
}

TEST_CASE("mean curvature from the normal field") {
  const Field3 n = [](const Vector3d& p) -> Vector3d { return -Vector3d(p[0], p[1], 0) / std::hypot(p[0], p[1]); };
  const NormalCurvatureEstimate e = mean_curv_from_normal(n, Vector3d(2, 0, 0.1), 1e-3, 0.5, 0.0);
  CHECK(e.div_n == Approx(-0.5).epsilon(1e-8));
  CHECK(e.H == Approx(0.25).epsilon(1e-8));
  CHECK(std::abs(e.K) <= 1e-8);

  const Field3 radial = [](const Vector3d& p) -> Vector3d { return -p.normalized(); };
  const NormalCurvatureEstimate s = mean_curv_from_normal(radial, Vector3d(0, 0, 2), 1e-3, 0.5, 0.0);
  CHECK(s.H == Approx(0.5).epsilon(1e-8));
  CHECK(s.K == Approx(0.25).epsilon(1e-8));
}

TEST_CASE("Lorentzian helix") {
  const CongruenceField f = congruence_catalog("minkowski_helix");
  CHECK(f.signature() == -1);
  const Vector3d p(0.2, 0.1, 2.0);
  const FrenetFrame fr = frenet_at(f, p);
  CHECK(inner_e(fr.l, fr.l, -1) == Approx(1).epsilon(1e-12));
  CHECK(inner_e(fr.n, fr.n, -1) == Approx(-1).epsilon(1e-8));
  CHECK(std::abs(inner_e(fr.l, fr.n, -1)) <= 1e-8);
  CHECK(frenet_residual(f, p).max() <= 1e-5);
}

TEST_CASE("degenerate congruences") {
  CHECK_THROWS_AS(frenet_at(congruence_catalog("constant"), Vector3d(0.1, 0.2, 0.3)), DegenerateError);
  const CongruenceField zero("zero", [](const Vector3d&) { return Vector3d::Zero(); }, 1, -Vector3d::Ones(),
                             Vector3d::Ones());
  CHECK_THROWS_AS(zero.l(Vector3d::Zero()), DegenerateError);
  CHECK_THROWS_AS(congruence_catalog("spiral"), DomainError);
}

TEST_CASE("congruences from expressions") {
  const std::array<Expr, 3> v{parse_expr("-y", kSpaceVars), parse_expr("x", kSpaceVars), parse_expr("0", kSpaceVars)};
  const CongruenceField f = CongruenceField::from_exprs(v, 1, Vector3d(-3, -3, -1), Vector3d(3, 3, 1));
  CHECK(frenet_at(f, Vector3d(2, 0, 0)).kappa == Approx(0.5).epsilon(1e-8));
}

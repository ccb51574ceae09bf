#include <doctest.h>

#include <cmath>
#include <random>

#include "weylsheet/diffops.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/weyl.hpp"

using namespace weylsheet;
using doctest::Approx;

namespace {

Expr u(std::string_view t) { return parse_expr(t, kSurfaceVars); }

const Expr kA11 = u("2 + sin(u1*u2)"), kA12 = u("0.3*cos(u1 + u2)"), kA22 = u("1.5 + u1^2");

double max_diff(const Christoffel& a, const Christoffel& b) {
  return std::max((a[0] - b[0]).cwiseAbs().maxCoeff(), (a[1] - b[1]).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("Weyl connection satisfies the metricity law") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-1, 1);
  for (int t = 0; t < 50; ++t) {
    const MetricJet m = metric_jet(kA11, kA12, kA22, x(rng), x(rng));
    const Vector2d w(x(rng), x(rng));
    CHECK(max_abs(metricity_residual(m, w)) <= 1e-12);

    Christoffel bad = weyl_connection(m, w);
    bad[0](0, 1) += 0.1;
    bad[0](1, 0) += 0.1;
    CHECK(max_abs(metricity_residual(m, w, bad)) > 1e-2);
  }
}

TEST_CASE("Weyl connection with w = 0 is the Levi-Civita connection") {
  const MetricJet m = metric_jet(kA11, kA12, kA22, 0.4, -0.3);
  CHECK(max_diff(weyl_connection(m, Vector2d::Zero()), christoffel(m)) == 0.0);
}

TEST_CASE("sampled metricity residual is small") {
  const Chart c(-1, 1, -1, 1, 33, 33);
  const MetricField m = MetricField::from_expr(c, kA11, kA12, kA22);
  const CovectorField w = CovectorField::from_expr(c, u("u2"), u("u1^2"));
  CHECK(max_abs(metricity_residual(m, w, 10, 20)) <= 1e-12);
  CHECK(max_abs(metricity_residual(m.sampled(), CovectorField(c, w.values()), 10, 20)) <= 1e-4);
}

TEST_CASE("gauge transformations leave the connection unchanged") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> x(-1, 1);
  const Expr s = u("0.3*sin(u1) + u1*u2^2");
  for (int t = 0; t < 20; ++t) {
    const double a = x(rng), b = x(rng);
    const MetricJet m = metric_jet(kA11, kA12, kA22, a, b);
    const CovectorJet w = covector_jet(u("u2"), u("cos(u1)"), a, b);
    const ScalarJet sigma = scalar_jet(s, a, b);
    const auto [m2, w2] = gauge_transform(m, w, sigma);
    CHECK(m2.a(0, 0) == Approx(std::exp(-2 * sigma.v) * m.a(0, 0)));
    CHECK(w2.w[1] == Approx(w.w[1] - 2 * sigma.d[1]));
    CHECK(max_diff(weyl_connection(m2, w2.w), weyl_connection(m, w.w)) <= 1e-12);
    CHECK(max_abs(metricity_residual(m2, w2.w)) <= 1e-12);
    // the scalar 2K + div w is a density of weight one
    CHECK(weyl_scalar(m2, w2) == Approx(std::exp(2 * sigma.v) * weyl_scalar(m, w)).epsilon(1e-10));
  }
}

TEST_CASE("gauge transformation of fields") {
  const Chart c(0, 1, 0, 1, 9, 9);
  const MetricField m = MetricField::flat(c);
  const CovectorField w = CovectorField::from_expr(c, u("1"), u("0"));
  const ScalarField sigma = ScalarField::from_expr(c, u("0.5*u1"));
  const WeylData g = gauge_transform(m, w, sigma);
  CHECK(g.metric(8, 0)(0, 0) == Approx(std::exp(-1.0)));
  CHECK(std::abs(g.w(4, 4)[0]) <= 1e-14);
  CHECK_THROWS_AS(gauge_transform(m, w, ScalarField(Chart(0, 1, 0, 1, 5, 5), 0.0)), DomainError);
}

TEST_CASE("field strength and the Weyl scalar") {
  CHECK(field_strength(covector_jet(u("0"), u("u1"), 0.3, 0.2)) == Approx(1));
  CHECK(field_strength(covector_jet(u("2*u1*u2"), u("u1^2"), 0.3, 0.2)) == Approx(0).epsilon(1e-15));

  const Chart c(0.5, 2.5, 0, 6, 17, 17);
  const MetricField sphere = MetricField::from_expr(c, u("1"), u("0"), u("sin(u1)^2"));
  const CovectorField zero = CovectorField::from_expr(c, u("0"), u("0"));
  const ScalarField W = weyl_scalar(sphere, zero);
  for (int i = 2; i < 15; ++i) CHECK(W(i, 5) == Approx(2).epsilon(1e-10));
  const ScalarField F = field_strength(CovectorField::from_expr(c, u("-u2"), u("u1")));
  CHECK(F(8, 8) == Approx(2));
}

TEST_CASE("transport length") {
  const Chart c(0, 1, 0, 1, 5, 5);
  const std::vector<Vector2d> segment{{0, 0}, {1, 0}};
  const CovectorFunction constant = [](double, double) { return Vector2d(0.5, 0); };
  CHECK(transport_length(segment, constant, 2.0, c) == Approx(2 * std::exp(0.5)));

  // exact covector: depends on the end points only
  const CovectorFunction exact = [](double a, double b) { return Vector2d(b, a); };
  const std::vector<Vector2d> p1{{0, 0}, {1, 1}}, p2{{0, 0}, {0, 1}, {1, 1}};
  CHECK(transport_length(p1, exact, 1.0, c) == Approx(std::exp(1.0)));
  CHECK(transport_length(p2, exact, 1.0, c) == Approx(std::exp(1.0)));

  // ε = u1 du2 has unit field strength: a unit loop gains a factor e
  const CovectorFunction curl = [](double a, double) { return Vector2d(0, a); };
  const std::vector<Vector2d> loop{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  CHECK(transport_length(loop, curl, 1.0, c) == Approx(std::exp(1.0)));
  const CovectorField sampled = CovectorField::from_expr(c, u("0"), u("u1"));
  CHECK(transport_length(loop, sampled, 1.0) == Approx(std::exp(1.0)));

  CHECK_THROWS_AS(transport_length(loop, curl, 0.0, c), DomainError);
  const std::vector<Vector2d> outside{{0, 0}, {2, 0}};
  CHECK_THROWS_AS(transport_length(outside, curl, 1.0, c), DomainError);
}

TEST_CASE("thermal profiles") {
  const ThermalProfile k = ThermalProfile::constant(0.5, 1.0, 2.0);
  CHECK(k.beta(3.0) == 0.5);
  CHECK(k.sigma(3.0) == Approx(1.0));
  CHECK(k.length(3.0) == Approx(2 * std::exp(1.0)));
  CHECK(thermal_length(k, 3.0) == Approx(k.length(3.0)));

  const ThermalProfile inv = ThermalProfile::inverse(2.0, 1.0);
  CHECK(inv.beta(4.0) == Approx(0.25));
  CHECK(inv.length(6.0) == Approx(3.0).epsilon(1e-9));  // l0 θ/θ0
  CHECK_THROWS_AS(ThermalProfile::inverse(0.5, 1.0), DomainError);

  const ThermalProfile lin = ThermalProfile::linear(0.1, 0.2, 1.0, 1.0);
  CHECK(lin.sigma(2.0) == Approx(0.4).epsilon(1e-9));
  CHECK(lin.beta_derivative(2.0) == Approx(0.2));
  CHECK_THROWS_AS(lin.beta(5.0), DomainError);

  const ThermalProfile tab = ThermalProfile::tabulated({0, 2}, {0.2, 0.6}, 0.0, 1.0);
  CHECK(tab.beta(1.0) == Approx(0.4));
  CHECK(tab.sigma(2.0) == Approx(0.8).epsilon(1e-9));
  CHECK(tab.beta_derivative(1.0) == Approx(0.2));
  CHECK_THROWS_AS(tab.beta(3.0), DomainError);
  CHECK_THROWS_AS(ThermalProfile::tabulated({0, 0}, {0.2, 0.6}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(ThermalProfile::tabulated({0, 1}, {0.2, 1.6}, 0.0, 1.0), DomainError);

  ThermalProfile ranged = ThermalProfile::constant(0.1, 2.0, 1.0);
  ranged.with_range(1.0, 3.0);
  CHECK(ranged.beta(2.5) == 0.1);
  CHECK_THROWS_AS(ranged.beta(4.0), DomainError);
  CHECK_THROWS_AS(ranged.with_range(2.5, 3.0), DomainError);  // excludes θ0
  CHECK_THROWS_AS(k.beta(-1.0), DomainError);
  CHECK_THROWS_AS(ThermalProfile::constant(1.5, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ThermalProfile::constant(0.5, 1.0, 0.0), DomainError);
}

TEST_CASE("thermal covector from a temperature field") {
  const Chart c(0, 1, 0, 1, 9, 9);
  const ThermalProfile k = ThermalProfile::constant(0.5, 1.0, 1.0);
  const ThermalEpsilon e = thermal_epsilon(k, ScalarField::from_expr(c, u("1 + u1")));
  CHECK(e.eps(4, 4)[0] == Approx(0.5));
  CHECK(std::abs(e.eps(4, 4)[1]) <= 1e-15);
  CHECK(e.sigma(8, 0) == Approx(0.5));
  CHECK(e.violation_count == 0);
  CHECK_FALSE(e.negative_component_warning);
  CHECK(e.weyl_covector()(4, 4)[0] == Approx(1.0));

  const ThermalEpsilon down = thermal_epsilon(k, ScalarField::from_expr(c, u("3 - u1")));
  CHECK(down.negative_component_warning);

  // steep gradient pushes ε above one
  const ThermalEpsilon steep = thermal_epsilon(k, ScalarField::from_expr(c, u("1 + 4*u1")));
  CHECK(steep.violation_count == c.size());

  CHECK_THROWS_AS(thermal_epsilon(k, ScalarField::from_expr(c, u("u1 - 0.5"))), DomainError);
}

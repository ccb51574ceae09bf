#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "weylsheet/diffops.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/minkowski.hpp"
#include "weylsheet/surface.hpp"

using namespace weylsheet;
using std::numbers::pi;

namespace {

Expr u(std::string_view t) { return parse_expr(t, kSurfaceVars); }

// Unit sphere chart away from the poles, metric diag(1, sin^2 u1).
MetricField sphere_metric(int n) {
  const Chart c(pi / 8, 7 * pi / 8, 0, 2 * pi, n, n, false, true);
  return MetricField::from_expr(c, u("1"), u("0"), u("sin(u1)^2"));
}

double eigen_error(int n) {
  const MetricField m = sphere_metric(n);
  const Chart& c = m.chart();
  const ScalarField f = ScalarField::from_expr(c, u("cos(u1)")).sampled();
  const ScalarField lap = laplace_beltrami(m, f);
  double e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c.interior(i, j)) e = std::max(e, std::abs(lap(i, j) + 2 * f(i, j)));
  return e;
}

}  // namespace

TEST_CASE("divergence and Laplacian forms agree on analytic metrics") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x(-1, 1);
  const Expr a11 = u("2 + sin(u1*u2)"), a12 = u("0.3*cos(u1 + u2)"), a22 = u("1.5 + u1^2");
  const Expr v1 = u("u1*exp(u2)"), v2 = u("sin(u1) - u2^2"), f = u("cos(2*u1)*u2 + u1^3");
  for (int t = 0; t < 50; ++t) {
    const double a = x(rng), b = x(rng);
    const MetricJet m = metric_jet(a11, a12, a22, a, b);
    const VectorJet v = vector_jet(v1, v2, a, b);
    CHECK(std::abs(div_a_divergence_form(m, v) - div_a_christoffel_form(m, v)) <= 1e-8);
    const ScalarJet s = scalar_jet(f, a, b);
    CHECK(std::abs(laplace_beltrami_divergence_form(m, s) - laplace_beltrami_christoffel_form(m, s)) <=
          1e-8);
  }
}

TEST_CASE("grad_a raises the differential") {
  const MetricJet m = metric_jet(u("4"), u("0"), u("1"), 0.2, 0.3);
  const ScalarJet f = scalar_jet(u("u1 + u2"), 0.2, 0.3);
  const Vector2d g = grad_a(m, f);
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("Laplacian is the composition of divergence and gradient") {
  const MetricField m = sphere_metric(33);
  const ScalarField f = ScalarField::from_expr(m.chart(), u("sin(u1)*cos(2*u2) + u1")).sampled();
  const ScalarField direct = laplace_beltrami(m, f);
  const ScalarField composed = div_a(m, grad_a(m, f));
  for (std::size_t k = 0; k < direct.values().size(); ++k) CHECK(direct.values()[k] == composed.values()[k]);

  const ScalarField stencil = laplace_beltrami_stencil(m, f);
  const Chart& c = m.chart();
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      if (c.interior(i, j)) CHECK(std::abs(stencil(i, j) - direct(i, j)) <= 1e-10);
}

TEST_CASE("sphere eigenfunction converges at second order") {
  const double e17 = eigen_error(17), e33 = eigen_error(33), e65 = eigen_error(65);
  CHECK(std::log2(e17 / e33) == doctest::Approx(2).epsilon(0.1));
  CHECK(std::log2(e33 / e65) == doctest::Approx(2).epsilon(0.1));
  CHECK(e65 < 1e-3);
}

TEST_CASE("flat Laplacian of a quadratic is exact") {
  const Chart c(-1, 1, -1, 1, 9, 9);
  const ScalarField f = ScalarField::from_expr(c, u("u1^2 + u2^2 + u1*u2")).sampled();
  const ScalarField lap = laplace_beltrami(MetricField::flat(c), f);
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 8; ++j) CHECK(lap(i, j) == doctest::Approx(4).epsilon(1e-12));
}

TEST_CASE("divergence of a sampled field") {
  const Chart c(0, 1, 0, 1, 33, 33);
  const MetricField m = MetricField::from_expr(c, u("1 + u1"), u("0"), u("1 + u2"));
  const VectorField v = VectorField::from_expr(c, u("u1*u2"), u("u1 - u2^2"));
  const ScalarField exact = div_a(m, v);
  const ScalarField grid = div_a(m.sampled(), VectorField(c, v.values()));
  const ScalarField chris = div_a_christoffel(m, v);
  for (int i = 1; i < 32; ++i)
    for (int j = 1; j < 32; ++j) {
      CHECK(std::abs(exact(i, j) - chris(i, j)) <= 1e-10);
      CHECK(std::abs(exact(i, j) - grid(i, j)) <= 1e-3);
    }
}

TEST_CASE("curl of a gradient vanishes") {
  const Field3 grad = [](const Vector3d& p) {
    // ∇(x^2 y + sin z + x z^3)
    return Vector3d(2 * p[0] * p[1] + p[2] * p[2] * p[2], p[0] * p[0],
                    std::cos(p[2]) + 3 * p[0] * p[2] * p[2]);
  };
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(-1, 1);
  for (int eps : {1, -1}) {
    const Metric3 g = Metric3::signature(eps);
    // covariant components of a gradient are the partials, so raise first
    const Field3 raised = [&](const Vector3d& p) { return Vector3d(g.inverse() * grad(p)); };
    for (int t = 0; t < 20; ++t) {
      const Vector3d p(x(rng), x(rng), x(rng));
      CHECK(curl3(g, raised, p, 1e-3).norm() <= 1e-8);
    }
  }
}

TEST_CASE("curl of a rotation") {
  const Field3 rot = [](const Vector3d& p) { return Vector3d(-p[1], p[0], 0); };
  const Vector3d c = curl3(Metric3::signature(1), rot, Vector3d(0.3, -0.2, 0.5), 1e-3);
  CHECK((c - Vector3d(0, 0, 2)).norm() <= 1e-10);

  BoxGrid3 grid;
  grid.n = {5, 6, 7};
  const BoxField3 b = curl3(Metric3::signature(1), BoxField3::sample(grid, rot));
  for (const Vector3d& v : b.values) CHECK((v - Vector3d(0, 0, 2)).norm() <= 1e-12);
}

TEST_CASE("Minkowski algebra") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  const Vector3d n = Vector3d(0.3, -0.4, 0.2).normalized();
  for (int t = 0; t < 100; ++t) {
    const Vector3d a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
    const Vector3d c = cross_h(a, b, n);
    const double scale = a.norm() * b.norm();
    CHECK(std::abs(inner_h(c, a, n)) <= 1e-12 * scale * a.norm());
    CHECK(std::abs(inner_h(c, b, n)) <= 1e-12 * scale * b.norm());
    for (int eps : {1, -1}) {
      const Vector3d e = cross_e(a, b, eps);
      CHECK(std::abs(inner_e(e, a, eps)) <= 1e-12 * scale * a.norm());
      CHECK(std::abs(inner_e(e, b, eps)) <= 1e-12 * scale * b.norm());
    }
  }
  CHECK(inner_h(n, n, n) == doctest::Approx(-1.0).epsilon(1e-15));

  const Vector3d s = Vector3d(0.4, 0.3, 0).cross(n).normalized();
  const auto [ep, em] = isotropic_pair(s, n);
  CHECK(std::abs(inner_h(ep, ep, n)) <= 1e-15);
  CHECK(std::abs(inner_h(em, em, n)) <= 1e-15);
  CHECK(inner_h(ep, em, n) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(inner_e(Vector3d(1, 2, 3), Vector3d(1, 1, 1), -1) == 0.0);
  CHECK(causal_class(Vector3d(1, 0, 0), -1) == CausalClass::Spacelike);
  CHECK(causal_class(Vector3d(0, 0, 1), -1) == CausalClass::Timelike);
  CHECK(causal_class(Vector3d(1, 0, 1), -1) == CausalClass::Null);
  CHECK(causal_class(Vector3d(0, 0, 1), 1) == CausalClass::Spacelike);
}

TEST_CASE("Lambda operator needs a nondegenerate second form") {
  const Chart c(0, 1, 0, 1, 9, 9);
  const MetricField m = MetricField::flat(c);
  const ScalarField K(c, 1.0), f = ScalarField::from_expr(c, u("u1^2")).sampled();
  std::vector<Matrix2d> b(c.size(), Matrix2d::Identity());
  // K b^{-1} = I: reduces to the flat Laplacian
  const ScalarField lam = lambda_ab(m, b, K, f);
  CHECK(lam(4, 4) == doctest::Approx(2).epsilon(1e-12));
  b[c.index(4, 4)] = Matrix2d::Zero();
  CHECK_THROWS_AS(lambda_ab(m, b, K, f), DegenerateError);
}

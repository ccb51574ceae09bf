#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "weylsheet/diffops.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/thermal.hpp"

using namespace weylsheet;
using doctest::Approx;
using std::numbers::pi;

namespace {

Expr u(std::string_view t) { return parse_expr(t, kSurfaceVars); }

// Dense 5-point Dirichlet solve of Δσ = g on the unit square, zero boundary.
Eigen::VectorXd dense_poisson(int n, double g) {
  const int m = n - 2;
  const double h = 1.0 / (n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * m, m * m);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(m * m, g * h * h);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int k = i * m + j;
      A(k, k) = -4;
      if (i > 0) A(k, k - m) = 1;
      if (i + 1 < m) A(k, k + m) = 1;
      if (j > 0) A(k, k - 1) = 1;
      if (j + 1 < m) A(k, k + 1) = 1;
    }
  return A.partialPivLu().solve(b);
}

double mms_error(int n) {
  const Chart c(0, 1, 0, 1, n, n);
  ThermalStateProblem p;
  p.metric = MetricField::flat(c);
  // σ = sin(πu1) sin(πu2), K = r/2 - Δσ with r = 0
  p.K = ScalarField::from_expr(c, u("2*pi^2*sin(pi*u1)*sin(pi*u2)")).sampled();
  const SolveReport rep = solve_sigma(p);
  const ScalarField exact = ScalarField::from_expr(c, u("sin(pi*u1)*sin(pi*u2)"));
  double e = 0;
  for (std::size_t k = 0; k < c.size(); ++k) e = std::max(e, std::abs(rep.sigma.values()[k] - exact.values()[k]));
  return e;
}

}  // namespace

TEST_CASE("solver matches a dense five-point solve") {
  const int n = 17;
  const Chart c(0, 1, 0, 1, n, n);
  ThermalStateProblem p;
  p.metric = MetricField::flat(c);
  p.K = ScalarField(c, 0.0);
  p.r = 4;
  const SolveReport rep = solve_sigma(p);
  const Eigen::VectorXd dense = dense_poisson(n, 2.0);
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) CHECK(std::abs(rep.sigma(i, j) - dense((i - 1) * (n - 2) + j - 1)) <= 1e-8);
  for (int j = 0; j < n; ++j) CHECK(rep.sigma(0, j) == 0.0);
  CHECK(rep.residual_inf <= rep.tolerance);
  CHECK(rep.scale == Approx(2));
  CHECK(rep.iterations > 0);
}

TEST_CASE("harmonic boundary data is reproduced") {
  const Chart c(0, 1, 0, 2, 17, 21);
  ThermalStateProblem p;
  p.metric = MetricField::flat(c);
  p.K = ScalarField(c, 0.0);
  p.boundary = ScalarField::from_expr(c, u("u1 - 0.5*u2"));
  const SolveReport rep = solve_sigma(p);
  for (std::size_t k = 0; k < c.size(); ++k)
    CHECK(std::abs(rep.sigma.values()[k] - p.boundary->values()[k]) <= 1e-8);
}

TEST_CASE("round sphere needs no rescaling") {
  const Chart c(pi / 8, 7 * pi / 8, 0, 2 * pi, 33, 33, false, true);
  ThermalStateProblem p;
  p.metric = MetricField::from_expr(c, u("4"), u("0"), u("4*sin(u1)^2"));
  p.K = ScalarField(c, 0.25);
  p.r = 0.5;
  const SolveReport rep = solve_sigma(p);
  CHECK(rep.sigma.max_abs() <= 1e-12);
  CHECK(rep.iterations == 0);
}

TEST_CASE("manufactured solution converges at second order") {
  const double e17 = mms_error(17), e33 = mms_error(33), e65 = mms_error(65);
  CHECK(std::log2(e17 / e33) == Approx(2).epsilon(0.1));
  CHECK(std::log2(e33 / e65) == Approx(2).epsilon(0.1));
}

TEST_CASE("state residual of the reduced solution") {
  const Chart c(0, 1, 0, 1, 17, 17);
  ThermalStateProblem p;
  p.metric = MetricField::from_expr(c, u("1 + u1^2"), u("0.1"), u("1 + u2"));
  p.K = ScalarField::from_expr(c, u("u1*u2"));
  p.r = 1.5;
  const SolveReport rep = solve_sigma(p);
  const VectorField v = 2.0 * grad_a(p.metric, rep.sigma);
  const ScalarField res = state_residual(p.metric, v, p.K, p.r);
  for (int i = 1; i < 16; ++i)
    for (int j = 1; j < 16; ++j) CHECK(std::abs(res(i, j)) <= 2 * rep.tolerance + 1e-12);

  // v = 0 leaves 2K - r
  const ScalarField bare = state_residual(p.metric, VectorField(c, std::vector<Vector2d>(c.size(), Vector2d::Zero())),
                                          p.K, p.r);
  CHECK(bare(8, 8) == Approx(2 * p.K(8, 8) - 1.5));
}

TEST_CASE("conformal metric and curvature") {
  const Chart c(0.5, 2.5, 0, 2 * pi, 17, 17, false, true);
  const MetricField sphere = MetricField::from_expr(c, u("1"), u("0"), u("sin(u1)^2"));
  const MetricField scaled = conformal_metric(sphere, ScalarField(c, 0.5));
  CHECK(scaled(4, 4)(1, 1) == Approx(std::exp(-1.0) * std::pow(std::sin(c.coord(0, 4)), 2)));

  const ScalarField K(c, 1.0);
  const ScalarField k0 = conformal_curvature(K, ScalarField(c, 0.0), sphere);
  for (double x : k0.values()) CHECK(x == Approx(1));

  // σ = u1 on the flat plane: e^{2u1}(0 + 0)
  const Chart f(0, 1, 0, 1, 9, 9);
  const ScalarField kf = conformal_curvature(ScalarField(f, 0.0), ScalarField::from_expr(f, u("u1")),
                                             MetricField::flat(f));
  CHECK(std::abs(kf(4, 4)) <= 1e-12);

  CHECK_THROWS_AS(conformal_curvature(ScalarField(f, 0.0), ScalarField(c, 0.0), sphere), DomainError);
}

TEST_CASE("solved rescaling has constant curvature") {
  const Chart c(0, 1, 0, 1, 17, 17);
  ThermalStateProblem p;
  p.metric = MetricField::flat(c);
  p.K = ScalarField(c, 0.0);
  p.r = 4;
  const SolveReport rep = solve_sigma(p);
  const ScalarField kt = conformal_curvature(p.K, rep.sigma, p.metric, LaplacianScheme::Flux);
  for (int i = 1; i < 16; ++i)
    for (int j = 1; j < 16; ++j)
      CHECK(std::abs(kt(i, j) - 2 * std::exp(2 * rep.sigma(i, j))) <= 1e-8);
  const SignVerdict v = sign_verdict(kt, rep.solved, 1e-8);
  CHECK(v.positive);
  CHECK(v.constant_sign());
}

TEST_CASE("sign verdicts") {
  const Chart c(0, 1, 0, 1, 3, 3);
  const ScalarField mixed = ScalarField::from_expr(c, u("u1 - 0.5"));
  const SignVerdict m = sign_verdict(mixed, {}, 1e-12);
  CHECK_FALSE(m.constant_sign());
  CHECK(m.min == Approx(-0.5));
  CHECK(m.max == Approx(0.5));
  std::vector<char> mask(c.size(), 0);
  mask[c.index(2, 1)] = 1;
  CHECK(sign_verdict(mixed, mask, 1e-12).positive);
  CHECK(sign_verdict(ScalarField(c, -1e-14), {}, 1e-12).zero);
  CHECK(sign_verdict(ScalarField(c, -2.0), {}, 1e-12).negative);
}

TEST_CASE("thermal shape parameter") {
  const Chart c(0, 1, 0, 1, 5, 5);
  // sphere of radius 2
  const ShapeParameter s = shape_parameter(ScalarField(c, 0.5), ScalarField(c, 0.25), 1.0);
  CHECK(s.excluded == 0);
  for (double v : s.nu.values()) CHECK(v == Approx(2));
  CHECK(shape_parameter(ScalarField(c, 0.5), ScalarField(c, 0.25), 4.0).nu(2, 2) == Approx(0.5));

  ScalarField K(c, 0.25);
  K(2, 2) = 0;
  const ShapeParameter e = shape_parameter(ScalarField(c, 0.5), K, 1.0);
  CHECK(e.excluded == 1);
  CHECK_FALSE(e.valid[c.index(2, 2)]);

  // cylinder: K = 0 everywhere
  CHECK_THROWS_AS(shape_parameter(ScalarField(c, 0.25), ScalarField(c, 0.0), 1.0), DegenerateError);
  CHECK_THROWS_AS(shape_parameter(ScalarField(c, 0.5), ScalarField(c, 0.25), 0.0), DomainError);
}

TEST_CASE("harmonic temperature") {
  const Chart c(-1, 1, -1, 1, 9, 9);
  const ScalarField res = harmonic_theta_residual(MetricField::flat(c), ScalarField::from_expr(c, u("u1^2 - u2^2 + 3")));
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 8; ++j) CHECK(std::abs(res(i, j)) <= 1e-10);
}

TEST_CASE("fully periodic charts") {
  const Chart c(0, 2 * pi, 0, 2 * pi, 33, 33, true, true);
  ThermalStateProblem p;
  p.metric = MetricField::flat(c);
  p.K = ScalarField(c, 0.0);
  p.r = 1.0;
  CHECK_THROWS_AS(solve_sigma(p), NumericalError);

  p.r = 0;
  p.K = ScalarField::from_expr(c, u("cos(u1)"));
  const SolveReport rep = solve_sigma(p);
  CHECK(std::abs(rep.compatibility_defect) <= 1e-10);
  double mean = 0;
  for (int i = 0; i + 1 < 33; ++i)
    for (int j = 0; j + 1 < 33; ++j) mean += rep.sigma(i, j);
  CHECK(std::abs(mean) <= 1e-8);
  // Δσ = -cos u1 gives σ ≈ cos u1
  CHECK(rep.sigma(0, 0) == Approx(1).epsilon(1e-2));
}

TEST_CASE("iteration cap") {
  const Chart c(0, 1, 0, 1, 33, 33);
  ThermalStateProblem p;
  p.metric = MetricField::flat(c);
  p.K = ScalarField(c, 0.0);
  p.r = 4;
  p.max_iterations = 2;
  CHECK_THROWS_AS(solve_sigma(p), NumericalError);
}

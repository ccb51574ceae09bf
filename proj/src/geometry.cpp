#include "weylsheet/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "weylsheet/minkowski.hpp"
#include "weylsheet/parallel.hpp"

namespace weylsheet {

namespace {

Vector3d unit_normal(const Vector3d& r1, const Vector3d& r2, int eps) {
  const Vector3d plain = r1.cross(r2);
  if (plain.norm() < 1e-12 * r1.norm() * r2.norm() || plain.norm() == 0.0)
    throw DegenerateError("degenerate chart point: r1 and r2 are parallel");
  const Vector3d N = cross_e(r1, r2, eps);
  const double q = inner_e(N, N, eps);
  if (eps == -1 && !(q < 0.0))
    throw DegenerateError("tangent plane is not space-like under the Minkowski metric");
  return N / std::sqrt(std::abs(q));
}

double eps_dot(const Vector3d& u, const Vector3d& v, int eps) { return inner_e(u, v, eps); }

}  // namespace

FundamentalForms fundamental_forms(const SurfaceJet& jet, int signature) {
  FundamentalForms f;
  f.signature = signature;
  f.normal = unit_normal(jet.r1, jet.r2, signature);
  f.E = eps_dot(jet.r1, jet.r1, signature);
  f.F = eps_dot(jet.r1, jet.r2, signature);
  f.G = eps_dot(jet.r2, jet.r2, signature);
  f.L = eps_dot(f.normal, jet.r11, signature);
  f.M = eps_dot(f.normal, jet.r12, signature);
  f.N = eps_dot(f.normal, jet.r22, signature);
  return f;
}

CurvatureData curvatures(const FundamentalForms& f) {
  const double det = f.E * f.G - f.F * f.F;
  if (!(det > 0.0)) throw DegenerateError("first fundamental form is not positive definite");
  CurvatureData c;
  c.K = (f.L * f.N - f.M * f.M) / det;
  c.H = (f.E * f.N - 2.0 * f.F * f.M + f.G * f.L) / (2.0 * det);
  const double disc = std::sqrt(std::max(0.0, c.H * c.H - c.K));
  c.kappa1 = c.H + disc;
  c.kappa2 = c.H - disc;
  return c;
}

double normal_curvature(const FundamentalForms& f, const Vector2d& dir) {
  if (dir.squaredNorm() == 0.0) throw DomainError("normal curvature needs a nonzero direction");
  const double I = dir.dot(f.first() * dir);
  if (!(I > 0.0)) throw DegenerateError("direction has nonpositive length");
  return dir.dot(f.second() * dir) / I;
}

FundamentalForms rescale_second_form(const FundamentalForms& f, double l_theta) {
  if (!(l_theta > 0.0)) throw DomainError("thermal length must be positive");
  FundamentalForms out = f;
  out.L *= l_theta;
  out.M *= l_theta;
  out.N *= l_theta;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Γ_{lambda alpha beta} = ½(∂_alpha a_{lambda beta} + ∂_beta a_{lambda alpha} - ∂_lambda a_{alpha beta}).
double first_kind(const MetricJet& m, int l, int a, int b) {
  return 0.5 * (m.da[a](l, b) + m.da[b](l, a) - m.da[l](a, b));
}

double first_kind_derivative(const MetricJet& m, int mu, int l, int a, int b) {
  return 0.5 * (m.second(mu, a)(l, b) + m.second(mu, b)(l, a) - m.second(mu, l)(a, b));
}

}  // namespace

Christoffel christoffel(const MetricJet& m) {
  const Matrix2d inv = inverse_metric(m.a);
  Christoffel g{Matrix2d::Zero(), Matrix2d::Zero()};
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l) g[s](a, b) += inv(s, l) * first_kind(m, l, a, b);
  return g;
}

Christoffel christoffel(const MetricField& metric, int i, int j) {
  return christoffel(metric.jet(i, j));
}

std::array<Christoffel, 2> christoffel_derivatives(const MetricJet& m) {
  const Matrix2d inv = inverse_metric(m.a);
  std::array<Christoffel, 2> d;
  for (int mu = 0; mu < 2; ++mu) {
    const Matrix2d dinv = -inv * m.da[mu] * inv;
    for (int s = 0; s < 2; ++s) {
      d[mu][s].setZero();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int l = 0; l < 2; ++l)
            d[mu][s](a, b) +=
                dinv(s, l) * first_kind(m, l, a, b) + inv(s, l) * first_kind_derivative(m, mu, l, a, b);
    }
  }
  return d;
}

double intrinsic_gauss_curvature(const MetricJet& m) {
  const Christoffel g = christoffel(m);
  const auto dg = christoffel_derivatives(m);
  // R^r_{s mu nu} = ∂_mu Γ^r_{nu s} - ∂_nu Γ^r_{mu s} + Γ^r_{mu l} Γ^l_{nu s} - Γ^r_{nu l} Γ^l_{mu s}
  auto riemann = [&](int r, int s, int mu, int nu) {
    double v = dg[mu][r](nu, s) - dg[nu][r](mu, s);
    for (int l = 0; l < 2; ++l) v += g[r](mu, l) * g[l](nu, s) - g[r](nu, l) * g[l](mu, s);
    return v;
  };
  Matrix2d ricci = Matrix2d::Zero();
  for (int s = 0; s < 2; ++s)
    for (int nu = 0; nu < 2; ++nu)
      for (int r = 0; r < 2; ++r) ricci(s, nu) += riemann(r, s, r, nu);
  const Matrix2d inv = inverse_metric(m.a);
  const double scalar = (inv.array() * ricci.array()).sum();
  return 0.5 * scalar;
}

double intrinsic_gauss_curvature(const MetricField& metric, int i, int j) {
  return intrinsic_gauss_curvature(metric.jet(i, j));
}

ScalarField intrinsic_gauss_curvature(const MetricField& metric) {
  const Chart& c = metric.chart();
  std::vector<double> values(c.size());
  parallel_for(static_cast<std::size_t>(c.n1()), [&](std::size_t i) {
    for (int j = 0; j < c.n2(); ++j)
      values[c.index(static_cast<int>(i), j)] =
          intrinsic_gauss_curvature(metric, static_cast<int>(i), j);
  });
  return ScalarField(c, std::move(values));
}

// ---------------------------------------------------------------------------

double GaussWeingartenResidual::max_norm() const {
  double m = 0.0;
  for (const auto& v : gauss) m = std::max(m, v.norm());
  for (const auto& v : weingarten) m = std::max(m, v.norm());
  return m;
}

namespace {

GaussWeingartenResidual assemble_residual(const SurfaceJet& jet, const MetricJet& metric,
                                          const std::array<Vector3d, 2>& dn, int eps) {
  const FundamentalForms f = fundamental_forms(jet, eps);
  const Matrix2d b = f.second();
  const Christoffel g = christoffel(metric);
  const Matrix2d inv = inverse_metric(metric.a);
  GaussWeingartenResidual res;
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int p = 0; p < 3; ++p) {
    const int a = pairs[p][0], c = pairs[p][1];
    Vector3d tangential = jet.second(a, c);
    for (int k = 0; k < 2; ++k) tangential -= g[k](a, c) * jet.first(k);
    res.gauss[p] = eps * b(a, c) * f.normal - tangential;
  }
  for (int a = 0; a < 2; ++a) {
    Vector3d w = dn[a];
    for (int be = 0; be < 2; ++be)
      for (int k = 0; k < 2; ++k) w += inv(be, k) * b(a, k) * jet.first(be);
    res.weingarten[a] = w;
  }
  return res;
}

}  // namespace

GaussWeingartenResidual gauss_weingarten_residual(const SurfaceExpr& s, double u1, double u2,
                                                  int signature) {
  const auto t = s.expand<2>(u1, u2);
  std::array<Taylor2<1>, 3> r1, r2;
  for (int c = 0; c < 3; ++c) {
    r1[c] = t[c].partial(0);
    r2[c] = t[c].partial(1);
  }
  std::array<Taylor2<1>, 3> N{r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2],
                              r1[0] * r2[1] - r1[1] * r2[0]};
  N[2] = double(signature) * N[2];
  Taylor2<1> q = N[0] * N[0] + N[1] * N[1] + double(signature) * (N[2] * N[2]);
  if (signature == -1) q = -q;
  if (!(q.value() > 0.0)) throw DegenerateError("degenerate normal");
  const Taylor2<1> inv_norm = Taylor2<1>(1.0) / sqrt(q);
  std::array<Vector3d, 2> dn;
  for (int c = 0; c < 3; ++c) {
    const Taylor2<1> n = N[c] * inv_norm;
    dn[0][c] = n.derivative(1, 0);
    dn[1][c] = n.derivative(0, 1);
  }
  return assemble_residual(eval_jet(s, u1, u2, 2), induced_metric_jet(s, u1, u2, signature), dn,
                           signature);
}

GaussWeingartenResidual gauss_weingarten_residual(const SampledSurface& s, int i, int j,
                                                  int signature) {
  const Chart& c = s.chart();
  if (s.source())
    return gauss_weingarten_residual(*s.source(), c.coord(0, i), c.coord(1, j), signature);
  auto normal_at = [&](int a, int b) -> Vector3d {
    const SurfaceJet jt = s.grid_jet(a, b);
    return unit_normal(jt.r1, jt.r2, signature);
  };
  const std::array<Vector3d, 2> dn{fd_first(c, 0, i, j, normal_at), fd_first(c, 1, i, j, normal_at)};
  const MetricField metric = s.induced_metric(signature);
  return assemble_residual(s.grid_jet(i, j), metric.jet(i, j), dn, signature);
}

// ---------------------------------------------------------------------------

namespace {
template <class Pick>
ScalarField pick_field(const Chart& chart, const std::vector<CurvatureData>& data, Pick&& pick) {
  std::vector<double> v(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) v[k] = pick(data[k]);
  return ScalarField(chart, std::move(v));
}
}  // namespace

ScalarField SurfaceGeometry::K() const {
  return pick_field(chart, curvature, [](const CurvatureData& c) { return c.K; });
}
ScalarField SurfaceGeometry::H() const {
  return pick_field(chart, curvature, [](const CurvatureData& c) { return c.H; });
}
ScalarField SurfaceGeometry::kappa1() const {
  return pick_field(chart, curvature, [](const CurvatureData& c) { return c.kappa1; });
}
ScalarField SurfaceGeometry::kappa2() const {
  return pick_field(chart, curvature, [](const CurvatureData& c) { return c.kappa2; });
}

ScalarField SurfaceGeometry::det_b() const {
  std::vector<double> v(forms.size());
  for (std::size_t k = 0; k < forms.size(); ++k) v[k] = forms[k].L * forms[k].N - forms[k].M * forms[k].M;
  return ScalarField(chart, std::move(v));
}

std::vector<Matrix2d> SurfaceGeometry::second_forms() const {
  std::vector<Matrix2d> v(forms.size());
  for (std::size_t k = 0; k < forms.size(); ++k) v[k] = forms[k].second();
  return v;
}

SurfaceGeometry surface_geometry(const SampledSurface& s, int signature) {
  SurfaceGeometry g;
  g.chart = s.chart();
  g.forms.resize(g.chart.size());
  g.curvature.resize(g.chart.size());
  parallel_for(static_cast<std::size_t>(g.chart.n1()), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.chart.n2(); ++j) {
      const std::size_t k = g.chart.index(i, j);
      g.forms[k] = fundamental_forms(s.jet(i, j), signature);
      g.curvature[k] = curvatures(g.forms[k]);
    }
  });
  return g;
}

DevelopabilityReport developability(const SampledSurface& s, double tolerance, int signature) {
  DevelopabilityReport r;
  r.det_b = surface_geometry(s, signature).det_b();
  r.tolerance = tolerance;
  const double d = s.diameter();
  r.measure = r.det_b.max_abs() * d * d * d * d;
  r.is_developable = r.measure < tolerance;
  return r;
}

}  // namespace weylsheet

#include "weylsheet/diffops.hpp"

#include <cmath>

#include "weylsheet/geometry.hpp"
#include "weylsheet/parallel.hpp"

namespace weylsheet {

namespace {

// ∂_k |a|^{1/2} / |a|^{1/2} = ½ tr(a^{-1} ∂_k a).
Vector2d log_volume_gradient(const MetricJet& m, const Matrix2d& inv) {
  return {0.5 * (inv * m.da[0]).trace(), 0.5 * (inv * m.da[1]).trace()};
}

int left_of(const Chart& c, int axis, int k) {
  if (c.periodic(axis) && k == 0) return c.n(axis) - 2;
  return k - 1;
}

int right_of(const Chart& c, int axis, int k) {
  if (c.periodic(axis) && k == c.n(axis) - 1) return 1;
  return k + 1;
}

template <class Fn>
void for_each_row(const Chart& chart, Fn&& fn) {
  parallel_for(static_cast<std::size_t>(chart.n1()),
               [&](std::size_t i) { fn(static_cast<int>(i)); });
}

}  // namespace

Vector2d grad_a(const MetricJet& m, const ScalarJet& f) { return inverse_metric(m.a) * f.d; }

double div_a_divergence_form(const MetricJet& m, const VectorJet& v) {
  const Matrix2d inv = inverse_metric(m.a);
  return v.dv.trace() + log_volume_gradient(m, inv).dot(v.v);
}

double div_a_christoffel_form(const MetricJet& m, const VectorJet& v) {
  const Christoffel g = christoffel(m);
  double out = v.dv.trace();
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) out += g[k](k, l) * v.v[l];
  return out;
}

double laplace_beltrami_divergence_form(const MetricJet& m, const ScalarJet& f) {
  const Matrix2d inv = inverse_metric(m.a);
  const Vector2d lv = log_volume_gradient(m, inv);
  double out = (inv.array() * f.dd.array()).sum();
  for (int i = 0; i < 2; ++i) {
    const Matrix2d dinv = -inv * m.da[i] * inv;
    for (int j = 0; j < 2; ++j) out += (dinv(i, j) + lv[i] * inv(i, j)) * f.d[j];
  }
  return out;
}

double laplace_beltrami_christoffel_form(const MetricJet& m, const ScalarJet& f) {
  const Matrix2d inv = inverse_metric(m.a);
  const Christoffel g = christoffel(m);
  double out = (inv.array() * f.dd.array()).sum();
  for (int k = 0; k < 2; ++k) out -= (inv.array() * g[k].array()).sum() * f.d[k];
  return out;
}

// ---------------------------------------------------------------------------

DivergenceStencil::DivergenceStencil(Chart chart, std::vector<Matrix2d> coeff)
    : chart_(std::move(chart)), coeff_(std::move(coeff)) {
  if (coeff_.size() != chart_.size()) throw DomainError("stencil coefficients do not match chart");
}

DivergenceStencil::Row DivergenceStencil::row(int i, int j) const {
  const Chart& c = chart_;
  const int L1 = left_of(c, 0, i), R1 = right_of(c, 0, i);
  const int L2 = left_of(c, 1, j), R2 = right_of(c, 1, j);
  auto C = [&](int a, int b) -> const Matrix2d& { return coeff_[c.index(a, b)]; };
  auto node = [&](int a, int b) { return c.index(c.canonical(0, a), c.canonical(1, b)); };
  const double h1 = c.h(0), h2 = c.h(1);
  const double c11p = 0.5 * (C(i, j)(0, 0) + C(R1, j)(0, 0));
  const double c11m = 0.5 * (C(i, j)(0, 0) + C(L1, j)(0, 0));
  const double c22p = 0.5 * (C(i, j)(1, 1) + C(i, R2)(1, 1));
  const double c22m = 0.5 * (C(i, j)(1, 1) + C(i, L2)(1, 1));
  const double x = 1.0 / (4.0 * h1 * h2);
  Row r{{
      {node(i, j), -(c11p + c11m) / (h1 * h1) - (c22p + c22m) / (h2 * h2)},
      {node(R1, j), c11p / (h1 * h1)},
      {node(L1, j), c11m / (h1 * h1)},
      {node(i, R2), c22p / (h2 * h2)},
      {node(i, L2), c22m / (h2 * h2)},
      {node(R1, R2), x * (C(R1, j)(0, 1) + C(i, R2)(0, 1))},
      {node(R1, L2), -x * (C(R1, j)(0, 1) + C(i, L2)(0, 1))},
      {node(L1, R2), -x * (C(L1, j)(0, 1) + C(i, R2)(0, 1))},
      {node(L1, L2), x * (C(L1, j)(0, 1) + C(i, L2)(0, 1))},
  }};
  return r;
}

double DivergenceStencil::apply(const std::vector<double>& f, int i, int j) const {
  double s = 0.0;
  for (const Entry& e : row(i, j)) s += e.weight * f[e.node];
  return s;
}

// ---------------------------------------------------------------------------

VectorField flux_gradient(const MetricField& metric, const std::vector<Matrix2d>& coeff,
                          const ScalarField& f) {
  const Chart& c = metric.chart();
  if (!(f.chart() == c)) throw DomainError("field and metric live on different charts");
  if (coeff.size() != c.size()) throw DomainError("coefficient array does not match chart");
  const int n1 = c.n1(), n2 = c.n2();
  const double h1 = c.h(0), h2 = c.h(1);
  const std::vector<double>& fv = f.values();

  std::vector<Vector2d> nodes(c.size());
  FluxData flux;
  flux.face1.resize(static_cast<std::size_t>(n1 - 1) * n2);
  flux.face2.resize(static_cast<std::size_t>(n1) * (n2 - 1));
  flux.cross1.resize(c.size());
  flux.cross2.resize(c.size());
  auto get = [&](int a, int b) { return fv[c.index(a, b)]; };

  for_each_row(c, [&](int i) {
    for (int j = 0; j < n2; ++j) {
      const std::size_t k = c.index(i, j);
      const Matrix2d& C = coeff[k];
      const Vector2d d = f.gradient(i, j);
      nodes[k] = C * d / metric.sqrt_det(i, j);
      const double d1 = fd_first(c, 0, i, j, get);
      const double d2 = fd_first(c, 1, i, j, get);
      flux.cross1[k] = C(0, 1) * d2;
      flux.cross2[k] = C(0, 1) * d1;
      if (i + 1 < n1)
        flux.face1[static_cast<std::size_t>(i) * n2 + j] =
            0.5 * (C(0, 0) + coeff[c.index(i + 1, j)](0, 0)) * (get(i + 1, j) - get(i, j)) / h1;
      if (j + 1 < n2)
        flux.face2[static_cast<std::size_t>(i) * (n2 - 1) + j] =
            0.5 * (C(1, 1) + coeff[c.index(i, j + 1)](1, 1)) * (get(i, j + 1) - get(i, j)) / h2;
    }
  });
  VectorField out(c, std::move(nodes));
  out.set_flux(std::move(flux));
  return out;
}

VectorField grad_a(const MetricField& metric, const ScalarField& f) {
  const Chart& c = metric.chart();
  std::vector<Matrix2d> coeff(c.size());
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      coeff[c.index(i, j)] = metric.sqrt_det(i, j) * inverse_metric(metric(i, j));
  return flux_gradient(metric, coeff, f);
}

ScalarField div_a(const MetricField& metric, const VectorField& v) {
  const Chart& c = metric.chart();
  if (!(v.chart() == c)) throw DomainError("field and metric live on different charts");
  const int n2 = c.n2();
  const double h1 = c.h(0), h2 = c.h(1);
  std::vector<double> out(c.size());
  auto weighted = [&](int a, int b) -> Vector2d { return metric.sqrt_det(a, b) * v(a, b); };
  const bool pointwise = !v.flux() && v.analytic() && metric.analytic();

  for_each_row(c, [&](int i) {
    for (int j = 0; j < n2; ++j) {
      const std::size_t k = c.index(i, j);
      if (pointwise) {
        out[k] = div_a_divergence_form(metric.jet(i, j), v.jet(i, j));
        continue;
      }
      const double s = metric.sqrt_det(i, j);
      if (v.flux() && c.interior(i, j)) {
        const FluxData& fl = *v.flux();
        const int L1 = left_of(c, 0, i), R1 = right_of(c, 0, i);
        const int L2 = left_of(c, 1, j), R2 = right_of(c, 1, j);
        const int f1r = c.canonical(0, i), f1l = L1;
        const int f2r = c.canonical(1, j), f2l = L2;
        double div = (fl.face1[static_cast<std::size_t>(f1r) * n2 + j] -
                      fl.face1[static_cast<std::size_t>(f1l) * n2 + j]) / h1 +
                     (fl.face2[static_cast<std::size_t>(i) * (n2 - 1) + f2r] -
                      fl.face2[static_cast<std::size_t>(i) * (n2 - 1) + f2l]) / h2;
        div += (fl.cross1[c.index(R1, j)] - fl.cross1[c.index(L1, j)]) / (2.0 * h1);
        div += (fl.cross2[c.index(i, R2)] - fl.cross2[c.index(i, L2)]) / (2.0 * h2);
        out[k] = div / s;
        continue;
      }
      const Vector2d d1 = fd_first(c, 0, i, j, weighted);
      const Vector2d d2 = fd_first(c, 1, i, j, weighted);
      out[k] = (d1[0] + d2[1]) / s;
    }
  });
  return ScalarField(c, std::move(out));
}

ScalarField div_a_christoffel(const MetricField& metric, const VectorField& v) {
  const Chart& c = metric.chart();
  std::vector<double> out(c.size());
  for_each_row(c, [&](int i) {
    for (int j = 0; j < c.n2(); ++j)
      out[c.index(i, j)] = div_a_christoffel_form(metric.jet(i, j), v.jet(i, j));
  });
  return ScalarField(c, std::move(out));
}

ScalarField laplace_beltrami(const MetricField& metric, const ScalarField& f) {
  return div_a(metric, grad_a(metric, f));
}

ScalarField laplace_beltrami_stencil(const MetricField& metric, const ScalarField& f) {
  const Chart& c = metric.chart();
  std::vector<Matrix2d> coeff(c.size());
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      coeff[c.index(i, j)] = metric.sqrt_det(i, j) * inverse_metric(metric(i, j));
  const DivergenceStencil st(c, std::move(coeff));
  std::vector<double> out(c.size(), 0.0);
  for_each_row(c, [&](int i) {
    for (int j = 0; j < c.n2(); ++j)
      if (c.interior(i, j)) out[c.index(i, j)] = st.apply(f.values(), i, j) / metric.sqrt_det(i, j);
  });
  return ScalarField(c, std::move(out));
}

ScalarField lambda_ab(const MetricField& metric, const std::vector<Matrix2d>& b,
                      const ScalarField& K, const ScalarField& f) {
  const Chart& c = metric.chart();
  if (b.size() != c.size() || !(K.chart() == c))
    throw DomainError("second form or curvature field does not match chart");
  std::vector<Matrix2d> coeff(c.size());
  for (int i = 0; i < c.n1(); ++i) {
    for (int j = 0; j < c.n2(); ++j) {
      const Matrix2d& bb = b[c.index(i, j)];
      const double det = bb.determinant();
      const double scale = bb.cwiseAbs().maxCoeff();
      if (!(std::abs(det) > 1e-10 * scale * scale))
        throw DegenerateError("Lambda_{a,b} is undefined where det b = 0 (developable point at node " +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      coeff[c.index(i, j)] = metric.sqrt_det(i, j) * K(i, j) * bb.inverse();
    }
  }
  return div_a(metric, flux_gradient(metric, coeff, f));
}

// ---------------------------------------------------------------------------

Metric3 Metric3::signature(int eps) {
  if (eps != 1 && eps != -1) throw DomainError("signature must be +1 or -1");
  Metric3 m;
  m.g = Eigen::Vector3d(1.0, 1.0, double(eps)).asDiagonal();
  return m;
}

Matrix3d Metric3::inverse() const {
  if (!(std::abs(g.determinant()) > 0.0)) throw DegenerateError("degenerate 3-metric");
  return g.inverse();
}

double Metric3::sqrt_abs_det() const {
  const double d = std::abs(g.determinant());
  if (!(d > 0.0)) throw DegenerateError("degenerate 3-metric");
  return std::sqrt(d);
}

namespace {
Vector3d curl_from_jacobian(const Matrix3d& J, double sqrt_g) {
  // J(m, l) = ∂_l v_m
  return Vector3d(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)) / sqrt_g;
}
}  // namespace

Vector3d curl3(const Metric3& g, const Field3& v, const Vector3d& p, double step) {
  if (!(step > 0.0)) throw DomainError("curl step must be positive");
  Matrix3d J;
  for (int l = 0; l < 3; ++l) {
    const Vector3d e = step * Vector3d::Unit(l);
    const Vector3d d = (-v(p + 2 * e) + 8.0 * v(p + e) - 8.0 * v(p - e) + v(p - 2 * e)) / (12.0 * step);
    J.col(l) = g.g * d;
  }
  return curl_from_jacobian(J, g.sqrt_abs_det());
}

Vector3d BoxGrid3::point(int i, int j, int k) const {
  return lo + Vector3d(i * h(0), j * h(1), k * h(2));
}

BoxField3 BoxField3::sample(const BoxGrid3& grid, const Field3& f) {
  for (int a = 0; a < 3; ++a) {
    if (grid.n[a] < 3) throw DomainError("box grid needs at least 3 nodes per axis");
    if (!(grid.hi[a] > grid.lo[a])) throw DomainError("box grid bounds must be increasing");
  }
  BoxField3 out{grid, std::vector<Vector3d>(grid.size())};
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int k = 0; k < grid.n[2]; ++k) out.values[grid.index(i, j, k)] = f(grid.point(i, j, k));
  return out;
}

BoxField3 curl3(const Metric3& g, const BoxField3& v) {
  const BoxGrid3& grid = v.grid;
  const double sg = g.sqrt_abs_det();
  BoxField3 out{grid, std::vector<Vector3d>(grid.size())};
  std::array<Chart, 3> axes;
  for (int a = 0; a < 3; ++a) axes[a] = Chart(grid.lo[a], grid.hi[a], 0.0, 1.0, grid.n[a], 3);
  for (int i = 0; i < grid.n[0]; ++i) {
    for (int j = 0; j < grid.n[1]; ++j) {
      for (int k = 0; k < grid.n[2]; ++k) {
        const int idx[3] = {i, j, k};
        Matrix3d J;
        for (int l = 0; l < 3; ++l) {
          const Stencil s = first_derivative_stencil(axes[l], 0, idx[l]);
          Vector3d d = Vector3d::Zero();
          for (int q = 0; q < s.size; ++q) {
            int at[3] = {i, j, k};
            at[l] = s.node[q];
            d += s.weight[q] * v.values[grid.index(at[0], at[1], at[2])];
          }
          J.col(l) = g.g * d;
        }
        out.values[grid.index(i, j, k)] = curl_from_jacobian(J, sg);
      }
    }
  }
  return out;
}

}  // namespace weylsheet

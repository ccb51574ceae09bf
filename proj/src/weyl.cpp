#include "weylsheet/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "weylsheet/diffops.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/parallel.hpp"

namespace weylsheet {

namespace {

VectorJet raise(const MetricJet& m, const CovectorJet& w) {
  const Matrix2d inv = inverse_metric(m.a);
  VectorJet out;
  out.v = inv * w.w;
  for (int alpha = 0; alpha < 2; ++alpha) {
    const Matrix2d dinv = -inv * m.da[alpha] * inv;
    out.dv.row(alpha) = (dinv * w.w + inv * w.dw.row(alpha).transpose()).transpose();
  }
  return out;
}

VectorField raise(const MetricField& metric, const CovectorField& w) {
  const Chart& chart = metric.chart();
  if (!(chart == w.chart())) throw DomainError("metric and covector live on different charts");
  if (metric.analytic() && w.analytic()) {
    std::vector<VectorJet> jets(chart.size());
    parallel_for(chart.size(), [&](std::size_t k) {
      const int i = static_cast<int>(k / chart.n2()), j = static_cast<int>(k % chart.n2());
      jets[k] = raise(metric.jet(i, j), w.jet(i, j));
    });
    return VectorField::from_jets(chart, jets);
  }
  std::vector<Vector2d> values(chart.size());
  parallel_for(chart.size(), [&](std::size_t k) {
    values[k] = inverse_metric(metric.values()[k]) * w.values()[k];
  });
  return VectorField(chart, std::move(values));
}

}  // namespace

Christoffel weyl_connection(const MetricJet& m, const Vector2d& w) {
  Christoffel g = christoffel(m);
  const Vector2d up = inverse_metric(m.a) * w;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        g[s](a, b) -= 0.5 * (w[a] * (s == b) + w[b] * (s == a) - up[s] * m.a(a, b));
  return g;
}

Christoffel weyl_connection(const MetricField& metric, const CovectorField& w, int i, int j) {
  return weyl_connection(metric.jet(i, j), w(i, j));
}

MetricityResidual metricity_residual(const MetricJet& m, const Vector2d& w,
                                     const Christoffel& gamma) {
  MetricityResidual r;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double v = m.da[s](a, b) - w[s] * m.a(a, b);
        for (int l = 0; l < 2; ++l)
          v -= gamma[l](s, a) * m.a(l, b) + gamma[l](s, b) * m.a(a, l);
        r[s](a, b) = v;
      }
  return r;
}

MetricityResidual metricity_residual(const MetricJet& m, const Vector2d& w) {
  return metricity_residual(m, w, weyl_connection(m, w));
}

MetricityResidual metricity_residual(const MetricField& metric, const CovectorField& w, int i,
                                     int j) {
  return metricity_residual(metric.jet(i, j), w(i, j));
}

double max_abs(const MetricityResidual& r) {
  return std::max(r[0].cwiseAbs().maxCoeff(), r[1].cwiseAbs().maxCoeff());
}

VectorField WeylData::raised() const { return raise(metric, w); }

double transport_length(std::span<const Vector2d> path, const CovectorFunction& eps, double l0,
                        const Chart& chart, int subdivisions) {
  if (!(l0 > 0)) throw DomainError("reference length must be positive");
  if (subdivisions < 1) throw DomainError("subdivisions must be positive");
  if (path.empty()) throw DomainError("empty path");
  for (const Vector2d& p : path)
    if (!chart.contains(p[0], p[1])) throw DomainError("path leaves the chart");
  double integral = 0.0;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const Vector2d d = path[s + 1] - path[s];
    double sum = 0.0;
    for (int k = 0; k <= subdivisions; ++k) {
      const Vector2d p = path[s] + (static_cast<double>(k) / subdivisions) * d;
      const double weight = (k == 0 || k == subdivisions) ? 0.5 : 1.0;
      sum += weight * eps(p[0], p[1]).dot(d);
    }
    integral += sum / subdivisions;
  }
  return l0 * std::exp(integral);
}

double transport_length(std::span<const Vector2d> path, const CovectorField& eps, double l0,
                        int subdivisions) {
  return transport_length(
      path, [&eps](double u1, double u2) { return eps.interpolate(u1, u2); }, l0, eps.chart(),
      subdivisions);
}

std::pair<MetricJet, CovectorJet> gauge_transform(const MetricJet& m, const CovectorJet& w,
                                                  const ScalarJet& sigma) {
  const double e = std::exp(-2.0 * sigma.v);
  const Vector2d& ds = sigma.d;
  MetricJet out;
  out.a = e * m.a;
  for (int mu = 0; mu < 2; ++mu) out.da[mu] = e * (m.da[mu] - 2.0 * ds[mu] * m.a);
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int k = 0; k < 3; ++k) {
    const int mu = pairs[k][0], nu = pairs[k][1];
    out.dda[k] = e * (m.dda[k] - 2.0 * ds[mu] * m.da[nu] - 2.0 * ds[nu] * m.da[mu] -
                      2.0 * sigma.dd(mu, nu) * m.a + 4.0 * ds[mu] * ds[nu] * m.a);
  }
  CovectorJet wt;
  wt.w = w.w - 2.0 * ds;
  wt.dw = w.dw - 2.0 * sigma.dd;
  return {out, wt};
}

WeylData gauge_transform(const MetricField& metric, const CovectorField& w,
                         const ScalarField& sigma) {
  const Chart& chart = metric.chart();
  if (!(chart == w.chart()) || !(chart == sigma.chart()))
    throw DomainError("gauge transform inputs live on different charts");
  CovectorField wt = w + (-2.0) * CovectorField::differential(sigma);
  if (metric.analytic() && sigma.analytic()) {
    std::vector<MetricJet> jets(chart.size());
    parallel_for(chart.size(), [&](std::size_t k) {
      const int i = static_cast<int>(k / chart.n2()), j = static_cast<int>(k % chart.n2());
      jets[k] = gauge_transform(metric.jet(i, j), CovectorJet{}, sigma.jet(i, j)).first;
    });
    return {MetricField(chart, std::move(jets)), std::move(wt)};
  }
  std::vector<Matrix2d> values(chart.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    values[k] = std::exp(-2.0 * sigma.values()[k]) * metric.values()[k];
  return {MetricField(chart, std::move(values)), std::move(wt)};
}

double field_strength(const CovectorJet& eps) { return eps.dw(0, 1) - eps.dw(1, 0); }

ScalarField field_strength(const CovectorField& eps) {
  const Chart& chart = eps.chart();
  std::vector<double> values(chart.size());
  parallel_for(chart.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k / chart.n2()), j = static_cast<int>(k % chart.n2());
    values[k] = field_strength(eps.jet(i, j));
  });
  return ScalarField(chart, std::move(values));
}

double weyl_scalar(const MetricJet& m, const CovectorJet& w) {
  return 2.0 * intrinsic_gauss_curvature(m) + div_a_divergence_form(m, raise(m, w));
}

ScalarField weyl_scalar(const MetricField& metric, const CovectorField& w) {
  ScalarField K = intrinsic_gauss_curvature(metric);
  ScalarField div = div_a(metric, raise(metric, w));
  std::vector<double> values(K.values().size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = 2.0 * K.values()[k] + div.values()[k];
  return ScalarField(metric.chart(), std::move(values));
}

// ---------------------------------------------------------------------------

namespace {

void check_reference(double theta0, double l0) {
  if (!(theta0 >= 0) || !std::isfinite(theta0))
    throw DomainError("reference temperature must be nonnegative");
  if (!(l0 > 0) || !std::isfinite(l0)) throw DomainError("reference length must be positive");
}

template <class F>
double simpson(const F& f, double a, double fa, double b, double fb, double m, double fm,
               double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, m, fm, whole, tol, 50);
}

}  // namespace

ThermalProfile ThermalProfile::constant(double b, double theta0, double l0) {
  check_reference(theta0, l0);
  if (!(b >= 0 && b <= 1)) throw DomainError("expansion coefficient must lie in [0, 1]");
  ThermalProfile p;
  p.form_ = Form::Constant;
  p.c0_ = b;
  p.theta0_ = theta0;
  p.l0_ = l0;
  return p;
}

ThermalProfile ThermalProfile::inverse(double theta0, double l0) {
  check_reference(theta0, l0);
  if (!(theta0 >= 1)) throw DomainError("inverse profile needs theta0 >= 1 so that beta <= 1");
  ThermalProfile p;
  p.form_ = Form::Inverse;
  p.theta0_ = theta0;
  p.l0_ = l0;
  return p;
}

ThermalProfile ThermalProfile::linear(double c0, double c1, double theta0, double l0) {
  check_reference(theta0, l0);
  if (!std::isfinite(c0) || !std::isfinite(c1)) throw DomainError("non-finite profile coefficient");
  ThermalProfile p;
  p.form_ = Form::Linear;
  p.c0_ = c0;
  p.c1_ = c1;
  p.theta0_ = theta0;
  p.l0_ = l0;
  p.beta(theta0);
  return p;
}

ThermalProfile ThermalProfile::tabulated(std::vector<double> theta, std::vector<double> beta,
                                         double theta0, double l0) {
  check_reference(theta0, l0);
  if (theta.size() != beta.size() || theta.size() < 2)
    throw DomainError("tabulated profile needs at least two (theta, beta) pairs");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!std::isfinite(theta[k]) || theta[k] < 0)
      throw DomainError("tabulated temperatures must be finite and nonnegative");
    if (k > 0 && !(theta[k] > theta[k - 1]))
      throw DomainError("tabulated temperatures must be strictly increasing");
    if (!(beta[k] >= 0 && beta[k] <= 1))
      throw DomainError("tabulated expansion coefficient outside [0, 1]");
  }
  ThermalProfile p;
  p.form_ = Form::Tabulated;
  p.theta_min_ = theta.front();
  p.theta_max_ = theta.back();
  p.table_theta_ = std::move(theta);
  p.table_beta_ = std::move(beta);
  p.theta0_ = theta0;
  p.l0_ = l0;
  p.check_range(theta0);
  return p;
}

ThermalProfile& ThermalProfile::with_range(double theta_min, double theta_max) {
  if (!(theta_min >= 0) || !(theta_max >= theta_min))
    throw DomainError("invalid temperature range");
  if (form_ == Form::Tabulated &&
      (theta_min < table_theta_.front() || theta_max > table_theta_.back()))
    throw DomainError("temperature range exceeds the table");
  theta_min_ = theta_min;
  theta_max_ = theta_max;
  check_range(theta0_);
  return *this;
}

void ThermalProfile::check_range(double theta) const {
  if (!std::isfinite(theta)) throw DomainError("non-finite temperature");
  if (theta < 0) throw DomainError("negative temperature " + std::to_string(theta));
  if (theta < theta_min_ || theta > theta_max_)
    throw DomainError("temperature " + std::to_string(theta) + " outside the profile range");
}

namespace {

std::size_t segment(const std::vector<double>& t, double theta) {
  const auto it = std::upper_bound(t.begin(), t.end(), theta);
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  return std::clamp<std::size_t>(k, 1, t.size() - 1) - 1;
}

}  // namespace

double ThermalProfile::beta(double theta) const {
  check_range(theta);
  double b = 0.0;
  switch (form_) {
    case Form::Constant: b = c0_; break;
    case Form::Inverse: b = 1.0 / theta; break;
    case Form::Linear: b = c0_ + c1_ * theta; break;
    case Form::Tabulated: {
      const std::size_t k = segment(table_theta_, theta);
      const double s = (theta - table_theta_[k]) / (table_theta_[k + 1] - table_theta_[k]);
      b = (1 - s) * table_beta_[k] + s * table_beta_[k + 1];
      break;
    }
  }
  if (!(b >= -1e-12 && b <= 1 + 1e-12))
    throw DomainError("expansion coefficient " + std::to_string(b) + " outside [0, 1] at theta " +
                      std::to_string(theta));
  return b;
}

double ThermalProfile::beta_derivative(double theta) const {
  switch (form_) {
    case Form::Constant: return 0.0;
    case Form::Inverse: return -1.0 / (theta * theta);
    case Form::Linear: return c1_;
    case Form::Tabulated: {
      const std::size_t k = segment(table_theta_, theta);
      return (table_beta_[k + 1] - table_beta_[k]) / (table_theta_[k + 1] - table_theta_[k]);
    }
  }
  return 0.0;
}

double ThermalProfile::sigma(double theta) const {
  check_range(theta);
  const double lo = std::min(theta, theta0_), hi = std::max(theta, theta0_);
  const double sign = theta >= theta0_ ? 1.0 : -1.0;
  auto f = [this](double t) { return beta(t); };
  if (form_ != Form::Tabulated) return sign * adaptive_simpson(f, lo, hi, 1e-10);
  // β is only piecewise smooth: integrate between breakpoints
  double total = 0.0, a = lo;
  for (double t : table_theta_) {
    if (t <= a) continue;
    if (t >= hi) break;
    total += adaptive_simpson(f, a, t, 1e-10);
    a = t;
  }
  total += adaptive_simpson(f, a, hi, 1e-10);
  return sign * total;
}

double ThermalProfile::length(double theta) const { return l0_ * std::exp(sigma(theta)); }

ThermalEpsilon thermal_epsilon(const ThermalProfile& profile, const ScalarField& theta) {
  const Chart& chart = theta.chart();
  for (std::size_t k = 0; k < chart.size(); ++k)
    if (!(theta.values()[k] >= 0))
      throw DomainError("negative temperature at node " + std::to_string(k / chart.n2()) + "," +
                        std::to_string(k % chart.n2()));
  std::vector<CovectorJet> eps(chart.size());
  std::vector<ScalarJet> sig(chart.size());
  ThermalEpsilon out;
  out.violation.assign(chart.size(), 0);
  parallel_for(chart.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k / chart.n2()), j = static_cast<int>(k % chart.n2());
    const ScalarJet t = theta.jet(i, j);
    const double b = profile.beta(t.v);
    const double db = profile.beta_derivative(t.v);
    eps[k].w = b * t.d;
    eps[k].dw = db * t.d * t.d.transpose() + b * t.dd;
    sig[k].v = profile.sigma(t.v);
    sig[k].d = eps[k].w;
    sig[k].dd = eps[k].dw;
    for (int a = 0; a < 2; ++a)
      if (t.d[a] >= 0 && (eps[k].w[a] < 0 || eps[k].w[a] > 1)) out.violation[k] = 1;
  });
  for (std::size_t k = 0; k < chart.size(); ++k) {
    out.violation_count += out.violation[k];
    if (eps[k].w.minCoeff() < 0) out.negative_component_warning = true;
  }
  if (theta.analytic()) {
    out.eps = CovectorField::from_jets(chart, eps);
    out.sigma = ScalarField::from_jets(chart, std::move(sig));
  } else {
    std::vector<Vector2d> w(chart.size());
    std::vector<double> s(chart.size());
    for (std::size_t k = 0; k < chart.size(); ++k) {
      w[k] = eps[k].w;
      s[k] = sig[k].v;
    }
    out.eps = CovectorField(chart, std::move(w));
    out.sigma = ScalarField(chart, std::move(s));
  }
  return out;
}

double thermal_length(const ThermalProfile& profile, double theta) {
  return profile.length(theta);
}

}  // namespace weylsheet

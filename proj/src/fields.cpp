#include "weylsheet/fields.hpp"

#include <algorithm>
#include <cmath>

#include "weylsheet/parallel.hpp"

namespace weylsheet {

namespace {

using T2 = Taylor2<2>;

std::array<T2, 2> point_vars(double u1, double u2) {
  return {T2::variable(0, u1), T2::variable(1, u2)};
}

ScalarJet to_jet(const T2& t) {
  ScalarJet j;
  j.v = t.value();
  j.d = {t.derivative(1, 0), t.derivative(0, 1)};
  j.dd << t.derivative(2, 0), t.derivative(1, 1), t.derivative(1, 1), t.derivative(0, 2);
  return j;
}

template <class Fn>
void for_each_node(const Chart& chart, Fn&& fn) {
  parallel_for(static_cast<std::size_t>(chart.n1()), [&](std::size_t i) {
    for (int j = 0; j < chart.n2(); ++j) fn(static_cast<int>(i), j);
  });
}

}  // namespace

ScalarJet scalar_jet(const Expr& f, double u1, double u2) {
  const auto vars = point_vars(u1, u2);
  return to_jet(f.eval<T2>(vars));
}

VectorJet vector_jet(const Expr& v1, const Expr& v2, double u1, double u2) {
  const ScalarJet a = scalar_jet(v1, u1, u2);
  const ScalarJet b = scalar_jet(v2, u1, u2);
  VectorJet out;
  out.v = {a.v, b.v};
  out.dv.col(0) = a.d;
  out.dv.col(1) = b.d;
  return out;
}

CovectorJet covector_jet(const Expr& w1, const Expr& w2, double u1, double u2) {
  const VectorJet v = vector_jet(w1, w2, u1, u2);
  return {v.v, v.dv};
}

MetricJet metric_jet(const Expr& a11, const Expr& a12, const Expr& a22, double u1, double u2) {
  const ScalarJet c[3] = {scalar_jet(a11, u1, u2), scalar_jet(a12, u1, u2),
                          scalar_jet(a22, u1, u2)};
  auto assemble = [&](auto&& pick) {
    Matrix2d m;
    m << pick(c[0]), pick(c[1]), pick(c[1]), pick(c[2]);
    return m;
  };
  MetricJet m;
  m.a = assemble([](const ScalarJet& s) { return s.v; });
  for (int k = 0; k < 2; ++k) m.da[k] = assemble([k](const ScalarJet& s) { return s.d[k]; });
  m.dda[0] = assemble([](const ScalarJet& s) { return s.dd(0, 0); });
  m.dda[1] = assemble([](const ScalarJet& s) { return s.dd(0, 1); });
  m.dda[2] = assemble([](const ScalarJet& s) { return s.dd(1, 1); });
  return m;
}

Matrix2d inverse_metric(const Matrix2d& a) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double scale = a.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > 1e-14 * scale * scale) || !std::isfinite(det))
    throw DegenerateError("singular metric (det a = " + std::to_string(det) + ")");
  Matrix2d inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv / det;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Chart chart, std::vector<double> values)
    : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.size()) throw DomainError("scalar field shape does not match chart");
}

ScalarField::ScalarField(Chart chart, double constant)
    : chart_(std::move(chart)), values_(chart_.size(), constant) {}

ScalarField ScalarField::from_expr(const Chart& chart, const Expr& f) {
  std::vector<ScalarJet> jets(chart.size());
  for_each_node(chart, [&](int i, int j) {
    jets[chart.index(i, j)] = scalar_jet(f, chart.coord(0, i), chart.coord(1, j));
  });
  std::vector<double> values(chart.size());
  for (std::size_t k = 0; k < jets.size(); ++k) values[k] = jets[k].v;
  ScalarField out(chart, std::move(values));
  out.jets_ = std::move(jets);
  return out;
}

ScalarField ScalarField::from_function(const Chart& chart,
                                       const std::function<double(double, double)>& f) {
  std::vector<double> values(chart.size());
  for_each_node(chart, [&](int i, int j) {
    values[chart.index(i, j)] = f(chart.coord(0, i), chart.coord(1, j));
  });
  return ScalarField(chart, std::move(values));
}

ScalarField ScalarField::from_jets(const Chart& chart, std::vector<ScalarJet> jets) {
  if (jets.size() != chart.size()) throw DomainError("scalar jets do not match chart");
  std::vector<double> values(chart.size());
  for (std::size_t k = 0; k < jets.size(); ++k) values[k] = jets[k].v;
  ScalarField out(chart, std::move(values));
  out.jets_ = std::move(jets);
  return out;
}

ScalarJet ScalarField::jet(int i, int j) const {
  if (jets_) return (*jets_)[chart_.index(i, j)];
  auto get = [this](int a, int b) { return values_[chart_.index(a, b)]; };
  ScalarJet out;
  out.v = get(i, j);
  out.d = {fd_first(chart_, 0, i, j, get, 4), fd_first(chart_, 1, i, j, get, 4)};
  const double d12 = fd_mixed(chart_, i, j, get, 4);
  out.dd << fd_second(chart_, 0, i, j, get, 4), d12, d12, fd_second(chart_, 1, i, j, get, 4);
  return out;
}

Vector2d ScalarField::gradient(int i, int j) const {
  if (jets_) return (*jets_)[chart_.index(i, j)].d;
  auto get = [this](int a, int b) { return values_[chart_.index(a, b)]; };
  return {fd_first(chart_, 0, i, j, get), fd_first(chart_, 1, i, j, get)};
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------

VectorField::VectorField(Chart chart, std::vector<Vector2d> values)
    : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.size()) throw DomainError("vector field shape does not match chart");
}

VectorField VectorField::from_expr(const Chart& chart, const Expr& v1, const Expr& v2) {
  std::vector<Vector2d> values(chart.size());
  std::vector<Matrix2d> derivs(chart.size());
  for_each_node(chart, [&](int i, int j) {
    const VectorJet jv = vector_jet(v1, v2, chart.coord(0, i), chart.coord(1, j));
    values[chart.index(i, j)] = jv.v;
    derivs[chart.index(i, j)] = jv.dv;
  });
  VectorField out(chart, std::move(values));
  out.derivs_ = std::move(derivs);
  return out;
}

VectorField VectorField::from_function(const Chart& chart,
                                       const std::function<Vector2d(double, double)>& f) {
  std::vector<Vector2d> values(chart.size());
  for_each_node(chart, [&](int i, int j) {
    values[chart.index(i, j)] = f(chart.coord(0, i), chart.coord(1, j));
  });
  return VectorField(chart, std::move(values));
}

VectorField VectorField::from_jets(const Chart& chart, const std::vector<VectorJet>& jets) {
  if (jets.size() != chart.size()) throw DomainError("vector jets do not match chart");
  std::vector<Vector2d> values(chart.size());
  std::vector<Matrix2d> derivs(chart.size());
  for (std::size_t k = 0; k < jets.size(); ++k) {
    values[k] = jets[k].v;
    derivs[k] = jets[k].dv;
  }
  VectorField out(chart, std::move(values));
  out.derivs_ = std::move(derivs);
  return out;
}

VectorJet VectorField::jet(int i, int j) const {
  VectorJet out;
  out.v = values_[chart_.index(i, j)];
  if (derivs_) {
    out.dv = (*derivs_)[chart_.index(i, j)];
    return out;
  }
  auto get = [this](int a, int b) -> Vector2d { return values_[chart_.index(a, b)]; };
  out.dv.row(0) = fd_first(chart_, 0, i, j, get).transpose();
  out.dv.row(1) = fd_first(chart_, 1, i, j, get).transpose();
  return out;
}

VectorField operator*(double s, const VectorField& v) {
  VectorField out = v;
  for (auto& x : out.values_) x *= s;
  if (out.derivs_)
    for (auto& d : *out.derivs_) d *= s;
  if (out.flux_) {
    for (auto* part : {&out.flux_->face1, &out.flux_->face2, &out.flux_->cross1,
                       &out.flux_->cross2})
      for (double& x : *part) x *= s;
  }
  return out;
}

// ---------------------------------------------------------------------------

CovectorField::CovectorField(Chart chart, std::vector<Vector2d> values)
    : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.size())
    throw DomainError("covector field shape does not match chart");
}

CovectorField CovectorField::from_expr(const Chart& chart, const Expr& w1, const Expr& w2) {
  const VectorField v = VectorField::from_expr(chart, w1, w2);
  CovectorField out(chart, v.values());
  std::vector<Matrix2d> derivs(chart.size());
  for (int i = 0; i < chart.n1(); ++i)
    for (int j = 0; j < chart.n2(); ++j) derivs[chart.index(i, j)] = v.jet(i, j).dv;
  out.derivs_ = std::move(derivs);
  return out;
}

CovectorField CovectorField::from_jets(const Chart& chart, const std::vector<CovectorJet>& jets) {
  if (jets.size() != chart.size()) throw DomainError("covector jets do not match chart");
  std::vector<Vector2d> values(chart.size());
  std::vector<Matrix2d> derivs(chart.size());
  for (std::size_t k = 0; k < jets.size(); ++k) {
    values[k] = jets[k].w;
    derivs[k] = jets[k].dw;
  }
  CovectorField out(chart, std::move(values));
  out.derivs_ = std::move(derivs);
  return out;
}

CovectorField CovectorField::differential(const ScalarField& sigma) {
  const Chart& chart = sigma.chart();
  std::vector<Vector2d> values(chart.size());
  for (int i = 0; i < chart.n1(); ++i)
    for (int j = 0; j < chart.n2(); ++j) values[chart.index(i, j)] = sigma.gradient(i, j);
  CovectorField out(chart, std::move(values));
  if (sigma.analytic()) {
    std::vector<Matrix2d> derivs(chart.size());
    for (int i = 0; i < chart.n1(); ++i)
      for (int j = 0; j < chart.n2(); ++j) derivs[chart.index(i, j)] = sigma.jet(i, j).dd;
    out.derivs_ = std::move(derivs);
  }
  return out;
}

CovectorJet CovectorField::jet(int i, int j) const {
  CovectorJet out;
  out.w = values_[chart_.index(i, j)];
  if (derivs_) {
    out.dw = (*derivs_)[chart_.index(i, j)];
    return out;
  }
  auto get = [this](int a, int b) -> Vector2d { return values_[chart_.index(a, b)]; };
  out.dw.row(0) = fd_first(chart_, 0, i, j, get).transpose();
  out.dw.row(1) = fd_first(chart_, 1, i, j, get).transpose();
  return out;
}

Vector2d CovectorField::interpolate(double u1, double u2) const {
  if (!chart_.contains(u1, u2)) throw DomainError("point outside chart");
  auto locate = [this](int axis, double u, int& k, double& t) {
    const double x = (u - chart_.min(axis)) / chart_.h(axis);
    k = std::clamp(static_cast<int>(std::floor(x)), 0, chart_.n(axis) - 2);
    t = std::clamp(x - k, 0.0, 1.0);
  };
  int i, j;
  double s, t;
  locate(0, u1, i, s);
  locate(1, u2, j, t);
  return (1 - s) * (1 - t) * (*this)(i, j) + s * (1 - t) * (*this)(i + 1, j) +
         (1 - s) * t * (*this)(i, j + 1) + s * t * (*this)(i + 1, j + 1);
}

CovectorField operator+(const CovectorField& a, const CovectorField& b) {
  if (!(a.chart_ == b.chart_)) throw DomainError("covector fields live on different charts");
  CovectorField out = a;
  for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] += b.values_[k];
  if (a.derivs_ && b.derivs_) {
    for (std::size_t k = 0; k < out.values_.size(); ++k) (*out.derivs_)[k] += (*b.derivs_)[k];
  } else {
    out.derivs_.reset();
  }
  return out;
}

CovectorField operator*(double s, const CovectorField& a) {
  CovectorField out = a;
  for (auto& x : out.values_) x *= s;
  if (out.derivs_)
    for (auto& d : *out.derivs_) d *= s;
  return out;
}

// ---------------------------------------------------------------------------

MetricField::MetricField(Chart chart, std::vector<Matrix2d> values)
    : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.size()) throw DomainError("metric field shape does not match chart");
  validate();
}

MetricField::MetricField(Chart chart, std::vector<MetricJet> jets) : chart_(std::move(chart)) {
  if (jets.size() != chart_.size()) throw DomainError("metric field shape does not match chart");
  values_.resize(jets.size());
  for (std::size_t k = 0; k < jets.size(); ++k) values_[k] = jets[k].a;
  jets_ = std::move(jets);
  validate();
}

MetricField MetricField::from_expr(const Chart& chart, const Expr& a11, const Expr& a12,
                                   const Expr& a22) {
  return from_jet_function(
      chart, [&](double u1, double u2) { return metric_jet(a11, a12, a22, u1, u2); });
}

MetricField MetricField::from_jet_function(const Chart& chart,
                                           const std::function<MetricJet(double, double)>& f) {
  std::vector<MetricJet> jets(chart.size());
  for_each_node(chart, [&](int i, int j) {
    jets[chart.index(i, j)] = f(chart.coord(0, i), chart.coord(1, j));
  });
  return MetricField(chart, std::move(jets));
}

MetricField MetricField::flat(const Chart& chart) {
  return MetricField(chart, std::vector<MetricJet>(chart.size()));
}

void MetricField::validate() const {
  for (const Matrix2d& a : values_) {
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (!a.allFinite()) throw DegenerateError("metric has non-finite entries");
    if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * a.cwiseAbs().maxCoeff())
      throw DegenerateError("metric is not symmetric");
    if (!(a(0, 0) > 0.0) || !(det > 0.0))
      throw DegenerateError("metric is not positive definite (det a = " + std::to_string(det) +
                            ")");
  }
}

MetricJet MetricField::jet(int i, int j) const {
  if (jets_) return (*jets_)[chart_.index(i, j)];
  auto get = [this](int a, int b) -> Matrix2d { return values_[chart_.index(a, b)]; };
  MetricJet out;
  out.a = get(i, j);
  out.da[0] = fd_first(chart_, 0, i, j, get, 4);
  out.da[1] = fd_first(chart_, 1, i, j, get, 4);
  out.dda[0] = fd_second(chart_, 0, i, j, get, 4);
  out.dda[1] = fd_mixed(chart_, i, j, get, 4);
  out.dda[2] = fd_second(chart_, 1, i, j, get, 4);
  return out;
}

double MetricField::sqrt_det(int i, int j) const {
  const Matrix2d& a = (*this)(i, j);
  return std::sqrt(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
}

}  // namespace weylsheet

#pragma once

// Sampled fields on a Chart and the pointwise jets (value plus derivatives)
// that all differential formulas consume. A field built from an expression
// carries exact derivative samples; otherwise jets come from finite differences.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "weylsheet/chart.hpp"
#include "weylsheet/expr.hpp"

namespace weylsheet {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

struct ScalarJet {
  double v = 0.0;
  Vector2d d = Vector2d::Zero();
  Matrix2d dd = Matrix2d::Zero();
};

/// dv(alpha, k) = ∂_alpha v^k.
struct VectorJet {
  Vector2d v = Vector2d::Zero();
  Matrix2d dv = Matrix2d::Zero();
};

/// dw(alpha, beta) = ∂_alpha w_beta.
struct CovectorJet {
  Vector2d w = Vector2d::Zero();
  Matrix2d dw = Matrix2d::Zero();
};

/// Metric with first and second partial derivatives; dda = {∂11, ∂12, ∂22}.
struct MetricJet {
  Matrix2d a = Matrix2d::Identity();
  std::array<Matrix2d, 2> da{Matrix2d::Zero(), Matrix2d::Zero()};
  std::array<Matrix2d, 3> dda{Matrix2d::Zero(), Matrix2d::Zero(), Matrix2d::Zero()};

  const Matrix2d& second(int alpha, int beta) const { return dda[alpha + beta]; }
};

ScalarJet scalar_jet(const Expr& f, double u1, double u2);
VectorJet vector_jet(const Expr& v1, const Expr& v2, double u1, double u2);
CovectorJet covector_jet(const Expr& w1, const Expr& w2, double u1, double u2);
/// Metric from expressions for a11, a12, a22.
MetricJet metric_jet(const Expr& a11, const Expr& a12, const Expr& a22, double u1, double u2);

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(Chart chart, std::vector<double> values);
  ScalarField(Chart chart, double constant);

  static ScalarField from_expr(const Chart& chart, const Expr& f);
  static ScalarField from_function(const Chart& chart,
                                   const std::function<double(double, double)>& f);
  /// Values and exact derivatives taken from the jets.
  static ScalarField from_jets(const Chart& chart, std::vector<ScalarJet> jets);

  const Chart& chart() const { return chart_; }
  double operator()(int i, int j) const { return values_[chart_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[chart_.index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  bool analytic() const { return jets_.has_value(); }
  /// Drops analytic derivatives so that jets come from finite differences.
  ScalarField sampled() const { return ScalarField(chart_, values_); }

  ScalarJet jet(int i, int j) const;
  Vector2d gradient(int i, int j) const;

  double max_abs() const;

 private:
  Chart chart_;
  std::vector<double> values_;
  std::optional<std::vector<ScalarJet>> jets_;
};

/// Conservative-form data attached by grad-type operators: face fluxes along
/// each axis plus the node-centred cross terms, so that div_a reproduces the
/// symmetric divergence-form stencil exactly.
struct FluxData {
  std::vector<double> face1;   // (n1-1) x n2, C^{11} ∂1 f at (i+1/2, j)
  std::vector<double> face2;   // n1 x (n2-1), C^{22} ∂2 f at (i, j+1/2)
  std::vector<double> cross1;  // n1 x n2, C^{12} ∂2 f, differenced along u1
  std::vector<double> cross2;  // n1 x n2, C^{12} ∂1 f, differenced along u2
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(Chart chart, std::vector<Vector2d> values);

  static VectorField from_expr(const Chart& chart, const Expr& v1, const Expr& v2);
  static VectorField from_function(const Chart& chart,
                                   const std::function<Vector2d(double, double)>& f);
  static VectorField from_jets(const Chart& chart, const std::vector<VectorJet>& jets);

  const Chart& chart() const { return chart_; }
  const Vector2d& operator()(int i, int j) const { return values_[chart_.index(i, j)]; }
  const std::vector<Vector2d>& values() const { return values_; }
  bool analytic() const { return derivs_.has_value(); }
  const std::optional<FluxData>& flux() const { return flux_; }
  void set_flux(FluxData flux) { flux_ = std::move(flux); }

  VectorJet jet(int i, int j) const;

  friend VectorField operator*(double s, const VectorField& v);

 private:
  Chart chart_;
  std::vector<Vector2d> values_;
  std::optional<std::vector<Matrix2d>> derivs_;
  std::optional<FluxData> flux_;
};

class CovectorField {
 public:
  CovectorField() = default;
  CovectorField(Chart chart, std::vector<Vector2d> values);

  static CovectorField from_expr(const Chart& chart, const Expr& w1, const Expr& w2);
  /// dσ, exact when σ carries analytic derivatives.
  static CovectorField differential(const ScalarField& sigma);
  static CovectorField from_jets(const Chart& chart, const std::vector<CovectorJet>& jets);

  const Chart& chart() const { return chart_; }
  const Vector2d& operator()(int i, int j) const { return values_[chart_.index(i, j)]; }
  const std::vector<Vector2d>& values() const { return values_; }
  bool analytic() const { return derivs_.has_value(); }

  CovectorJet jet(int i, int j) const;
  /// Bilinear interpolation inside the chart.
  Vector2d interpolate(double u1, double u2) const;

  friend CovectorField operator+(const CovectorField& a, const CovectorField& b);
  friend CovectorField operator*(double s, const CovectorField& a);

 private:
  Chart chart_;
  std::vector<Vector2d> values_;
  std::optional<std::vector<Matrix2d>> derivs_;
};

class MetricField {
 public:
  MetricField() = default;
  /// Node values only; derivatives by finite differences.
  MetricField(Chart chart, std::vector<Matrix2d> values);
  /// Exact jets at every node.
  MetricField(Chart chart, std::vector<MetricJet> jets);

  static MetricField from_expr(const Chart& chart, const Expr& a11, const Expr& a12,
                               const Expr& a22);
  static MetricField from_jet_function(const Chart& chart,
                                       const std::function<MetricJet(double, double)>& f);
  static MetricField flat(const Chart& chart);

  const Chart& chart() const { return chart_; }
  const Matrix2d& operator()(int i, int j) const { return values_[chart_.index(i, j)]; }
  const std::vector<Matrix2d>& values() const { return values_; }
  bool analytic() const { return jets_.has_value(); }
  MetricField sampled() const { return MetricField(chart_, values_); }

  MetricJet jet(int i, int j) const;
  double sqrt_det(int i, int j) const;

 private:
  void validate() const;

  Chart chart_;
  std::vector<Matrix2d> values_;
  std::optional<std::vector<MetricJet>> jets_;
};

/// Inverse of a 2x2 metric, refusing singular input.
Matrix2d inverse_metric(const Matrix2d& a);

}  // namespace weylsheet

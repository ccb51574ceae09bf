#pragma once

// Weyl connections Γ(a) - ½(w_α δ^σ_β + w_β δ^σ_α - w^σ a_{αβ}), the metricity
// law ∇a = w ⊗ a, length transport, gauge transformations and the thermal
// covector ε = β(θ) dθ with w = 2ε.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "weylsheet/fields.hpp"
#include "weylsheet/geometry.hpp"

namespace weylsheet {

Christoffel weyl_connection(const MetricJet& m, const Vector2d& w);
Christoffel weyl_connection(const MetricField& metric, const CovectorField& w, int i, int j);

/// res[sigma](alpha, beta) = ∂_σ a_{αβ} - Γ^λ_{σα} a_{λβ} - Γ^λ_{σβ} a_{αλ} - w_σ a_{αβ}.
using MetricityResidual = std::array<Matrix2d, 2>;

MetricityResidual metricity_residual(const MetricJet& m, const Vector2d& w, const Christoffel& gamma);
MetricityResidual metricity_residual(const MetricJet& m, const Vector2d& w);
MetricityResidual metricity_residual(const MetricField& metric, const CovectorField& w, int i, int j);
double max_abs(const MetricityResidual& r);

/// Bundles a metric with its thermal-state covector.
struct WeylData {
  MetricField metric;
  CovectorField w;

  Christoffel connection(int i, int j) const { return weyl_connection(metric, w, i, j); }
  /// w^α = a^{αβ} w_β.
  VectorField raised() const;
};

using CovectorFunction = std::function<Vector2d(double, double)>;

/// l0 exp(∫ ε) along the polyline; each segment uses composite trapezoid
/// quadrature with `subdivisions` panels.
double transport_length(std::span<const Vector2d> path, const CovectorFunction& eps, double l0,
                        const Chart& chart, int subdivisions = 64);
double transport_length(std::span<const Vector2d> path, const CovectorField& eps, double l0,
                        int subdivisions = 64);

/// (e^{-2σ} a, w - 2dσ) with exact derivative propagation.
std::pair<MetricJet, CovectorJet> gauge_transform(const MetricJet& m, const CovectorJet& w,
                                                  const ScalarJet& sigma);
WeylData gauge_transform(const MetricField& metric, const CovectorField& w,
                         const ScalarField& sigma);

/// F_12 = ∂_1 ε_2 - ∂_2 ε_1.
double field_strength(const CovectorJet& eps);
ScalarField field_strength(const CovectorField& eps);

/// 2K + div_a(w^♯).
double weyl_scalar(const MetricJet& m, const CovectorJet& w);
ScalarField weyl_scalar(const MetricField& metric, const CovectorField& w);

class ThermalProfile {
 public:
  enum class Form { Constant, Inverse, Linear, Tabulated };

  /// β = b.
  static ThermalProfile constant(double b, double theta0, double l0);
  /// β = 1/θ.
  static ThermalProfile inverse(double theta0, double l0);
  /// β = c0 + c1 θ.
  static ThermalProfile linear(double c0, double c1, double theta0, double l0);
  /// Piecewise linear β through (θ_k, β_k), θ strictly increasing.
  static ThermalProfile tabulated(std::vector<double> theta, std::vector<double> beta,
                                  double theta0, double l0);

  /// Restrict the admissible temperature range.
  ThermalProfile& with_range(double theta_min, double theta_max);

  Form form() const { return form_; }
  double theta0() const { return theta0_; }
  double l0() const { return l0_; }
  double theta_min() const { return theta_min_; }
  double theta_max() const { return theta_max_; }

  /// Throws DomainError outside the range or when β leaves [0, 1].
  double beta(double theta) const;
  /// ∫_{θ0}^{θ} β, adaptive Simpson with absolute tolerance 1e-10.
  double sigma(double theta) const;
  /// dβ/dθ (one-sided slope of the segment for tabulated profiles).
  double beta_derivative(double theta) const;
  /// l0 exp(σ(θ)).
  double length(double theta) const;

 private:
  ThermalProfile() = default;
  void check_range(double theta) const;

  Form form_ = Form::Constant;
  double c0_ = 0.0, c1_ = 0.0;
  std::vector<double> table_theta_, table_beta_;
  double theta0_ = 0.0, l0_ = 1.0;
  double theta_min_ = 0.0;
  double theta_max_ = 1e300;
};

struct ThermalEpsilon {
  CovectorField eps;
  ScalarField sigma;
  /// Nodes where some component with ∂_α θ >= 0 has ε_α outside [0, 1].
  std::vector<char> violation;
  std::size_t violation_count = 0;
  /// Some ε_α < 0 somewhere (global sign condition, reported only).
  bool negative_component_warning = false;

  /// w = 2ε.
  CovectorField weyl_covector() const { return 2.0 * eps; }
};

/// ε = β(θ) dθ and σ(θ) per node. Throws on negative θ or β outside [0, 1].
ThermalEpsilon thermal_epsilon(const ThermalProfile& profile, const ScalarField& theta);

double thermal_length(const ThermalProfile& profile, double theta);

}  // namespace weylsheet

#pragma once

// The isothermal state equation div_a v + 2K = r, its reduction Δ_a σ + K = r/2
// for v = 2 grad_a σ, conformal rescaling a_θ = e^{-2σ} a and the thermal
// shape parameter ν = H/(l K).

#include <optional>
#include <vector>

#include "weylsheet/fields.hpp"

namespace weylsheet {

struct ThermalStateProblem {
  MetricField metric;
  ScalarField K;
  double r = 0.0;
  /// Dirichlet values on the open edges; zero when absent. Ignored on fully
  /// periodic charts, where the mean of σ is fixed to 0 instead.
  std::optional<ScalarField> boundary;
  /// Absolute tolerance on ‖Δ_a σ + K - r/2‖_∞; 0 selects 1e-10 * scale.
  double tolerance = 0.0;
  int max_iterations = 0;  // 0: automatic
};

struct SolveReport {
  ScalarField sigma;
  /// max |Δ_a σ + K - r/2| over the solved nodes, recomputed from sigma.
  double residual_inf = 0.0;
  int iterations = 0;
  /// ∬(r/2 - K)|a|^{1/2} du; zero unless the chart is fully periodic.
  double compatibility_defect = 0.0;
  std::vector<char> solved;
  /// max(1, max |r/2 - K|).
  double scale = 1.0;
  double tolerance = 0.0;
};

/// Preconditioned conjugate gradients on the symmetric divergence-form stencil.
/// Throws NumericalError for incompatible periodic data or when the iteration
/// cap is hit.
SolveReport solve_sigma(const ThermalStateProblem& problem);

/// div_a v + 2K - r.
ScalarField state_residual(const MetricField& metric, const VectorField& v, const ScalarField& K,
                           double r);

/// e^{-2σ} a (exact jets when both inputs are analytic).
MetricField conformal_metric(const MetricField& metric, const ScalarField& sigma);

enum class LaplacianScheme {
  Pointwise,  // from the node jets of σ and the metric
  Flux,       // the solver's stencil, so a solved σ gives (r/2)e^{2σ} to solver tolerance
};

/// e^{2σ}(Δ_a σ + K).
ScalarField conformal_curvature(const ScalarField& K, const ScalarField& sigma,
                                const MetricField& metric,
                                LaplacianScheme scheme = LaplacianScheme::Pointwise);

struct SignVerdict {
  double min = 0.0, max = 0.0;
  bool positive = false;  // every value > tolerance
  bool negative = false;  // every value < -tolerance
  bool zero = false;      // every |value| <= tolerance
  bool constant_sign() const { return positive || negative || zero; }
};

/// Sign of f over the masked nodes (all nodes when mask is empty).
SignVerdict sign_verdict(const ScalarField& f, const std::vector<char>& mask, double tolerance);

struct ShapeParameter {
  ScalarField nu;
  /// 1 where K != 0 and ν is defined.
  std::vector<char> valid;
  std::size_t excluded = 0;
};

/// H/(l K), excluding nodes with |K| <= 1e-10 max(1, max H^2). Throws
/// DegenerateError when no node remains and DomainError for l <= 0.
ShapeParameter shape_parameter(const ScalarField& H, const ScalarField& K, double l_theta);

/// Δ_a θ.
ScalarField harmonic_theta_residual(const MetricField& metric, const ScalarField& theta);

}  // namespace weylsheet

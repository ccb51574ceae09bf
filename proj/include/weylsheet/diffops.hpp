#pragma once

// Metric-aware differential operators on charts, plus the 3D curl.
//
// Grid operators are second order. grad_a attaches conservative flux data to
// its result so that div_a(grad_a f) is exactly the symmetric divergence-form
// stencil of DivergenceStencil; the thermal solver uses the same stencil.

#include <array>
#include <functional>
#include <vector>

#include "weylsheet/fields.hpp"

namespace weylsheet {

// --- pointwise, from jets ---------------------------------------------------

/// a^{ab} ∂_b f.
Vector2d grad_a(const MetricJet& m, const ScalarJet& f);
/// |a|^{-1/2} ∂_k(|a|^{1/2} v^k).
double div_a_divergence_form(const MetricJet& m, const VectorJet& v);
/// ∂_k v^k + Γ^k_{kl} v^l.
double div_a_christoffel_form(const MetricJet& m, const VectorJet& v);
/// |a|^{-1/2} ∂_i(|a|^{1/2} a^{ij} ∂_j f), expanded with the product rule.
double laplace_beltrami_divergence_form(const MetricJet& m, const ScalarJet& f);
/// a^{ij} ∂_i ∂_j f - Γ^k ∂_k f with Γ^k = a^{ij} Γ^k_{ij}.
double laplace_beltrami_christoffel_form(const MetricJet& m, const ScalarJet& f);

// --- grid ---------------------------------------------------------------------

/// Nine-point symmetric stencil of f -> ∂_α(C^{αβ} ∂_β f) at interior nodes,
/// with C sampled at nodes and averaged to half nodes on the diagonal terms.
class DivergenceStencil {
 public:
  struct Entry {
    std::size_t node;  // canonical node index
    double weight;
  };
  using Row = std::array<Entry, 9>;

  DivergenceStencil(Chart chart, std::vector<Matrix2d> coeff);

  const Chart& chart() const { return chart_; }
  const std::vector<Matrix2d>& coeff() const { return coeff_; }
  /// Interior nodes only (at least one node from every open edge).
  Row row(int i, int j) const;
  double apply(const std::vector<double>& f, int i, int j) const;

 private:
  Chart chart_;
  std::vector<Matrix2d> coeff_;
};

/// Node values a^{-1}∇f (one-sided at open edges) plus flux data.
VectorField grad_a(const MetricField& metric, const ScalarField& f);
/// Divergence form. Uses the flux data of v when present; exact pointwise
/// formula when both metric and v are analytic; central differences of
/// |a|^{1/2} v^k otherwise. Open-edge nodes use one-sided differences.
ScalarField div_a(const MetricField& metric, const VectorField& v);
/// Christoffel form ∂_k v^k + Γ^k_{kl} v^l from jets.
ScalarField div_a_christoffel(const MetricField& metric, const VectorField& v);
/// div_a(grad_a f).
ScalarField laplace_beltrami(const MetricField& metric, const ScalarField& f);
/// DivergenceStencil with C = |a|^{1/2} a^{-1}, divided by |a|^{1/2}; interior
/// nodes only (open-edge nodes are left at 0).
ScalarField laplace_beltrami_stencil(const MetricField& metric, const ScalarField& f);

/// |a|^{-1/2} ∂_α(|a|^{1/2} K b^{αβ} ∂_β f). Throws DegenerateError where det b = 0.
ScalarField lambda_ab(const MetricField& metric, const std::vector<Matrix2d>& b,
                      const ScalarField& K, const ScalarField& f);

/// Gradient-like field with arbitrary symmetric coefficient: node values
/// coeff/|a|^{1/2} ∇f, flux data built from coeff.
VectorField flux_gradient(const MetricField& metric, const std::vector<Matrix2d>& coeff,
                          const ScalarField& f);

// --- 3D ------------------------------------------------------------------------

/// Constant 3-metric; the shipped curl only supports constant metrics.
struct Metric3 {
  Matrix3d g = Matrix3d::Identity();

  static Metric3 signature(int eps);
  Matrix3d inverse() const;
  double sqrt_abs_det() const;
};

using Field3 = std::function<Vector3d(const Vector3d&)>;

/// u^k = e^{klm} ∂_l v_m with e^{klm} = ε^{klm}/√|g| and v_m = g_mn v^n,
/// fourth-order central differences with the given step.
Vector3d curl3(const Metric3& g, const Field3& v, const Vector3d& p, double step);

/// Sampled vector field on a 3D box grid.
struct BoxGrid3 {
  Vector3d lo = Vector3d::Zero();
  Vector3d hi = Vector3d::Ones();
  std::array<int, 3> n{3, 3, 3};

  double h(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
  Vector3d point(int i, int j, int k) const;
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
  }
  std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
};

struct BoxField3 {
  BoxGrid3 grid;
  std::vector<Vector3d> values;

  static BoxField3 sample(const BoxGrid3& grid, const Field3& f);
};

/// Second-order differences, one-sided on the box faces.
BoxField3 curl3(const Metric3& g, const BoxField3& v);

}  // namespace weylsheet

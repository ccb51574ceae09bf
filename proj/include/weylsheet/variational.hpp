#pragma once

// Curvature energies ∫ e(H,K) dS and the Euler-Lagrange residual
// ½Δ_a(e_H) + Λ_{a,b}(e_K) + (2H² - K) e_H + 2KH e_K - 2He.

#include <optional>
#include <string>

#include "weylsheet/expr.hpp"
#include "weylsheet/fields.hpp"
#include "weylsheet/surface.hpp"

namespace weylsheet {

struct DensityValue {
  double e = 0, e_H = 0, e_K = 0;
};

class EnergyDensity {
 public:
  enum class Form { Constant, Linear, Willmore, Expression };

  static EnergyDensity constant(double c);
  /// aH + bK + c.
  static EnergyDensity linear(double a, double b, double c);
  /// H².
  static EnergyDensity willmore();
  /// Expression in H and K.
  static EnergyDensity expression(Expr e);
  /// "willmore", or an expression in H and K.
  static EnergyDensity parse(std::string_view text);

  Form form() const { return form_; }
  /// False when ∂e/∂K vanishes identically.
  bool depends_on_K() const;
  std::string describe() const;

  DensityValue evaluate(double H, double K) const;

 private:
  Form form_ = Form::Constant;
  double a_ = 0, b_ = 0, c_ = 0;
  Expr expr_;
};

/// Exact (e, ∂e/∂H, ∂e/∂K); throws NumericalError on non-finite values.
DensityValue density_partials(const EnergyDensity& density, double H, double K);

/// Parameter rectangle [u1_min, u1_max] x [u2_min, u2_max].
struct Region {
  double u1_min, u1_max, u2_min, u2_max;
};

/// Midpoint rule over the cells of the chart grid inside the region (the whole
/// chart by default). Analytic surfaces are evaluated at cell centres; sampled
/// ones average the four corner values, which needs a grid-aligned region.
double total_energy(const SampledSurface& s, const EnergyDensity& density,
                    const std::optional<Region>& region = std::nullopt, int signature = 1);

/// Pointwise residual; Λ_{a,b} is skipped when e does not depend on K.
ScalarField el_residual(const SampledSurface& s, const EnergyDensity& density, int signature = 1);

}  // namespace weylsheet

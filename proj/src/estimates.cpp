#include "weylsheet/estimates.hpp"

#include <cmath>
#include <numbers>

#include "weylsheet/errors.hpp"

namespace weylsheet {

void MaterialConstants::validate() const {
  if (!(k > 0) || !(E2D > 0) || !(b > 0)) throw DomainError("material constants must be positive");
  if (!(nu >= 0 && nu < 0.5)) throw DomainError("Poisson ratio must lie in [0, 0.5)");
}

double effective_thickness(double k, double E2D) {
  if (!(k > 0) || !(E2D > 0) || !std::isfinite(k) || !std::isfinite(E2D))
    throw DomainError("effective thickness needs positive k and E2D");
  return std::sqrt(12.0 * k / E2D);
}

double critical_strain(double h_eff, double l, double nu) {
  if (!(h_eff > 0) || !(l > h_eff)) throw DomainError("critical strain needs 0 < h_eff < l");
  if (!(nu >= 0 && nu < 1)) throw DomainError("critical strain needs Poisson ratio in [0, 1)");
  const double ratio = h_eff / l;
  return std::numbers::pi * std::numbers::pi / (3.0 * (1.0 - nu * nu)) * ratio * ratio;
}

double boundary_ratio(double b, double r) {
  if (!(b > 0) || !(r >= b) || !std::isfinite(r))
    throw DomainError("boundary ratio needs r >= b > 0");
  return 1.5 * std::sqrt(3.0) * b / r;
}

}  // namespace weylsheet

#pragma once

// Closed-form material estimates for graphene-like sheets. These are order of
// magnitude estimates and are labelled "qualitative" wherever they are printed.

namespace weylsheet {

namespace units {
inline constexpr double angstrom_per_nm = 10.0;
inline constexpr double nm_per_um = 1000.0;

inline constexpr double angstrom_to_nm(double x) { return x / angstrom_per_nm; }
inline constexpr double nm_to_angstrom(double x) { return x * angstrom_per_nm; }
inline constexpr double um_to_nm(double x) { return x * nm_per_um; }
}  // namespace units

/// Bending rigidity k (eV), tensile rigidity E2D (eV/nm²), bond length b (nm), Poisson ratio.
struct MaterialConstants {
  double k = 1.0;
  double E2D = 2.12e3;
  double b = 0.142;
  double nu = 0.0;

  void validate() const;
};

/// √(12 k / E2D), in the length unit of E2D.
double effective_thickness(double k, double E2D);

/// π²/(3(1 - ν²)) (h/l)² for 0 < h < l and ν in [0, 1).
double critical_strain(double h_eff, double l, double nu);

/// Fraction of boundary atoms 1.5√3 b/r of a flake of radius r, for r > b > 0.
double boundary_ratio(double b, double r);

}  // namespace weylsheet

#pragma once

// Frenet analysis of unit vector fields (congruences) in R^3 with the metric
// diag(1, 1, eps), and the relations tying a congruence of surface curves to
// the curvature of the surface.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "weylsheet/diffops.hpp"
#include "weylsheet/geometry.hpp"
#include "weylsheet/minkowski.hpp"

namespace weylsheet {

class CongruenceField {
 public:
  CongruenceField() = default;
  /// v need not be normalised; l = v/‖v‖_eps. The box only sets the
  /// derivative step (1e-3 of its diagonal).
  CongruenceField(std::string name, Field3 v, int signature, Vector3d lo, Vector3d hi);

  /// Three expressions in x, y, z.
  static CongruenceField from_exprs(const std::array<Expr, 3>& v, int signature, Vector3d lo,
                                    Vector3d hi);

  const std::string& name() const { return name_; }
  int signature() const { return signature_; }
  const Vector3d& lo() const { return lo_; }
  const Vector3d& hi() const { return hi_; }
  double diameter() const { return (hi_ - lo_).norm(); }
  double step() const { return step_; }
  void set_step(double step);

  Vector3d raw(const Vector3d& p) const { return v_(p); }
  /// Throws DegenerateError where v vanishes or is not space-like.
  Vector3d l(const Vector3d& p) const;

 private:
  std::string name_;
  Field3 v_;
  int signature_ = 1;
  Vector3d lo_ = -Vector3d::Ones();
  Vector3d hi_ = Vector3d::Ones();
  double step_ = 1e-3;
};

/// circular, helix(b), meridian, gradient, sheared(alpha), minkowski_helix(c),
/// constant, radial_inward, axial_inward.
CongruenceField congruence_catalog(const std::string& name,
                                   const std::map<std::string, double>& params = {});
std::vector<std::string> congruence_names();

/// l tangent, n principal normal, m binormal; (n,n)_eps = eps.
struct FrenetFrame {
  Vector3d l, m, n;
  double kappa = 0.0;
  double tau = 0.0;
  int signature = 1;
};

/// ∇_l along l by fourth-order central differences.
Vector3d directional_derivative(const std::function<Vector3d(const Vector3d&)>& f,
                                const Vector3d& p, const Vector3d& dir, double step);

/// n = ∇_l l/κ, m = l x_eps n flipped when needed so that τ >= 0.
/// Throws DegenerateError when κ < 1e-8 * gradient scale.
FrenetFrame frenet_at(const CongruenceField& field, const Vector3d& p);

struct FrenetResidual {
  double tangent = 0;      // ‖∇_l l - κ n‖
  double normal = 0;       // ‖∇_l n + eps κ l - τ m‖
  double binormal = 0;     // ‖∇_l m + eps τ n‖
  double orthonormality = 0;

  double max() const;
};

/// Differentiates the frame along l, with neighbouring frames oriented like the
/// frame at p.
FrenetResidual frenet_residual(const CongruenceField& field, const Vector3d& p);

/// curl l = ω l + c_m m + c_n n.
struct CurlDecomposition {
  double omega = 0, c_m = 0, c_n = 0;
  double kappa = 0;
};

CurlDecomposition curl_decompose(const CongruenceField& field, const Vector3d& p);

/// (n, curl n)_eps of the principal normal field: zero when the l-lines are
/// geodesics on a family of surfaces.
double normal_congruence_measure(const CongruenceField& field, const Vector3d& p);

/// 2H/κ - K/κ² - 1 - (τ/κ)².
double surface_coupling_residual(double H, double K, double kappa, double tau);

struct Darboux {
  Vector3d d;
  double theta = 0;  // arccot(τ/κ) in (0, π/2]
};

Darboux darboux(const FrenetFrame& frame);

/// (1/(2 l)) [1/κ + (κ/K)(1 + cot²ϑ)].
double shape_from_congruence(double kappa, double theta, double K, double l_theta);

struct FlatStateReport {
  DevelopabilityReport developability;
  /// max |div_a v - r|.
  double divergence_residual = 0;
  /// max |2Hκ - κ² - τ²|, H taken along the curve's principal normal; the
  /// multiplied form stays defined as κ -> 0.
  double coupling_residual = 0;
  /// max |K_intrinsic| diam², over nodes at least two away from open edges.
  double flatness = 0;
  double tolerance = 1e-6;
  bool developable() const { return developability.is_developable; }
  bool flat() const {
    return developable() && divergence_residual <= tolerance && coupling_residual <= tolerance &&
           flatness <= tolerance;
  }
};

using ParamVectorFunction = std::function<Vector2d(double, double)>;

/// When the surface carries an analytic source and `exact` is given, the
/// integral curves of v are differentiated off-grid; otherwise on the grid.
FlatStateReport flat_state_report(const SampledSurface& s, const VectorField& v, double r,
                                  const ParamVectorFunction& exact = {}, int signature = 1,
                                  double tolerance = 1e-6);

struct NormalCurvatureEstimate {
  double div_n = 0;
  double H = 0;  // -div n / 2
  double K = 0;  // -κ(κ + div n) - τ²
};

/// n must be a unit extension of the surface normal off the surface.
NormalCurvatureEstimate mean_curv_from_normal(const Field3& n, const Vector3d& p, double step,
                                              double kappa = 0.0, double tau = 0.0);

}  // namespace weylsheet

#pragma once

// Fundamental forms, curvatures, Christoffel symbols and intrinsic curvature.

#include <array>
#include <vector>

#include "weylsheet/fields.hpp"
#include "weylsheet/surface.hpp"

namespace weylsheet {

struct FundamentalForms {
  double E = 1, F = 0, G = 1;
  double L = 0, M = 0, N = 0;
  Vector3d normal = Vector3d::UnitZ();
  int signature = 1;

  Matrix2d first() const {
    Matrix2d a;
    a << E, F, F, G;
    return a;
  }
  Matrix2d second() const {
    Matrix2d b;
    b << L, M, M, N;
    return b;
  }
};

struct CurvatureData {
  double K = 0, H = 0;
  double kappa1 = 0, kappa2 = 0;
};

/// E,F,G from the eps inner product, n = r1 x_eps r2 normalised, L = (n, r11)_eps, ...
/// Throws DegenerateError when |r1 x r2| < 1e-12 |r1||r2| or, for eps = -1,
/// when the tangent plane is not space-like.
FundamentalForms fundamental_forms(const SurfaceJet& jet, int signature = 1);

/// K = (LN - M^2)/(EG - F^2), H = (EN - 2FM + GL)/(2(EG - F^2)), kappa1 >= kappa2.
CurvatureData curvatures(const FundamentalForms& f);

/// II(dir)/I(dir).
double normal_curvature(const FundamentalForms& f, const Vector2d& dir);

/// b -> l b.
FundamentalForms rescale_second_form(const FundamentalForms& f, double l_theta);

/// gamma[sigma](alpha, beta) = Γ^sigma_{alpha beta}.
using Christoffel = std::array<Matrix2d, 2>;

Christoffel christoffel(const MetricJet& m);
Christoffel christoffel(const MetricField& metric, int i, int j);
/// d[mu][sigma](alpha, beta) = ∂_mu Γ^sigma_{alpha beta}.
std::array<Christoffel, 2> christoffel_derivatives(const MetricJet& m);

/// Half the scalar curvature of the Levi-Civita connection.
double intrinsic_gauss_curvature(const MetricJet& m);
double intrinsic_gauss_curvature(const MetricField& metric, int i, int j);
ScalarField intrinsic_gauss_curvature(const MetricField& metric);

struct GaussWeingartenResidual {
  /// eps b_{ab} n - (∂_a r_b - Γ^k_{ab} r_k) for (11, 12, 22).
  std::array<Vector3d, 3> gauss;
  /// ∂_a n + a^{bk} b_{ak} r_b for a = 1, 2.
  std::array<Vector3d, 2> weingarten;

  double max_norm() const;
};

/// Uses exact jets (and exact ∂n) when the surface is analytic, grid
/// differences otherwise.
GaussWeingartenResidual gauss_weingarten_residual(const SampledSurface& s, int i, int j,
                                                  int signature = 1);
GaussWeingartenResidual gauss_weingarten_residual(const SurfaceExpr& s, double u1, double u2,
                                                  int signature = 1);

/// Per-node geometry of a sampled surface.
struct SurfaceGeometry {
  Chart chart;
  std::vector<FundamentalForms> forms;
  std::vector<CurvatureData> curvature;

  ScalarField K() const;
  ScalarField H() const;
  ScalarField kappa1() const;
  ScalarField kappa2() const;
  /// LN - M^2.
  ScalarField det_b() const;
  std::vector<Matrix2d> second_forms() const;
};

SurfaceGeometry surface_geometry(const SampledSurface& s, int signature = 1);

struct DevelopabilityReport {
  ScalarField det_b;
  double measure = 0;  // max |det b| * diameter^4
  double tolerance = 0;
  bool is_developable = false;
};

DevelopabilityReport developability(const SampledSurface& s, double tolerance = 1e-8,
                                    int signature = 1);

}  // namespace weylsheet

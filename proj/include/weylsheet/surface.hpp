#pragma once

// Analytic surfaces given by three coordinate expressions in (u1, u2), sampled
// surfaces on a chart, the grid file format, and the built-in test catalog.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weylsheet/fields.hpp"

namespace weylsheet {

/// Position and partial derivatives of the embedding at one point.
struct SurfaceJet {
  Vector3d r = Vector3d::Zero();
  Vector3d r1 = Vector3d::Zero();
  Vector3d r2 = Vector3d::Zero();
  Vector3d r11 = Vector3d::Zero();
  Vector3d r12 = Vector3d::Zero();
  Vector3d r22 = Vector3d::Zero();

  const Vector3d& first(int alpha) const { return alpha == 0 ? r1 : r2; }
  const Vector3d& second(int alpha, int beta) const {
    return alpha + beta == 0 ? r11 : (alpha + beta == 1 ? r12 : r22);
  }
};

struct SurfaceExpr {
  std::array<Expr, 3> coords;

  Vector3d position(double u1, double u2) const;

  /// Taylor expansion of the three coordinates around (u1,u2).
  template <int N>
  std::array<Taylor2<N>, 3> expand(double u1, double u2) const {
    const std::array<Taylor2<N>, 2> vars{Taylor2<N>::variable(0, u1), Taylor2<N>::variable(1, u2)};
    return {coords[0].eval<Taylor2<N>>(vars), coords[1].eval<Taylor2<N>>(vars),
            coords[2].eval<Taylor2<N>>(vars)};
  }

  friend bool operator==(const SurfaceExpr&, const SurfaceExpr&) = default;
};

/// "x; y; z" with each part an expression in u1, u2.
SurfaceExpr parse_surface(std::string_view text);
std::string to_string(const SurfaceExpr& s);

/// Exact jet by forward-mode differentiation. order 1 leaves second partials zero.
SurfaceJet eval_jet(const SurfaceExpr& s, double u1, double u2, int order = 2);
/// Same, refusing points outside the chart.
SurfaceJet eval_jet(const SurfaceExpr& s, const Chart& chart, double u1, double u2, int order = 2);

/// Induced metric with exact first and second derivatives.
MetricJet induced_metric_jet(const SurfaceExpr& s, double u1, double u2, int signature = 1);

class SampledSurface {
 public:
  SampledSurface() = default;
  SampledSurface(Chart chart, std::vector<Vector3d> positions);

  static SampledSurface from_expr(const SurfaceExpr& s, const Chart& chart);

  const Chart& chart() const { return chart_; }
  const std::vector<Vector3d>& positions() const { return positions_; }
  const Vector3d& operator()(int i, int j) const { return positions_[chart_.index(i, j)]; }
  const std::optional<SurfaceExpr>& source() const { return source_; }
  /// Copy without the analytic source; every jet then comes from the grid.
  SampledSurface sampled() const { return SampledSurface(chart_, positions_); }

  /// Exact when an analytic source is attached, finite differences otherwise.
  SurfaceJet jet(int i, int j) const;
  /// Finite-difference jet regardless of the source.
  SurfaceJet grid_jet(int i, int j) const;

  /// Induced metric field; exact jets when analytic, node values otherwise.
  MetricField induced_metric(int signature = 1) const;

  /// Diagonal of the axis-aligned bounding box of the positions.
  double diameter() const;

 private:
  Chart chart_;
  std::vector<Vector3d> positions_;
  std::optional<SurfaceExpr> source_;
};

void write_grid(std::ostream& os, const SampledSurface& s);
SampledSurface read_grid(std::istream& is);
void save_grid(const std::filesystem::path& path, const SampledSurface& s);
SampledSurface load_grid(const std::filesystem::path& path);

struct CatalogParams {
  std::map<std::string, double> values;
  /// Height function for "graph".
  std::string expression;

  double get(const std::string& key, double fallback) const;
};

struct CatalogSurface {
  std::string name;
  SurfaceExpr expr;
  Chart chart;
  /// Orientation of n = r1 x r2 for this parametrization.
  std::string orientation;
};

/// plane, cylinder(rho), sphere(R), torus(R, r), helicoid(c), catenoid(c),
/// saddle(a), graph(expression). `n` sets the default chart resolution.
CatalogSurface catalog(const std::string& name, const CatalogParams& params = {}, int n = 33);
std::vector<std::string> catalog_names();

}  // namespace weylsheet

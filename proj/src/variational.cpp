#include "weylsheet/variational.hpp"

#include <cmath>
#include <sstream>

#include "weylsheet/diffops.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/geometry.hpp"
#include "weylsheet/parallel.hpp"
#include "weylsheet/taylor.hpp"

namespace weylsheet {

EnergyDensity EnergyDensity::constant(double c) {
  EnergyDensity d;
  d.form_ = Form::Constant;
  d.c_ = c;
  return d;
}

EnergyDensity EnergyDensity::linear(double a, double b, double c) {
  EnergyDensity d;
  d.form_ = Form::Linear;
  d.a_ = a;
  d.b_ = b;
  d.c_ = c;
  return d;
}

EnergyDensity EnergyDensity::willmore() {
  EnergyDensity d;
  d.form_ = Form::Willmore;
  return d;
}

EnergyDensity EnergyDensity::expression(Expr e) {
  if (e.max_variable() >= 2) throw DomainError("energy density may only use H and K");
  EnergyDensity d;
  d.form_ = Form::Expression;
  d.expr_ = std::move(e);
  return d;
}

EnergyDensity EnergyDensity::parse(std::string_view text) {
  if (text == "willmore") return willmore();
  return expression(parse_expr(text, kDensityVars));
}

bool EnergyDensity::depends_on_K() const {
  switch (form_) {
    case Form::Linear: return b_ != 0;
    case Form::Expression: return expr_.references(1);
    default: return false;
  }
}

std::string EnergyDensity::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (form_) {
    case Form::Constant: os << "constant c=" << c_; break;
    case Form::Linear: os << "linear a=" << a_ << " b=" << b_ << " c=" << c_; break;
    case Form::Willmore: os << "willmore H^2"; break;
    case Form::Expression: os << "expression " << to_string(expr_, kDensityVars); break;
  }
  return os.str();
}

DensityValue EnergyDensity::evaluate(double H, double K) const {
  DensityValue v;
  switch (form_) {
    case Form::Constant: v = {c_, 0, 0}; break;
    case Form::Linear: v = {a_ * H + b_ * K + c_, a_, b_}; break;
    case Form::Willmore: v = {H * H, 2 * H, 0}; break;
    case Form::Expression: {
      const std::array<Taylor2<1>, 2> vars{Taylor2<1>::variable(0, H), Taylor2<1>::variable(1, K)};
      try {
        const Taylor2<1> t = expr_.eval<Taylor2<1>>(vars);
        v = {t.value(), t.derivative(1, 0), t.derivative(0, 1)};
      } catch (const DomainError& e) {
        throw NumericalError(std::string("energy density at H=") + std::to_string(H) +
                             ", K=" + std::to_string(K) + ": " + e.what());
      }
      break;
    }
  }
  if (!std::isfinite(v.e) || !std::isfinite(v.e_H) || !std::isfinite(v.e_K))
    throw NumericalError("energy density is not finite at H=" + std::to_string(H) +
                         ", K=" + std::to_string(K));
  return v;
}

DensityValue density_partials(const EnergyDensity& density, double H, double K) {
  return density.evaluate(H, K);
}

// ---------------------------------------------------------------------------

namespace {

// Number of grid cells spanned by [lo, hi] on one axis, and the first cell.
std::pair<int, int> aligned_cells(const Chart& c, int axis, double lo, double hi) {
  const double h = c.h(axis);
  const double a = (lo - c.min(axis)) / h, b = (hi - c.min(axis)) / h;
  const long ia = std::lround(a), ib = std::lround(b);
  if (std::abs(a - ia) > 1e-9 || std::abs(b - ib) > 1e-9)
    throw DomainError("region is not aligned with the grid of a sampled surface");
  return {static_cast<int>(ia), static_cast<int>(ib - ia)};
}

}  // namespace

double total_energy(const SampledSurface& s, const EnergyDensity& density,
                    const std::optional<Region>& region, int signature) {
  const Chart& c = s.chart();
  const Region R = region.value_or(Region{c.min(0), c.max(0), c.min(1), c.max(1)});
  if (!(R.u1_max > R.u1_min) || !(R.u2_max > R.u2_min)) throw DomainError("empty region");
  if (!c.contains(R.u1_min, R.u2_min) || !c.contains(R.u1_max, R.u2_max))
    throw DomainError("region lies outside the chart");

  std::vector<double> cells;
  if (s.source()) {
    const int m1 = std::max(1, static_cast<int>(std::lround((R.u1_max - R.u1_min) / c.h(0))));
    const int m2 = std::max(1, static_cast<int>(std::lround((R.u2_max - R.u2_min) / c.h(1))));
    const double d1 = (R.u1_max - R.u1_min) / m1, d2 = (R.u2_max - R.u2_min) / m2;
    cells.resize(static_cast<std::size_t>(m1) * m2);
    parallel_for(cells.size(), [&](std::size_t k) {
      const int i = static_cast<int>(k / m2), j = static_cast<int>(k % m2);
      const double u1 = R.u1_min + (i + 0.5) * d1, u2 = R.u2_min + (j + 0.5) * d2;
      const FundamentalForms f = fundamental_forms(eval_jet(*s.source(), u1, u2), signature);
      const CurvatureData cd = curvatures(f);
      const double area = std::sqrt(std::abs(f.E * f.G - f.F * f.F));
      cells[k] = density.evaluate(cd.H, cd.K).e * area * d1 * d2;
    });
  } else {
    const auto [i0, m1] = aligned_cells(c, 0, R.u1_min, R.u1_max);
    const auto [j0, m2] = aligned_cells(c, 1, R.u2_min, R.u2_max);
    const SurfaceGeometry geo = surface_geometry(s, signature);
    std::vector<double> node(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      const FundamentalForms& f = geo.forms[k];
      node[k] = density.evaluate(geo.curvature[k].H, geo.curvature[k].K).e *
                std::sqrt(std::abs(f.E * f.G - f.F * f.F));
    }
    const double cell = c.h(0) * c.h(1);
    cells.resize(static_cast<std::size_t>(m1) * m2);
    for (int i = 0; i < m1; ++i)
      for (int j = 0; j < m2; ++j) {
        const int a = i0 + i, b = j0 + j;
        cells[static_cast<std::size_t>(i) * m2 + j] =
            0.25 * cell *
            (node[c.index(a, b)] + node[c.index(a + 1, b)] + node[c.index(a, b + 1)] +
             node[c.index(a + 1, b + 1)]);
      }
  }
  return pairwise_sum(cells);
}

ScalarField el_residual(const SampledSurface& s, const EnergyDensity& density, int signature) {
  const Chart& c = s.chart();
  const SurfaceGeometry geo = surface_geometry(s, signature);
  const MetricField metric = s.induced_metric(signature);
  std::vector<double> e(c.size()), eH(c.size()), eK(c.size()), local(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double H = geo.curvature[k].H, K = geo.curvature[k].K;
    const DensityValue d = density.evaluate(H, K);
    e[k] = d.e;
    eH[k] = d.e_H;
    eK[k] = d.e_K;
    local[k] = (2 * H * H - K) * d.e_H + 2 * K * H * d.e_K - 2 * H * d.e;
  }
  const ScalarField lap = laplace_beltrami(metric, ScalarField(c, eH));
  std::vector<double> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = 0.5 * lap.values()[k] + local[k];
  if (density.depends_on_K()) {
    const ScalarField lam = lambda_ab(metric, geo.second_forms(), geo.K(), ScalarField(c, eK));
    for (std::size_t k = 0; k < c.size(); ++k) out[k] += lam.values()[k];
  }
  return ScalarField(c, std::move(out));
}

}  // namespace weylsheet

#include "weylsheet/thermal.hpp"

#include <algorithm>
#include <cmath>

#include "weylsheet/diffops.hpp"
#include "weylsheet/errors.hpp"
#include "weylsheet/parallel.hpp"
#include "weylsheet/weyl.hpp"

namespace weylsheet {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = a[k] * b[k];
  return pairwise_sum(prod);
}

bool fully_periodic(const Chart& c) { return c.periodic(0) && c.periodic(1); }

}  // namespace

SolveReport solve_sigma(const ThermalStateProblem& problem) {
  const MetricField& metric = problem.metric;
  const Chart& c = metric.chart();
  if (!(problem.K.chart() == c)) throw DomainError("curvature field does not match the metric chart");
  if (!std::isfinite(problem.r)) throw DomainError("r must be finite");
  if (problem.boundary && !(problem.boundary->chart() == c))
    throw DomainError("boundary data does not match the metric chart");
  const bool closed = fully_periodic(c);

  // unknowns: canonical nodes away from open edges
  std::vector<long> unknown_of(c.size(), -1);
  std::vector<std::size_t> nodes;
  std::vector<std::pair<int, int>> ij;
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      if (c.interior(i, j) && c.canonical(0, i) == i && c.canonical(1, j) == j) {
        unknown_of[c.index(i, j)] = static_cast<long>(nodes.size());
        nodes.push_back(c.index(i, j));
        ij.emplace_back(i, j);
      }
  const std::size_t m = nodes.size();
  if (m == 0) throw DomainError("chart has no interior nodes to solve for");

  std::vector<double> sigma(c.size(), 0.0);
  if (problem.boundary && !closed) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double v = problem.boundary->values()[k];
      if (!std::isfinite(v)) throw DomainError("non-finite boundary value");
      if (unknown_of[k] < 0) sigma[k] = v;
    }
  }

  std::vector<Matrix2d> coeff(c.size());
  std::vector<double> root(c.size());
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j) {
      const std::size_t k = c.index(i, j);
      root[k] = metric.sqrt_det(i, j);
      coeff[k] = root[k] * inverse_metric(metric(i, j));
    }
  const DivergenceStencil stencil(c, std::move(coeff));

  SolveReport report;
  std::vector<DivergenceStencil::Row> rows(m);
  std::vector<double> b(m), diag(m), source(m);
  parallel_for(m, [&](std::size_t p) {
    rows[p] = stencil.row(ij[p].first, ij[p].second);
    const std::size_t k = nodes[p];
    source[p] = 0.5 * problem.r - problem.K.values()[k];
    // A = -W restricted to unknowns; known neighbours move to the right-hand side
    double rhs = -root[k] * source[p];
    for (const auto& e : rows[p]) {
      if (unknown_of[e.node] < 0) rhs += e.weight * sigma[e.node];
      if (e.node == k) diag[p] -= e.weight;
    }
    b[p] = rhs;
  });
  double scale = 1.0;
  for (double s : source) scale = std::max(scale, std::abs(s));
  report.scale = scale;
  report.tolerance = problem.tolerance > 0 ? problem.tolerance : 1e-10 * scale;

  if (closed) {
    const double cell = c.h(0) * c.h(1);
    std::vector<double> weighted(m), magnitude(m);
    for (std::size_t p = 0; p < m; ++p) {
      weighted[p] = cell * root[nodes[p]] * source[p];
      magnitude[p] = cell * root[nodes[p]] * (0.5 * std::abs(problem.r) + std::abs(problem.K.values()[nodes[p]]));
    }
    report.compatibility_defect = pairwise_sum(weighted);
    const double bound = 1e-6 * std::max(1.0, pairwise_sum(magnitude));
    if (std::abs(report.compatibility_defect) > bound)
      throw NumericalError("incompatible periodic problem: integral of (r/2 - K) dA = " +
                           std::to_string(report.compatibility_defect) + " is not zero");
    const double mean = pairwise_sum(b) / static_cast<double>(m);
    for (double& v : b) v -= mean;
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    parallel_for(m, [&](std::size_t p) {
      double s = 0.0;
      for (const auto& e : rows[p]) {
        const long q = unknown_of[e.node];
        if (q >= 0) s -= e.weight * x[static_cast<std::size_t>(q)];
      }
      y[p] = s;
    });
  };
  auto converged = [&](const std::vector<double>& res) {
    double worst = 0.0;
    for (std::size_t p = 0; p < m; ++p) worst = std::max(worst, std::abs(res[p]) / root[nodes[p]]);
    return worst <= 0.5 * report.tolerance;
  };

  const int cap = problem.max_iterations > 0 ? problem.max_iterations
                                             : static_cast<int>(std::min<std::size_t>(4 * m + 1000, 2000000));
  std::vector<double> x(m, 0.0), res = b, z(m), dir(m), Ad(m);
  int iterations = 0;
  for (int restart = 0; restart < 4; ++restart) {
    // true residual at every restart so that drift cannot fake convergence
    apply(x, Ad);
    for (std::size_t p = 0; p < m; ++p) res[p] = b[p] - Ad[p];
    if (converged(res)) break;
    for (std::size_t p = 0; p < m; ++p) z[p] = res[p] / diag[p];
    dir = z;
    double rz = dot(res, z);
    bool done = false;
    while (iterations < cap) {
      apply(dir, Ad);
      const double denom = dot(dir, Ad);
      if (!(denom > 0)) break;
      const double alpha = rz / denom;
      for (std::size_t p = 0; p < m; ++p) {
        x[p] += alpha * dir[p];
        res[p] -= alpha * Ad[p];
      }
      ++iterations;
      if (converged(res)) {
        done = true;
        break;
      }
      for (std::size_t p = 0; p < m; ++p) z[p] = res[p] / diag[p];
      const double rz_next = dot(res, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t p = 0; p < m; ++p) dir[p] = z[p] + beta * dir[p];
    }
    if (!done && iterations >= cap) break;
  }

  if (closed) {
    std::vector<double> ws(m), w(m);
    for (std::size_t p = 0; p < m; ++p) {
      ws[p] = root[nodes[p]] * x[p];
      w[p] = root[nodes[p]];
    }
    const double mean = pairwise_sum(ws) / pairwise_sum(w);
    for (double& v : x) v -= mean;
  }
  for (std::size_t p = 0; p < m; ++p) sigma[nodes[p]] = x[p];
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      sigma[c.index(i, j)] = sigma[c.index(c.canonical(0, i), c.canonical(1, j))];

  report.sigma = ScalarField(c, std::move(sigma));
  report.iterations = iterations;
  report.solved.assign(c.size(), 0);
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      if (unknown_of[c.index(c.canonical(0, i), c.canonical(1, j))] >= 0 && c.interior(i, j))
        report.solved[c.index(i, j)] = 1;

  const ScalarField lap = laplace_beltrami(metric, report.sigma);
  double worst = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (report.solved[k])
      worst = std::max(worst, std::abs(lap.values()[k] + problem.K.values()[k] - 0.5 * problem.r));
  report.residual_inf = worst;
  if (!std::isfinite(worst)) throw NumericalError("thermal solve produced non-finite values");
  if (iterations >= cap && worst > report.tolerance)
    throw NumericalError("conjugate gradients did not converge in " + std::to_string(cap) +
                         " iterations (residual " + std::to_string(worst) + ")");
  return report;
}

ScalarField state_residual(const MetricField& metric, const VectorField& v, const ScalarField& K,
                           double r) {
  const ScalarField div = div_a(metric, v);
  std::vector<double> out(div.values().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = div.values()[k] + 2.0 * K.values()[k] - r;
  return ScalarField(metric.chart(), std::move(out));
}

MetricField conformal_metric(const MetricField& metric, const ScalarField& sigma) {
  const Chart& c = metric.chart();
  return gauge_transform(metric, CovectorField(c, std::vector<Vector2d>(c.size(), Vector2d::Zero())),
                         sigma)
      .metric;
}

ScalarField conformal_curvature(const ScalarField& K, const ScalarField& sigma,
                                const MetricField& metric, LaplacianScheme scheme) {
  const Chart& c = metric.chart();
  if (!(K.chart() == c) || !(sigma.chart() == c))
    throw DomainError("conformal_curvature: fields live on different grids");
  std::vector<double> out(c.size());
  if (scheme == LaplacianScheme::Flux) {
    const ScalarField lap = laplace_beltrami(metric, sigma);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = std::exp(2.0 * sigma.values()[k]) * (lap.values()[k] + K.values()[k]);
    return ScalarField(c, std::move(out));
  }
  parallel_for(c.n1(), [&](std::size_t i) {
    for (int j = 0; j < c.n2(); ++j) {
      const ScalarJet s = sigma.jet(i, j);
      const double lap = laplace_beltrami_divergence_form(metric.jet(i, j), s);
      out[c.index(i, j)] = std::exp(2.0 * s.v) * (lap + K(i, j));
    }
  });
  return ScalarField(c, std::move(out));
}

SignVerdict sign_verdict(const ScalarField& f, const std::vector<char>& mask, double tolerance) {
  SignVerdict v;
  bool any = false;
  v.positive = v.negative = v.zero = true;
  for (std::size_t k = 0; k < f.values().size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    const double x = f.values()[k];
    v.min = any ? std::min(v.min, x) : x;
    v.max = any ? std::max(v.max, x) : x;
    any = true;
    if (!(x > tolerance)) v.positive = false;
    if (!(x < -tolerance)) v.negative = false;
    if (!(std::abs(x) <= tolerance)) v.zero = false;
  }
  if (!any) v.positive = v.negative = v.zero = false;
  return v;
}

ShapeParameter shape_parameter(const ScalarField& H, const ScalarField& K, double l_theta) {
  if (!(l_theta > 0)) throw DomainError("thermal length must be positive");
  if (!(H.chart() == K.chart())) throw DomainError("H and K live on different charts");
  double h2 = 1.0;
  for (double h : H.values()) h2 = std::max(h2, h * h);
  const double zero = 1e-10 * h2;
  ShapeParameter out;
  std::vector<double> nu(K.values().size(), 0.0);
  out.valid.assign(nu.size(), 0);
  for (std::size_t k = 0; k < nu.size(); ++k) {
    const double kk = K.values()[k];
    if (std::abs(kk) <= zero) {
      ++out.excluded;
      continue;
    }
    nu[k] = H.values()[k] / (l_theta * kk);
    out.valid[k] = 1;
  }
  if (out.excluded == nu.size())
    throw DegenerateError("shape parameter undefined: K = 0 at every node (developable sheet)");
  out.nu = ScalarField(K.chart(), std::move(nu));
  return out;
}

ScalarField harmonic_theta_residual(const MetricField& metric, const ScalarField& theta) {
  return laplace_beltrami(metric, theta);
}

}  // namespace weylsheet

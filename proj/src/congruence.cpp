#include "weylsheet/congruence.hpp"

#include <algorithm>
#include <cmath>

#include "weylsheet/errors.hpp"
#include "weylsheet/parallel.hpp"

namespace weylsheet {

CongruenceField::CongruenceField(std::string name, Field3 v, int signature, Vector3d lo,
                                 Vector3d hi)
    : name_(std::move(name)), v_(std::move(v)), signature_(signature), lo_(lo), hi_(hi) {
  if (signature != 1 && signature != -1) throw DomainError("signature must be +1 or -1");
  if (!v_) throw DomainError("congruence needs a vector field");
  if (!((hi_ - lo_).minCoeff() > 0)) throw DomainError("empty congruence box");
  step_ = 1e-3 * diameter();
}

CongruenceField CongruenceField::from_exprs(const std::array<Expr, 3>& v, int signature,
                                            Vector3d lo, Vector3d hi) {
  for (const Expr& e : v)
    if (e.max_variable() >= 3) throw DomainError("congruence expressions use x, y, z only");
  auto fn = [v](const Vector3d& p) {
    const std::array<double, 3> xyz{p[0], p[1], p[2]};
    return Vector3d(v[0].eval<double>(xyz), v[1].eval<double>(xyz), v[2].eval<double>(xyz));
  };
  return CongruenceField("expression", fn, signature, lo, hi);
}

void CongruenceField::set_step(double step) {
  if (!(step > 0)) throw DomainError("derivative step must be positive");
  step_ = step;
}

Vector3d CongruenceField::l(const Vector3d& p) const {
  const Vector3d v = v_(p);
  const double q = inner_e(v, v, signature_);
  if (!(q > 1e-300) || !std::isfinite(q))
    throw DegenerateError("congruence field vanishes or is not space-like at (" +
                          std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
                          std::to_string(p[2]) + ")");
  return v / std::sqrt(q);
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

CongruenceField congruence_catalog(const std::string& name,
                                   const std::map<std::string, double>& params) {
  const Vector3d box(3, 3, 1);
  if (name == "circular")
    return {name, [](const Vector3d& p) { return Vector3d(-p[1], p[0], 0); }, 1, -box, box};
  if (name == "helix") {
    const double b = param(params, "b", 4.0);
    return {name, [b](const Vector3d& p) { return Vector3d(-p[1], p[0], b); }, 1,
            Vector3d(-4, -4, -2), Vector3d(4, 4, 2)};
  }
  if (name == "meridian")
    return {name,
            [](const Vector3d& p) {
              return Vector3d(p[0] * p[2], p[1] * p[2], -(p[0] * p[0] + p[1] * p[1]));
            },
            1, Vector3d::Constant(-2), Vector3d::Constant(2)};
  if (name == "gradient")
    return {name, [](const Vector3d& p) { return Vector3d(2 * p[0], 0, 1); }, 1,
            -Vector3d::Ones(), Vector3d::Ones()};
  if (name == "sheared") {
    const double alpha = param(params, "alpha", 0.5);
    return {name,
            [alpha](const Vector3d& p) {
              const double c = std::cos(alpha * p[2]), s = std::sin(alpha * p[2]);
              return Vector3d(-c * p[1] - s * p[0], c * p[0] - s * p[1], 0);
            },
            1, -box, box};
  }
  if (name == "minkowski_helix") {
    const double c = param(params, "c", 1.0);
    return {name, [c](const Vector3d& p) { return Vector3d(p[2], c, p[0]); }, -1,
            Vector3d(-1, -1, 1), Vector3d(1, 1, 3)};
  }
  if (name == "constant")
    return {name, [](const Vector3d&) { return Vector3d(0, 0, 1); }, 1, -Vector3d::Ones(),
            Vector3d::Ones()};
  if (name == "radial_inward")
    return {name, [](const Vector3d& p) -> Vector3d { return -p / p.norm(); }, 1,
            Vector3d::Constant(-2), Vector3d::Constant(2)};
  if (name == "axial_inward")
    return {name,
            [](const Vector3d& p) -> Vector3d {
              return -Vector3d(p[0], p[1], 0) / std::hypot(p[0], p[1]);
            },
            1, -box, box};
  throw DomainError("unknown congruence '" + name + "'");
}

std::vector<std::string> congruence_names() {
  return {"circular", "helix",    "meridian",      "gradient",    "sheared",
          "minkowski_helix", "constant", "radial_inward", "axial_inward"};
}

Vector3d directional_derivative(const std::function<Vector3d(const Vector3d&)>& f,
                                const Vector3d& p, const Vector3d& dir, double step) {
  const Vector3d d = step * dir;
  return (-f(p + 2 * d) + 8 * f(p + d) - 8 * f(p - d) + f(p - 2 * d)) / (12 * step);
}

namespace {

struct RawFrame {
  Vector3d l, k, n, m;
  double kappa = 0;
};

Vector3d curvature_vector(const CongruenceField& f, const Vector3d& p, const Vector3d& l) {
  return directional_derivative([&f](const Vector3d& q) { return f.l(q); }, p, l, f.step());
}

double kappa_of(const Vector3d& k, int eps) { return std::sqrt(std::max(0.0, eps * inner_e(k, k, eps))); }

double gradient_scale(const CongruenceField& f, const Vector3d& p) {
  double g = 0;
  for (int a = 0; a < 3; ++a)
    g = std::max(g, directional_derivative([&f](const Vector3d& q) { return f.l(q); }, p,
                                           Vector3d::Unit(a), f.step())
                        .norm());
  return std::max(g, 1.0 / f.diameter());
}

Vector3d principal_normal(const CongruenceField& f, const Vector3d& p) {
  const Vector3d l = f.l(p);
  const Vector3d k = curvature_vector(f, p, l);
  const double kappa = kappa_of(k, f.signature());
  if (!(kappa > 0)) throw DegenerateError("principal normal is indeterminate where the curvature vanishes");
  return k / kappa;
}

RawFrame raw_frame(const CongruenceField& f, const Vector3d& p) {
  const int eps = f.signature();
  RawFrame r;
  r.l = f.l(p);
  r.k = curvature_vector(f, p, r.l);
  r.kappa = kappa_of(r.k, eps);
  if (!(r.kappa >= 1e-8 * gradient_scale(f, p)))
    throw DegenerateError("Frenet frame is indeterminate: curvature " + std::to_string(r.kappa) +
                          " vanishes at (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                          ", " + std::to_string(p[2]) + ")");
  r.n = r.k / r.kappa;
  r.m = cross_e(r.l, r.n, eps);
  r.m /= std::sqrt(std::abs(inner_e(r.m, r.m, eps)));
  return r;
}

}  // namespace

FrenetFrame frenet_at(const CongruenceField& field, const Vector3d& p) {
  const int eps = field.signature();
  const RawFrame r = raw_frame(field, p);
  const Vector3d dn =
      directional_derivative([&field](const Vector3d& q) { return principal_normal(field, q); },
                             p, r.l, field.step());
  const double tau_raw = inner_e(dn + eps * r.kappa * r.l, r.m, eps) / inner_e(r.m, r.m, eps);
  FrenetFrame out;
  out.l = r.l;
  out.n = r.n;
  out.m = r.m;
  out.kappa = r.kappa;
  out.signature = eps;
  // the sign of a vanishing torsion is noise: keep l x n unless clearly negative
  if (tau_raw < -1e-6 * r.kappa) {
    out.m = -r.m;
    out.tau = -tau_raw;
  } else {
    out.tau = std::max(0.0, tau_raw);
  }
  return out;
}

double FrenetResidual::max() const {
  return std::max({tangent, normal, binormal, orthonormality});
}

FrenetResidual frenet_residual(const CongruenceField& field, const Vector3d& p) {
  const int eps = field.signature();
  const FrenetFrame F = frenet_at(field, p);
  const double h = field.step();
  const Vector3d dl =
      directional_derivative([&field](const Vector3d& q) { return field.l(q); }, p, F.l, h);
  const Vector3d dn = directional_derivative(
      [&field](const Vector3d& q) { return principal_normal(field, q); }, p, F.l, h);
  const Vector3d dm = directional_derivative(
      [&](const Vector3d& q) {
        const Vector3d l = field.l(q);
        Vector3d m = cross_e(l, principal_normal(field, q), eps);
        m /= std::sqrt(std::abs(inner_e(m, m, eps)));
        return inner_e(m, F.m, eps) < 0 ? Vector3d(-m) : m;
      },
      p, F.l, h);
  FrenetResidual r;
  r.tangent = (dl - F.kappa * F.n).norm();
  r.normal = (dn + eps * F.kappa * F.l - F.tau * F.m).norm();
  r.binormal = (dm + eps * F.tau * F.n).norm();
  r.orthonormality = std::max({std::abs(inner_e(F.l, F.l, eps) - 1),
                               std::abs(inner_e(F.m, F.m, eps) - 1),
                               std::abs(inner_e(F.n, F.n, eps) - eps), std::abs(inner_e(F.l, F.m, eps)),
                               std::abs(inner_e(F.l, F.n, eps)), std::abs(inner_e(F.m, F.n, eps))});
  return r;
}

CurlDecomposition curl_decompose(const CongruenceField& field, const Vector3d& p) {
  const int eps = field.signature();
  const FrenetFrame F = frenet_at(field, p);
  const Vector3d u = curl3(Metric3::signature(eps), [&field](const Vector3d& q) { return field.l(q); },
                           p, field.step());
  CurlDecomposition out;
  out.omega = inner_e(u, F.l, eps);
  out.c_m = inner_e(u, F.m, eps);
  out.c_n = eps * inner_e(u, F.n, eps);
  out.kappa = F.kappa;
  return out;
}

double normal_congruence_measure(const CongruenceField& field, const Vector3d& p) {
  const int eps = field.signature();
  frenet_at(field, p);
  const Vector3d n = principal_normal(field, p);
  const Vector3d u = curl3(Metric3::signature(eps),
                           [&field](const Vector3d& q) { return principal_normal(field, q); }, p,
                           field.step());
  return inner_e(n, u, eps);
}

double surface_coupling_residual(double H, double K, double kappa, double tau) {
  if (!(kappa > 0)) throw DegenerateError("coupling relation needs positive curvature kappa");
  const double ratio = tau / kappa;
  return 2 * H / kappa - K / (kappa * kappa) - 1 - ratio * ratio;
}

Darboux darboux(const FrenetFrame& frame) {
  if (!(frame.kappa > 0)) throw DegenerateError("Darboux angle needs positive curvature");
  return {frame.tau * frame.l + frame.kappa * frame.m, std::atan2(frame.kappa, frame.tau)};
}

double shape_from_congruence(double kappa, double theta, double K, double l_theta) {
  if (!(kappa > 0)) throw DegenerateError("shape parameter needs positive curvature kappa");
  if (K == 0 || !std::isfinite(K)) throw DegenerateError("shape parameter undefined where K = 0");
  if (!(l_theta > 0)) throw DomainError("thermal length must be positive");
  if (!(theta > 0 && theta < M_PI)) throw DomainError("Darboux angle outside (0, pi)");
  const double cot = std::cos(theta) / std::sin(theta);
  return (1.0 / (2.0 * l_theta)) * (1.0 / kappa + (kappa / K) * (1.0 + cot * cot));
}

// ---------------------------------------------------------------------------

namespace {

struct CurveDerivatives {
  Vector3d T, T1, T2;  // unit tangent and its first two arc-length derivatives
};

Vector3d tangent_of(const SurfaceJet& jet, const Vector2d& v, int eps) {
  const Vector3d t = jet.r1 * v[0] + jet.r2 * v[1];
  const double q = std::abs(inner_e(t, t, eps));
  if (!(q > 0)) throw DegenerateError("thermal state vector vanishes");
  return t / std::sqrt(q);
}

// direction of unit arc-length speed in parameter space
Vector2d unit_direction(const SurfaceJet& jet, const Vector2d& v, int eps) {
  const Vector3d t = jet.r1 * v[0] + jet.r2 * v[1];
  const double q = std::abs(inner_e(t, t, eps));
  if (!(q > 0)) throw DegenerateError("thermal state vector vanishes");
  return v / std::sqrt(q);
}

CurveDerivatives exact_curve(const SurfaceExpr& s, const ParamVectorFunction& v, double u1,
                             double u2, double step, int eps) {
  auto T = [&](const Vector2d& u) { return tangent_of(eval_jet(s, u[0], u[1], 1), v(u[0], u[1]), eps); };
  auto along = [&](const std::function<Vector3d(const Vector2d&)>& f, const Vector2d& u) {
    const Vector2d d = step * unit_direction(eval_jet(s, u[0], u[1], 1), v(u[0], u[1]), eps);
    return Vector3d((-f(u + 2 * d) + 8 * f(u + d) - 8 * f(u - d) + f(u - 2 * d)) / (12 * step));
  };
  auto T1 = [&](const Vector2d& u) { return along(T, u); };
  const Vector2d u(u1, u2);
  return {T(u), T1(u), along(T1, u)};
}

}  // namespace

FlatStateReport flat_state_report(const SampledSurface& s, const VectorField& v, double r,
                                  const ParamVectorFunction& exact, int signature,
                                  double tolerance) {
  const Chart& c = s.chart();
  if (!(v.chart() == c)) throw DomainError("thermal state vector does not match the surface chart");
  for (const Vector2d& x : v.values())
    if (!(x.norm() > 0)) throw DegenerateError("thermal state vector vanishes on the chart");

  FlatStateReport rep;
  rep.tolerance = tolerance;
  rep.developability = developability(s, 1e-8, signature);

  const MetricField metric = s.induced_metric(signature);
  const ScalarField div = div_a(metric, v);
  for (double d : div.values()) rep.divergence_residual = std::max(rep.divergence_residual, std::abs(d - r));

  const SurfaceGeometry geo = surface_geometry(s, signature);
  const double diam = s.diameter();
  const bool pointwise = s.source().has_value() && static_cast<bool>(exact);

  std::vector<CurveDerivatives> curve(c.size());
  if (pointwise) {
    const double step = 1e-3 * c.diameter();
    parallel_for(c.size(), [&](std::size_t k) {
      const int i = static_cast<int>(k / c.n2()), j = static_cast<int>(k % c.n2());
      curve[k] = exact_curve(*s.source(), exact, c.coord(0, i), c.coord(1, j), step, signature);
    });
  } else {
    std::vector<Vector3d> T(c.size()), T1(c.size());
    std::vector<Vector2d> dir(c.size());
    for (int i = 0; i < c.n1(); ++i)
      for (int j = 0; j < c.n2(); ++j) {
        const SurfaceJet jet = s.jet(i, j);
        T[c.index(i, j)] = tangent_of(jet, v(i, j), signature);
        dir[c.index(i, j)] = unit_direction(jet, v(i, j), signature);
      }
    auto along = [&](const std::vector<Vector3d>& f, int i, int j) {
      auto get = [&](int a, int b) -> Vector3d { return f[c.index(a, b)]; };
      const Vector2d& d = dir[c.index(i, j)];
      return Vector3d(d[0] * fd_first(c, 0, i, j, get) + d[1] * fd_first(c, 1, i, j, get));
    };
    for (int i = 0; i < c.n1(); ++i)
      for (int j = 0; j < c.n2(); ++j) T1[c.index(i, j)] = along(T, i, j);
    for (int i = 0; i < c.n1(); ++i)
      for (int j = 0; j < c.n2(); ++j) {
        const std::size_t k = c.index(i, j);
        curve[k] = {T[k], T1[k], along(T1, i, j)};
      }
  }

  const double kappa_floor = 1e-6 / diam;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const CurveDerivatives& d = curve[k];
    const double kappa = std::sqrt(std::abs(inner_e(d.T1, d.T1, signature)));
    if (kappa <= kappa_floor) continue;
    const Vector3d N = d.T1 / kappa;
    const double orient = inner_e(N, geo.forms[k].normal, signature) < 0 ? -1.0 : 1.0;
    const double H = orient * geo.curvature[k].H;
    const double tau = d.T.dot(d.T1.cross(d.T2)) / (kappa * kappa);
    rep.coupling_residual =
        std::max(rep.coupling_residual, std::abs(2 * H * kappa - kappa * kappa - tau * tau));
  }

  const ScalarField Kin = intrinsic_gauss_curvature(metric);
  for (int i = 0; i < c.n1(); ++i)
    for (int j = 0; j < c.n2(); ++j)
      if (metric.analytic() || c.interior(i, j, 2))
        rep.flatness = std::max(rep.flatness, std::abs(Kin(i, j)) * diam * diam);
  return rep;
}

NormalCurvatureEstimate mean_curv_from_normal(const Field3& n, const Vector3d& p, double step,
                                              double kappa, double tau) {
  if (!n) throw DomainError("normal extension unavailable");
  if (!(step > 0)) throw DomainError("derivative step must be positive");
  NormalCurvatureEstimate out;
  for (int a = 0; a < 3; ++a)
    out.div_n += directional_derivative(n, p, Vector3d::Unit(a), step)[a];
  out.H = -0.5 * out.div_n;
  out.K = -kappa * (kappa + out.div_n) - tau * tau;
  return out;
}

}  // namespace weylsheet

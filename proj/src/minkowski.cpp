#include "weylsheet/minkowski.hpp"

#include <cmath>

#include "weylsheet/errors.hpp"

namespace weylsheet {

std::string to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Spacelike:
      return "spacelike";
    case CausalClass::Timelike:
      return "timelike";
    case CausalClass::Null:
      return "null";
  }
  return "unknown";
}

namespace {
void check_signature(int eps) {
  if (eps != 1 && eps != -1) throw DomainError("signature must be +1 or -1");
}
}  // namespace

double inner_e(const Vector3d& u, const Vector3d& v, int eps) {
  check_signature(eps);
  return u.x() * v.x() + u.y() * v.y() + eps * u.z() * v.z();
}

CausalClass causal_class(const Vector3d& v, int eps, double rel_tol) {
  const double q = inner_e(v, v, eps);
  if (std::abs(q) <= rel_tol * v.squaredNorm()) return CausalClass::Null;
  return q > 0 ? CausalClass::Spacelike : CausalClass::Timelike;
}

Vector3d cross_e(const Vector3d& u, const Vector3d& v, int eps) {
  check_signature(eps);
  Vector3d c = u.cross(v);
  c.z() *= eps;
  return c;
}

Vector3d cross_h(const Vector3d& u, const Vector3d& v, const Vector3d& n) {
  if (std::abs(n.squaredNorm() - 1.0) > 1e-12) throw DomainError("cross_h requires a unit vector n");
  const Vector3d w = u.cross(v);
  return w - 2.0 * w.dot(n) * n;
}

double inner_h(const Vector3d& u, const Vector3d& v, const Vector3d& n) {
  return u.dot(v) - 2.0 * u.dot(n) * v.dot(n);
}

std::pair<Vector3d, Vector3d> isotropic_pair(const Vector3d& s, const Vector3d& n) {
  const double r = 1.0 / std::sqrt(2.0);
  return {r * (s + n), r * (s - n)};
}

}  // namespace weylsheet

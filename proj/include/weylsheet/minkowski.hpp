#pragma once

// Vector algebra in R^3 with the constant metric diag(1, 1, eps), eps = ±1.

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace weylsheet {

using Eigen::Vector3d;

enum class CausalClass { Spacelike, Timelike, Null };

std::string to_string(CausalClass c);

/// u1 v1 + u2 v2 + eps u3 v3.
double inner_e(const Vector3d& u, const Vector3d& v, int eps);

/// Sign of (v,v)_eps; |(v,v)| <= rel_tol |v|^2 counts as null.
CausalClass causal_class(const Vector3d& v, int eps, double rel_tol = 1e-12);

/// Cross product raised with diag(1,1,eps): eps-orthogonal to both factors.
Vector3d cross_e(const Vector3d& u, const Vector3d& v, int eps);

/// R_n(u x v) with R_n = 1 - 2 n⊗n; n must be a Euclidean unit vector.
Vector3d cross_h(const Vector3d& u, const Vector3d& v, const Vector3d& n);

/// (u,v)_h = (u,v)_g - 2 (u,n)_g (v,n)_g.
double inner_h(const Vector3d& u, const Vector3d& v, const Vector3d& n);

/// Isotropic pair (s ± n)/√2 for a unit s orthogonal to n.
std::pair<Vector3d, Vector3d> isotropic_pair(const Vector3d& s, const Vector3d& n);

}  // namespace weylsheet

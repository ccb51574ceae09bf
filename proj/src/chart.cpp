#include "weylsheet/chart.hpp"

#include <cmath>
#include <sstream>

#include "weylsheet/errors.hpp"

namespace weylsheet {

Chart::Chart(double u1_min, double u1_max, double u2_min, double u2_max, int n1, int n2,
             bool periodic1, bool periodic2)
    : min_{u1_min, u2_min}, max_{u1_max, u2_max}, n_{n1, n2}, periodic_{periodic1, periodic2} {
  for (int a = 0; a < 2; ++a) {
    if (!std::isfinite(min_[a]) || !std::isfinite(max_[a]))
      throw DomainError("chart bounds must be finite");
    if (!(min_[a] < max_[a])) throw DomainError("chart requires u_min < u_max on every axis");
    if (n_[a] < 3) throw DomainError("chart resolution must be at least 3 nodes per axis");
  }
}

double Chart::coord(int axis, int k) const {
  if (k == n_[axis] - 1) return max_[axis];
  return min_[axis] + k * h(axis);
}

Chart Chart::with_resolution(int n1, int n2) const {
  return Chart(min_[0], max_[0], min_[1], max_[1], n1, n2, periodic_[0], periodic_[1]);
}

bool Chart::contains(double u1, double u2, double slack) const {
  const double s1 = slack * (max_[0] - min_[0]);
  const double s2 = slack * (max_[1] - min_[1]);
  return u1 >= min_[0] - s1 && u1 <= max_[0] + s1 && u2 >= min_[1] - s2 && u2 <= max_[1] + s2;
}

bool Chart::on_boundary(int i, int j) const { return !interior(i, j, 1); }

bool Chart::interior(int i, int j, int margin) const {
  const int k[2] = {i, j};
  for (int a = 0; a < 2; ++a) {
    if (periodic_[a]) continue;
    if (k[a] < margin || k[a] > n_[a] - 1 - margin) return false;
  }
  return true;
}

int Chart::canonical(int axis, int k) const {
  return (periodic_[axis] && k == n_[axis] - 1) ? 0 : k;
}

double Chart::diameter() const { return std::hypot(max_[0] - min_[0], max_[1] - min_[1]); }

namespace {

// Node k+offset along a periodic axis, skipping the duplicate end node.
int wrap(const Chart& chart, int axis, int k, int offset) {
  const int m = chart.n(axis) - 1;
  return ((chart.canonical(axis, k) + offset) % m + m) % m;
}

bool use_fourth_order(const Chart& chart, int axis, int order) {
  if (order != 2 && order != 4) throw DomainError("stencil order must be 2 or 4");
  return order == 4 && chart.n(axis) >= 6;
}

Stencil first_derivative_fourth(const Chart& chart, int axis, int k) {
  const int n = chart.n(axis);
  const double w = 1.0 / (12.0 * chart.h(axis));
  static constexpr double central[5] = {1, -8, 0, 8, -1};
  static constexpr double edge0[5] = {-25, 48, -36, 16, -3};
  static constexpr double edge1[5] = {-3, -10, 18, -6, 1};
  Stencil s;
  if (chart.periodic(axis)) {
    for (int o = -2; o <= 2; ++o)
      if (o != 0) s.add(wrap(chart, axis, k, o), central[o + 2] * w);
  } else if (k <= 1 || k >= n - 2) {
    const bool left = k <= 1;
    const double* c = (left ? k : n - 1 - k) == 0 ? edge0 : edge1;
    const int start = left ? 0 : n - 1;
    const int dir = left ? 1 : -1;
    for (int q = 0; q < 5; ++q) s.add(start + dir * q, dir * c[q] * w);
  } else {
    for (int o = -2; o <= 2; ++o)
      if (o != 0) s.add(k + o, central[o + 2] * w);
  }
  return s;
}

Stencil second_derivative_fourth(const Chart& chart, int axis, int k) {
  const int n = chart.n(axis);
  const double w = 1.0 / (12.0 * chart.h(axis) * chart.h(axis));
  static constexpr double central[5] = {-1, 16, -30, 16, -1};
  static constexpr double edge0[6] = {45, -154, 214, -156, 61, -10};
  static constexpr double edge1[6] = {10, -15, -4, 14, -6, 1};
  Stencil s;
  if (chart.periodic(axis)) {
    for (int o = -2; o <= 2; ++o) s.add(wrap(chart, axis, k, o), central[o + 2] * w);
  } else if (k <= 1 || k >= n - 2) {
    const bool left = k <= 1;
    const double* c = (left ? k : n - 1 - k) == 0 ? edge0 : edge1;
    const int start = left ? 0 : n - 1;
    const int dir = left ? 1 : -1;
    for (int q = 0; q < 6; ++q) s.add(start + dir * q, c[q] * w);
  } else {
    for (int o = -2; o <= 2; ++o) s.add(k + o, central[o + 2] * w);
  }
  return s;
}

}  // namespace

Stencil first_derivative_stencil(const Chart& chart, int axis, int k, int order) {
  if (use_fourth_order(chart, axis, order)) return first_derivative_fourth(chart, axis, k);
  const int n = chart.n(axis);
  const double h = chart.h(axis);
  Stencil s;
  if (chart.periodic(axis)) {
    const int left = k == 0 ? n - 2 : k - 1;
    const int right = k == n - 1 ? 1 : k + 1;
    s.add(left, -0.5 / h);
    s.add(right, 0.5 / h);
  } else if (k == 0) {
    s.add(0, -1.5 / h);
    s.add(1, 2.0 / h);
    s.add(2, -0.5 / h);
  } else if (k == n - 1) {
    s.add(n - 1, 1.5 / h);
    s.add(n - 2, -2.0 / h);
    s.add(n - 3, 0.5 / h);
  } else {
    s.add(k - 1, -0.5 / h);
    s.add(k + 1, 0.5 / h);
  }
  return s;
}

Stencil second_derivative_stencil(const Chart& chart, int axis, int k, int order) {
  if (use_fourth_order(chart, axis, order)) return second_derivative_fourth(chart, axis, k);
  const int n = chart.n(axis);
  const double h2 = chart.h(axis) * chart.h(axis);
  Stencil s;
  if (chart.periodic(axis)) {
    const int left = k == 0 ? n - 2 : k - 1;
    const int right = k == n - 1 ? 1 : k + 1;
    s.add(left, 1.0 / h2);
    s.add(k, -2.0 / h2);
    s.add(right, 1.0 / h2);
  } else if (k == 0 || k == n - 1) {
    const int dir = k == 0 ? 1 : -1;
    if (n >= 4) {
      s.add(k, 2.0 / h2);
      s.add(k + dir, -5.0 / h2);
      s.add(k + 2 * dir, 4.0 / h2);
      s.add(k + 3 * dir, -1.0 / h2);
    } else {
      s.add(k, 1.0 / h2);
      s.add(k + dir, -2.0 / h2);
      s.add(k + 2 * dir, 1.0 / h2);
    }
  } else {
    s.add(k - 1, 1.0 / h2);
    s.add(k, -2.0 / h2);
    s.add(k + 1, 1.0 / h2);
  }
  return s;
}

std::string describe(const Chart& chart) {
  std::ostringstream os;
  os << "[" << chart.min(0) << "," << chart.max(0) << "]x[" << chart.min(1) << ","
     << chart.max(1) << "] " << chart.n1() << "x" << chart.n2();
  return os.str();
}

}  // namespace weylsheet

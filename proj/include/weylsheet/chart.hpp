#pragma once

// Rectangular parameter charts and the finite-difference stencils used on them.
//
// Nodes are u_alpha(k) = min + k h with h = (max - min)/(n - 1). On a periodic
// axis the last node duplicates the first, so the neighbours of node 0 are
// n-2 and 1.

#include <array>
#include <cstddef>
#include <string>
#include <type_traits>

#include "weylsheet/errors.hpp"

namespace weylsheet {

class Chart {
 public:
  Chart() = default;
  Chart(double u1_min, double u1_max, double u2_min, double u2_max, int n1, int n2,
        bool periodic1 = false, bool periodic2 = false);

  double min(int axis) const { return min_[axis]; }
  double max(int axis) const { return max_[axis]; }
  int n(int axis) const { return n_[axis]; }
  double h(int axis) const { return (max_[axis] - min_[axis]) / (n_[axis] - 1); }
  bool periodic(int axis) const { return periodic_[axis]; }
  double coord(int axis, int k) const;

  int n1() const { return n_[0]; }
  int n2() const { return n_[1]; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1]; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_[1] + j; }

  /// Same chart at a different resolution.
  Chart with_resolution(int n1, int n2) const;

  /// True when (u1,u2) lies in the closed domain, with a relative slack.
  bool contains(double u1, double u2, double slack = 1e-12) const;

  /// Node lies on a non-periodic edge.
  bool on_boundary(int i, int j) const;
  /// At least `margin` nodes away from every non-periodic edge.
  bool interior(int i, int j, int margin = 1) const;

  /// Periodic duplicates (last node of a periodic axis) map to the first node.
  int canonical(int axis, int k) const;

  double diameter() const;

  friend bool operator==(const Chart&, const Chart&) = default;

 private:
  std::array<double, 2> min_{0.0, 0.0};
  std::array<double, 2> max_{1.0, 1.0};
  std::array<int, 2> n_{3, 3};
  std::array<bool, 2> periodic_{false, false};
};

/// Up to six (node, weight) pairs along one axis; weights include 1/h or 1/h^2.
struct Stencil {
  std::array<int, 6> node{};
  std::array<double, 6> weight{};
  int size = 0;

  void add(int k, double w) {
    node[size] = k;
    weight[size] = w;
    ++size;
  }
};

/// First derivative: central inside or across a periodic seam, one-sided at
/// open edges. `order` is 2 or 4; order 4 falls back to 2 on axes with fewer
/// than six nodes.
Stencil first_derivative_stencil(const Chart& chart, int axis, int k, int order = 2);
/// Second derivative: central inside, one-sided at open edges (three-point
/// when the axis has only three nodes).
Stencil second_derivative_stencil(const Chart& chart, int axis, int k, int order = 2);

/// ∂f/∂u_axis at node (i,j). `get(i,j)` returns the node value.
template <class Get>
auto fd_first(const Chart& chart, int axis, int i, int j, Get&& get, int order = 2) {
  const Stencil s = first_derivative_stencil(chart, axis, axis == 0 ? i : j, order);
  using V = std::decay_t<decltype(get(i, j))>;
  V out = s.weight[0] * (axis == 0 ? get(s.node[0], j) : get(i, s.node[0]));
  for (int k = 1; k < s.size; ++k)
    out += s.weight[k] * (axis == 0 ? get(s.node[k], j) : get(i, s.node[k]));
  return out;
}

template <class Get>
auto fd_second(const Chart& chart, int axis, int i, int j, Get&& get, int order = 2) {
  const Stencil s = second_derivative_stencil(chart, axis, axis == 0 ? i : j, order);
  using V = std::decay_t<decltype(get(i, j))>;
  V out = s.weight[0] * (axis == 0 ? get(s.node[0], j) : get(i, s.node[0]));
  for (int k = 1; k < s.size; ++k)
    out += s.weight[k] * (axis == 0 ? get(s.node[k], j) : get(i, s.node[k]));
  return out;
}

/// ∂²f/∂u1∂u2 as the tensor product of the two first-derivative stencils.
template <class Get>
auto fd_mixed(const Chart& chart, int i, int j, Get&& get, int order = 2) {
  const Stencil s1 = first_derivative_stencil(chart, 0, i, order);
  const Stencil s2 = first_derivative_stencil(chart, 1, j, order);
  using V = std::decay_t<decltype(get(i, j))>;
  auto row = [&](int a) {
    V r = s2.weight[0] * get(s1.node[a], s2.node[0]);
    for (int b = 1; b < s2.size; ++b) r += s2.weight[b] * get(s1.node[a], s2.node[b]);
    return r;
  };
  V out = s1.weight[0] * row(0);
  for (int a = 1; a < s1.size; ++a) out += s1.weight[a] * row(a);
  return out;
}

std::string describe(const Chart& chart);

}  // namespace weylsheet

#pragma once

// Truncated bivariate Taylor arithmetic (forward-mode AD of arbitrary fixed order).
//
// A Taylor2<N> holds the coefficients c_{pq} of u1^p u2^q for p + q <= N around an
// expansion point. Order 1 is the classical dual number; order 2 carries exact
// Hessians; order 3 is used where metric second derivatives are built from the
// embedding (third derivatives of the position).

#include <array>
#include <cmath>
#include <cstdint>

namespace weylsheet {

template <int N>
class Taylor2 {
  static_assert(N >= 0 && N <= 6, "Taylor2 order out of supported range");

 public:
  static constexpr int kOrder = N;
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  /// Storage slot of the u1^p u2^q coefficient.
  static constexpr int index(int p, int q) {
    const int d = p + q;
    return d * (d + 1) / 2 + q;
  }

  constexpr Taylor2() = default;
  constexpr Taylor2(double constant) { c_[0] = constant; }  // NOLINT: implicit lift of scalars

  /// The coordinate function u_axis expanded around `at`.
  static Taylor2 variable(int axis, double at) {
    Taylor2 t(at);
    if constexpr (N >= 1) t.c_[axis == 0 ? index(1, 0) : index(0, 1)] = 1.0;
    return t;
  }

  double value() const { return c_[0]; }
  double coeff(int p, int q) const { return c_[index(p, q)]; }
  double& coeff(int p, int q) { return c_[index(p, q)]; }

  /// ∂^{p+q} f / ∂u1^p ∂u2^q at the expansion point.
  double derivative(int p, int q) const { return coeff(p, q) * factorial(p) * factorial(q); }

  /// Series of ∂f/∂u_axis, one order lower.
  Taylor2<(N > 0 ? N - 1 : 0)> partial(int axis) const {
    static_assert(N >= 1, "cannot differentiate an order-0 series");
    Taylor2<(N > 0 ? N - 1 : 0)> out;
    for (int d = 0; d < N; ++d) {
      for (int q = 0; q <= d; ++q) {
        const int p = d - q;
        out.coeff(p, q) = axis == 0 ? (p + 1) * coeff(p + 1, q) : (q + 1) * coeff(p, q + 1);
      }
    }
    return out;
  }

  /// Lower the truncation order.
  template <int M>
  Taylor2<M> truncate() const {
    static_assert(M <= N);
    Taylor2<M> out;
    for (int d = 0; d <= M; ++d)
      for (int q = 0; q <= d; ++q) out.coeff(d - q, q) = coeff(d - q, q);
    return out;
  }

  bool finite() const {
    for (double v : c_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Taylor2& operator+=(const Taylor2& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Taylor2& operator-=(const Taylor2& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Taylor2& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Taylor2& operator*=(const Taylor2& o) { return *this = *this * o; }
  Taylor2& operator/=(const Taylor2& o) { return *this = *this / o; }

  friend Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
  friend Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }
  friend Taylor2 operator-(Taylor2 a) {
    for (double& v : a.c_) v = -v;
    return a;
  }
  friend Taylor2 operator*(Taylor2 a, double s) { return a *= s; }
  friend Taylor2 operator*(double s, Taylor2 a) { return a *= s; }

  friend Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
    Taylor2 out;
    for (int d1 = 0; d1 <= N; ++d1) {
      for (int q1 = 0; q1 <= d1; ++q1) {
        const double x = a.c_[index(d1 - q1, q1)];
        if (x == 0.0) continue;
        for (int d2 = 0; d1 + d2 <= N; ++d2) {
          for (int q2 = 0; q2 <= d2; ++q2) {
            out.c_[index(d1 - q1 + d2 - q2, q1 + q2)] += x * b.c_[index(d2 - q2, q2)];
          }
        }
      }
    }
    return out;
  }

  friend Taylor2 operator/(const Taylor2& a, const Taylor2& b) { return a * reciprocal(b); }

  /// f(a) given the univariate Taylor coefficients f^{(k)}(a0)/k!, k = 0..N.
  static Taylor2 compose(const Taylor2& a, const std::array<double, N + 1>& series) {
    Taylor2 delta = a;
    delta.c_[0] = 0.0;
    Taylor2 out(series[N]);
    for (int k = N - 1; k >= 0; --k) {
      out = out * delta;
      out.c_[0] += series[k];
    }
    return out;
  }

  static Taylor2 reciprocal(const Taylor2& b) {
    std::array<double, N + 1> s{};
    const double inv = 1.0 / b.value();
    double term = inv;
    for (int k = 0; k <= N; ++k) {
      s[k] = term;
      term *= -inv;
    }
    return compose(b, s);
  }

 private:
  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  std::array<double, kSize> c_{};
};

namespace taylor_detail {

template <int N>
std::array<double, N + 1> trig_series(double a0, bool is_cos) {
  // d^k/dx^k sin = sin(x + kπ/2); cos shifts by one more step.
  std::array<double, N + 1> s{};
  const double sv = std::sin(a0), cv = std::cos(a0);
  const double cycle[4] = {sv, cv, -sv, -cv};
  double fact = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    s[k] = cycle[(k + (is_cos ? 1 : 0)) % 4] / fact;
  }
  return s;
}

template <int N>
std::array<double, N + 1> hyp_series(double a0, bool is_cosh) {
  std::array<double, N + 1> s{};
  const double sh = std::sinh(a0), ch = std::cosh(a0);
  double fact = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    s[k] = (((k + (is_cosh ? 1 : 0)) % 2 == 0) ? sh : ch) / fact;
  }
  return s;
}

}  // namespace taylor_detail

template <int N>
Taylor2<N> sin(const Taylor2<N>& a) {
  return Taylor2<N>::compose(a, taylor_detail::trig_series<N>(a.value(), false));
}
template <int N>
Taylor2<N> cos(const Taylor2<N>& a) {
  return Taylor2<N>::compose(a, taylor_detail::trig_series<N>(a.value(), true));
}
template <int N>
Taylor2<N> sinh(const Taylor2<N>& a) {
  return Taylor2<N>::compose(a, taylor_detail::hyp_series<N>(a.value(), false));
}
template <int N>
Taylor2<N> cosh(const Taylor2<N>& a) {
  return Taylor2<N>::compose(a, taylor_detail::hyp_series<N>(a.value(), true));
}

template <int N>
Taylor2<N> exp(const Taylor2<N>& a) {
  std::array<double, N + 1> s{};
  double term = std::exp(a.value());
  for (int k = 0; k <= N; ++k) {
    s[k] = term;
    term /= (k + 1);
  }
  return Taylor2<N>::compose(a, s);
}

template <int N>
Taylor2<N> log(const Taylor2<N>& a) {
  std::array<double, N + 1> s{};
  const double a0 = a.value();
  s[0] = std::log(a0);
  double p = 1.0;
  for (int k = 1; k <= N; ++k) {
    p /= a0;
    s[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
  }
  return Taylor2<N>::compose(a, s);
}

/// a^p for a constant real exponent, via the binomial series around a0.
template <int N>
Taylor2<N> pow(const Taylor2<N>& a, double p) {
  const double rounded = std::round(p);
  if (rounded == p && p >= 0.0 && p <= 64.0) {
    // Exact repeated squaring keeps a0 = 0 well defined for integer powers.
    Taylor2<N> base = a, out(1.0);
    auto e = static_cast<std::uint32_t>(p);
    while (e != 0) {
      if (e & 1u) out = out * base;
      base = base * base;
      e >>= 1u;
    }
    return out;
  }
  std::array<double, N + 1> s{};
  const double a0 = a.value();
  double coeff = std::pow(a0, p);
  for (int k = 0; k <= N; ++k) {
    s[k] = coeff;
    coeff *= (p - k) / ((k + 1) * a0);
  }
  return Taylor2<N>::compose(a, s);
}

template <int N>
Taylor2<N> pow(const Taylor2<N>& a, const Taylor2<N>& b) {
  bool constant_exponent = true;
  for (int d = 1; d <= N; ++d)
    for (int q = 0; q <= d; ++q)
      if (b.coeff(d - q, q) != 0.0) constant_exponent = false;
  if (constant_exponent) return pow(a, b.value());
  return exp(b * log(a));
}

template <int N>
Taylor2<N> sqrt(const Taylor2<N>& a) {
  return pow(a, 0.5);
}

template <int N>
Taylor2<N> atan(const Taylor2<N>& a) {
  // atan' = 1/(1 + x^2); the series g_k of 1/(q0 + 2 a0 t + t^2) follows from
  // g (q0 + 2 a0 t + t^2) = 1.
  const double a0 = a.value();
  const double q0 = 1.0 + a0 * a0;
  std::array<double, N + 1> g{};
  for (int k = 0; k <= N; ++k) {
    const double prev1 = k >= 1 ? g[k - 1] : 0.0;
    const double prev2 = k >= 2 ? g[k - 2] : 0.0;
    g[k] = ((k == 0 ? 1.0 : 0.0) - 2.0 * a0 * prev1 - prev2) / q0;
  }
  std::array<double, N + 1> s{};
  s[0] = std::atan(a0);
  for (int k = 1; k <= N; ++k) s[k] = g[k - 1] / k;
  return Taylor2<N>::compose(a, s);
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Taylor2<N>& x) {
  return x.value();
}

inline bool all_finite(double x) { return std::isfinite(x); }
template <int N>
bool all_finite(const Taylor2<N>& x) {
  return x.finite();
}

}  // namespace weylsheet

#pragma once

// Independent reference computations shared by the unit tests.

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "weylsheet/surface.hpp"

namespace oracle {

using weylsheet::Vector3d;

/// Central differences of the position, step h.
inline Vector3d d1(const weylsheet::SurfaceExpr& s, int axis, double u1, double u2, double h = 1e-5) {
  const double e1 = axis == 0 ? h : 0, e2 = axis == 1 ? h : 0;
  return (s.position(u1 + e1, u2 + e2) - s.position(u1 - e1, u2 - e2)) / (2 * h);
}

/// Central differences of an exact first partial, giving a second partial.
inline Vector3d d2(const weylsheet::SurfaceExpr& s, int a, int b, double u1, double u2,
                   double h = 1e-5) {
  const double e1 = b == 0 ? h : 0, e2 = b == 1 ? h : 0;
  return (weylsheet::eval_jet(s, u1 + e1, u2 + e2).first(a) -
          weylsheet::eval_jet(s, u1 - e1, u2 - e2).first(a)) /
         (2 * h);
}

inline double rel(const Vector3d& got, const Vector3d& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

/// Uniform point strictly inside the chart, away from the edges by `pad` of the width.
inline std::pair<double, double> interior_point(std::mt19937_64& rng, const weylsheet::Chart& c,
                                                double pad = 0.05) {
  std::uniform_real_distribution<double> t(pad, 1 - pad);
  return {c.min(0) + t(rng) * (c.max(0) - c.min(0)), c.min(1) + t(rng) * (c.max(1) - c.min(1))};
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("weylsheet_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace oracle

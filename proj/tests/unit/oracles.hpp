#pragma once

// Finite-difference and reference oracles shared by the unit tests. These are
// deliberately independent of the analytic derivative paths they check.

#include <cmath>
#include <functional>
#include <random>

#include "densnav/density.hpp"

namespace densnav::test {

inline Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& x,
                        double h = 1e-6) {
  return Vec2((f(x + Vec2(h, 0)) - f(x - Vec2(h, 0))) / (2 * h),
              (f(x + Vec2(0, h)) - f(x - Vec2(0, h))) / (2 * h));
}

inline double fd_time(const std::function<double(double)>& f, double t, double h = 1e-6) {
  return (f(t + h) - f(t - h)) / (2 * h);
}

inline double fd_laplacian(const std::function<double(const Vec2&)>& f, const Vec2& x,
                           double h = 1e-4) {
  return (f(x + Vec2(h, 0)) + f(x - Vec2(h, 0)) + f(x + Vec2(0, h)) + f(x - Vec2(0, h)) -
          4.0 * f(x)) /
         (h * h);
}

inline double rel_err(double got, double want, double floor_ = 1e-12) {
  return std::abs(got - want) / std::max(std::abs(want), floor_);
}

inline double rel_err(const Vec2& got, const Vec2& want, double floor_ = 1e-8) {
  return (got - want).norm() / std::max(want.norm(), floor_);
}

/// True if x is within eps of any branch seam of the field's bumps at time t.
inline bool near_seam(const DensityField& f, double t, const Vec2& x, double eps = 1e-5) {
  for (size_t k = 0; k < f.obstacles().size(); ++k) {
    const auto& o = f.obstacles()[k];
    const double d = f.displacement(static_cast<int>(k), t, x).norm();
    if (std::abs(d - o.shape.r) < eps || std::abs(d - o.shape.s) < eps) return true;
  }
  return false;
}

inline std::mt19937_64 rng(uint64_t seed = 42) { return std::mt19937_64(seed); }

}  // namespace densnav::test

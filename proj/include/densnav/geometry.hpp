#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace densnav {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/// Component-wise wrap of a joint displacement to (-pi, pi]^2.
inline Vec2 wrap_angles(const Vec2& q) {
  return Vec2(wrap_angle(q.x()), wrap_angle(q.y()));
}

struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};

  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  Vec2 extent() const { return hi - lo; }
  double area() const { return (hi.x() - lo.x()) * (hi.y() - lo.y()); }
  Vec2 lerp(double u, double v) const {
    return Vec2(lo.x() + u * (hi.x() - lo.x()), lo.y() + v * (hi.y() - lo.y()));
  }
};

struct Disc {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;

  bool contains(const Vec2& p) const { return (p - center).norm() <= radius; }
  double area() const { return kPi * radius * radius; }
};

/// Uniform sample from a disc.
inline Vec2 sample_disc(const Disc& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = d.radius * std::sqrt(unit(rng));
  const double a = 2.0 * kPi * unit(rng);
  return d.center + r * Vec2(std::cos(a), std::sin(a));
}

/// Time-parameterized planar curve with analytic velocity.
///
/// Built-in family: c(t) = origin + velocity*t + amp_sin*sin(omega*t) + amp_cos*cos(omega*t),
/// which covers the static, constant-velocity, sinusoid-perturbed and circular cases.
/// Arbitrary curves can be supplied via a callback; their velocity falls back to a
/// central finite difference with h = 1e-4 s.
class Path2 {
 public:
  Path2() = default;

  static Path2 fixed(const Vec2& p) {
    Path2 c;
    c.origin_ = p;
    return c;
  }
  static Path2 line(const Vec2& origin, const Vec2& velocity) {
    Path2 c;
    c.origin_ = origin;
    c.velocity_ = velocity;
    return c;
  }
  static Path2 sinusoid(const Vec2& origin, const Vec2& velocity, const Vec2& amp_sin,
                        const Vec2& amp_cos, double omega) {
    Path2 c;
    c.origin_ = origin;
    c.velocity_ = velocity;
    c.amp_sin_ = amp_sin;
    c.amp_cos_ = amp_cos;
    c.omega_ = omega;
    return c;
  }
  static Path2 circle(const Vec2& center, double radius, double omega, double phase) {
    // center + R*[cos(w t + phi), sin(w t + phi)] in amp_sin/amp_cos form
    const Vec2 as(-radius * std::sin(phase), radius * std::cos(phase));
    const Vec2 ac(radius * std::cos(phase), radius * std::sin(phase));
    return sinusoid(center, Vec2::Zero(), as, ac, omega);
  }
  static Path2 custom(std::function<Vec2(double)> fn) {
    Path2 c;
    c.custom_ = std::move(fn);
    return c;
  }

  Vec2 position(double t) const {
    if (custom_) return custom_(t);
    Vec2 p = origin_ + velocity_ * t;
    if (omega_ != 0.0) p += amp_sin_ * std::sin(omega_ * t) + amp_cos_ * std::cos(omega_ * t);
    return p;
  }

  Vec2 velocity(double t) const {
    if (custom_) {
      const double h = 1e-4;
      return (custom_(t + h) - custom_(t - h)) / (2.0 * h);
    }
    Vec2 v = velocity_;
    if (omega_ != 0.0)
      v += omega_ * (amp_sin_ * std::cos(omega_ * t) - amp_cos_ * std::sin(omega_ * t));
    return v;
  }

  bool is_static() const {
    return !custom_ && velocity_.isZero() && (omega_ == 0.0 || (amp_sin_.isZero() && amp_cos_.isZero()));
  }

  /// Shift the whole curve by a constant offset (custom curves are wrapped).
  Path2 shifted(const Vec2& d) const {
    if (custom_) {
      auto fn = custom_;
      return custom([fn, d](double t) { return fn(t) + d; });
    }
    Path2 c = *this;
    c.origin_ += d;
    return c;
  }

 private:
  Vec2 origin_{0.0, 0.0};
  Vec2 velocity_{0.0, 0.0};
  Vec2 amp_sin_{0.0, 0.0};
  Vec2 amp_cos_{0.0, 0.0};
  double omega_ = 0.0;
  std::function<Vec2(double)> custom_;
};

}  // namespace densnav

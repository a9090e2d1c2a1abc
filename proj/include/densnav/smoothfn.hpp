#pragma once

#include "densnav/geometry.hpp"

namespace densnav {

// Below this argument exp(-1/tau) is treated as exactly zero, and so are its
// derivatives. exp(-200) ~ 1.4e-87 is far below the resolution of every value
// the step function is added to, so all branches stay consistent.
constexpr double kTauUnderflow = 0.005;

/// exp(-1/tau) for tau > 0, 0 for tau <= 0. C-infinity on all of R.
double elementary_f(double tau);
/// First derivative of elementary_f (0 at and below the underflow threshold).
double elementary_f_d1(double tau);
/// Second derivative of elementary_f.
double elementary_f_d2(double tau);

struct StepEval {
  double value = 0.0;  // fbar(tau)
  double d1 = 0.0;     // d fbar / d tau
  double d2 = 0.0;     // d^2 fbar / d tau^2
};

/// Smooth step: (1-theta)*f(tau)/(f(tau)+f(1-tau)) + theta.
/// Equals theta for tau <= 0 and 1 for tau >= 1, monotone in between.
StepEval smooth_step_eval(double tau, double theta);
double smooth_step(double tau, double theta);

/// Geometry of one inverse bump: occupancy floor, obstacle radius, sensing radius.
struct BumpShape {
  double theta = 0.05;  // in (0,1)
  double r = 1.0;       // obstacle radius
  double s = 2.0;       // sensing radius, s > r

  void validate() const;  // throws std::invalid_argument
};

/// One circular obstacle: shape plus its center trajectory.
struct ObstacleSpec {
  BumpShape shape;
  Path2 center;
};

/// Everything the density evaluators need from one bump at one (t, x).
struct BumpEval {
  double value = 1.0;
  Vec2 grad = Vec2::Zero();
  Vec2 hess_diag = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  double dt = 0.0;  // partial w.r.t. time, = -grad . cdot(t)
};

/// Displacement-based core: evaluates the bump and its spatial derivatives at
/// displacement u = x - c from the obstacle center. No time dependence here.
void bump_core(const BumpShape& shape, const Vec2& u, BumpEval& out);

double bump_value(const ObstacleSpec& obs, double t, const Vec2& x);
Vec2 bump_grad(const ObstacleSpec& obs, double t, const Vec2& x);
Vec2 bump_hess_diag(const ObstacleSpec& obs, double t, const Vec2& x);
double bump_dt(const ObstacleSpec& obs, double t, const Vec2& x);
/// Full evaluation including the time derivative.
BumpEval bump_eval(const ObstacleSpec& obs, double t, const Vec2& x);

}  // namespace densnav

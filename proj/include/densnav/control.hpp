#pragma once

#include <optional>
#include <span>

#include "densnav/density.hpp"
#include "densnav/robots.hpp"

namespace densnav {

struct ControlCommand {
  Vec2 u = Vec2::Zero();
  bool saturated = false;
};

/// Gradient feedback law u = beta * grad(rho). Dynamic-target fields get the
/// target-velocity feedforward on top.
ControlCommand gradient_control(const DensityField& field, double t, const Vec2& x);

/// Infinity-norm saturation: scales u by u_max/|u|_inf when it exceeds the
/// bound, preserving direction.
ControlCommand saturate(const ControlCommand& cmd, double u_max);

struct UnicycleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // wrapped to (-pi, pi]

  Vec2 pos() const { return Vec2(x, y); }
};

struct UnicycleCommand {
  double v = 0.0;
  double omega = 0.0;
};

/// v = |u|, omega = dtilde_dot - K * wrap(heading - atan2(u_y, u_x)).
/// For |u| below 1e-9 the heading reference is taken from prev_delta_tilde
/// (0 if absent) and v = 0.
UnicycleCommand unicycle_control(const UnicycleState& state, const Vec2& u_xy, double K,
                                 double dtilde_dot,
                                 std::optional<double> prev_delta_tilde = std::nullopt);

/// Stateful wrapper that remembers the previous heading reference and
/// finite-differences its rate across control steps (wrap-aware). The first
/// step uses dtilde_dot = 0.
class UnicycleTracker {
 public:
  static constexpr double kFeedforwardLimit = 2.0 * kPi;  // rad/s

  explicit UnicycleTracker(double K) : K_(K) {}
  UnicycleCommand control(const UnicycleState& state, const Vec2& u_xy, double t);
  void reset();

 private:
  double K_;
  std::optional<double> prev_tilde_;
  double prev_t_ = 0.0;
};

/// Backstepping law for double integrators:
///   u = d/dt(beta*grad rho) - K*(v - beta*grad rho),
/// with the total derivative split into the analytic time partial and a
/// directional finite difference of the gradient along v (h = 1e-5).
ControlCommand backstepping_control(const DensityField& field, double t, const Vec2& x,
                                    const Vec2& v, double K);

struct SFMParams {
  double A = 2000.0;
  double B = 0.08;
  double kappa1 = 1.2e5;
  double kappa2 = 2.4e5;
  double d_H = 2.0;              // sensing distance
  double desired_speed = 1.0;    // not given in the source model description; conventional
  double relaxation_time = 0.5;
  double goal_slow_radius = 0.5;  // arrival taper for the desired speed
  double max_repulsion = 1e7;    // cap for coincident agents
};

struct SFMNeighbor {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
  double radius = 0.0;
};

/// Social-force control (unit mass): desired force toward the target plus
/// exponential and body/friction repulsion from neighbors within d_H.
ControlCommand sfm_control(const Vec2& x, const Vec2& v, double radius,
                           std::span<const SFMNeighbor> neighbors, const SFMParams& params,
                           const Vec2& target);

/// Computed-torque law u = M(q)(qddot_d - Kp e - Kv edot) + H(q, qdot) with
/// diagonal gains. Throws std::runtime_error on a singular mass matrix.
Vec2 arm_inverse_dynamics(const TwoLinkArm& arm, const Vec2& q, const Vec2& qdot, const Vec2& q_d,
                          const Vec2& qdot_d, const Vec2& qddot_d, const Vec2& Kp, const Vec2& Kv);

}  // namespace densnav

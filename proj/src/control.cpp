#include "densnav/control.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace densnav {

ControlCommand gradient_control(const DensityField& field, double t, const Vec2& x) {
  ControlCommand cmd;
  cmd.u = field.beta() * field.rho_grad(t, x);
  if (field.mode() == FieldMode::kDynamicTarget) cmd.u += field.target_velocity(t);
  return cmd;
}

ControlCommand saturate(const ControlCommand& cmd, double u_max) {
  const double ninf = cmd.u.lpNorm<Eigen::Infinity>();
  if (ninf <= u_max) return cmd;
  ControlCommand out;
  out.u = cmd.u * (u_max / ninf);
  out.saturated = true;
  return out;
}

UnicycleCommand unicycle_control(const UnicycleState& state, const Vec2& u_xy, double K,
                                 double dtilde_dot, std::optional<double> prev_delta_tilde) {
  UnicycleCommand out;
  double tilde;
  if (u_xy.norm() < 1e-9) {
    out.v = 0.0;
    tilde = prev_delta_tilde.value_or(0.0);
  } else {
    out.v = u_xy.norm();
    tilde = std::atan2(u_xy.y(), u_xy.x());
  }
  out.omega = dtilde_dot - K * wrap_angle(state.heading - tilde);
  return out;
}

UnicycleCommand UnicycleTracker::control(const UnicycleState& state, const Vec2& u_xy, double t) {
  double tilde;
  if (u_xy.norm() < 1e-9) {
    tilde = prev_tilde_.value_or(0.0);
  } else {
    tilde = std::atan2(u_xy.y(), u_xy.x());
  }
  double tilde_dot = 0.0;
  if (prev_tilde_ && t > prev_t_) tilde_dot = wrap_angle(tilde - *prev_tilde_) / (t - prev_t_);
  // The heading reference can flip by ~pi within one step when attraction and
  // repulsion momentarily cancel; an unbounded finite-difference feedforward
  // would then spin the vehicle. Rate-limit it to one turn per second.
  tilde_dot = std::clamp(tilde_dot, -kFeedforwardLimit, kFeedforwardLimit);
  UnicycleCommand out = unicycle_control(state, u_xy, K_, tilde_dot, prev_tilde_);
  prev_tilde_ = tilde;
  prev_t_ = t;
  return out;
}

void UnicycleTracker::reset() {
  prev_tilde_.reset();
  prev_t_ = 0.0;
}

ControlCommand backstepping_control(const DensityField& field, double t, const Vec2& x,
                                    const Vec2& v, double K) {
  FieldEval e;
  field.eval(t, x, e, /*with_grad_dt=*/true);
  const double beta = field.beta();
  // Hessian-velocity product by a directional central difference of the gradient.
  Vec2 hess_v = Vec2::Zero();
  const double speed = v.norm();
  if (speed > 1e-12) {
    const double h = 1e-5;
    const Vec2 dir = v / speed;
    hess_v = (field.rho_grad(t, x + h * dir) - field.rho_grad(t, x - h * dir)) / (2.0 * h) * speed;
  }
  ControlCommand cmd;
  cmd.u = beta * (e.grad_dt + hess_v) - K * (v - beta * e.grad);
  return cmd;
}

ControlCommand sfm_control(const Vec2& x, const Vec2& v, double radius,
                           std::span<const SFMNeighbor> neighbors, const SFMParams& params,
                           const Vec2& target) {
  ControlCommand cmd;
  Vec2 e_target = Vec2::Zero();
  const Vec2 to_target = target - x;
  const double dist = to_target.norm();
  if (dist > 1e-12) e_target = to_target / dist;
  // Desired speed tapers within goal_slow_radius so the agent can actually
  // stop at a point target instead of orbiting it.
  const double v_des = params.desired_speed * std::min(1.0, dist / params.goal_slow_radius);
  const Vec2 f_desired = (v_des * e_target - v) / params.relaxation_time;

  Vec2 f_rep = Vec2::Zero();
  for (const auto& nb : neighbors) {
    const Vec2 d = x - nb.pos;
    const double dist = d.norm();
    if (dist > params.d_H) continue;
    const double r_ij = radius + nb.radius;
    Vec2 n_hat;
    if (dist < 1e-12) {
      static bool warned = false;
      if (!warned) {
        std::cerr << "sfm_control: coincident agents, repulsion capped at "
                  << params.max_repulsion << "\n";
        warned = true;
      }
      n_hat = Vec2(1.0, 0.0);
    } else {
      n_hat = d / dist;
    }
    const Vec2 t_hat(-n_hat.y(), n_hat.x());
    const double overlap = r_ij - dist;
    const double body = overlap > 0.0 ? overlap : 0.0;  // g(r_ij - d_ij)
    double normal_mag = params.A * std::exp(overlap / params.B) + params.kappa1 * body;
    normal_mag = std::min(normal_mag, params.max_repulsion);
    const double dv_t = (nb.vel - v).dot(t_hat);
    double tangent_mag = params.kappa2 * body * dv_t;
    tangent_mag = std::clamp(tangent_mag, -params.max_repulsion, params.max_repulsion);
    f_rep += normal_mag * n_hat + tangent_mag * t_hat;
  }
  cmd.u = f_desired + f_rep;
  return cmd;
}

Vec2 arm_inverse_dynamics(const TwoLinkArm& arm, const Vec2& q, const Vec2& qdot, const Vec2& q_d,
                          const Vec2& qdot_d, const Vec2& qddot_d, const Vec2& Kp, const Vec2& Kv) {
  const Vec2 e = q - q_d;
  const Vec2 edot = qdot - qdot_d;
  const Mat2 M = arm.mass_matrix(q);
  if (std::abs(M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0)) < 1e-12)
    throw std::runtime_error("arm_inverse_dynamics: singular mass matrix");
  const Vec2 a(qddot_d.x() - Kp.x() * e.x() - Kv.x() * edot.x(),
               qddot_d.y() - Kp.y() * e.y() - Kv.y() * edot.y());
  return M * a + arm.bias_torques(q, qdot);
}

}  // namespace densnav

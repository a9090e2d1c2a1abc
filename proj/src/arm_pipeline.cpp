#include "densnav/arm_pipeline.hpp"

#include <cmath>

#include "densnav/control.hpp"

namespace densnav {

Path2 arm_joint_target(const TwoLinkArm& arm, const Path2& task, bool elbow_down) {
  return Path2::custom([arm, task, elbow_down](double t) {
    const auto q = arm.inverse_kinematics(task.position(t), elbow_down);
    return q ? *q : Vec2::Zero();
  });
}

ArmRunResult run_arm_pipeline(const ArmConfig& ac) {
  ArmRunResult res;
  res.joint_obstacles =
      workspace_to_joint_obstacles(ac.arm, ac.task_obstacles, ac.grid_n, ac.obstacle_radius_cap);
  res.coverage =
      joint_obstacle_coverage(ac.arm, ac.task_obstacles, res.joint_obstacles, ac.grid_n);

  JointDensitySpec spec;
  for (const auto& d : res.joint_obstacles)
    spec.obstacles.push_back({d.center, d.radius, d.radius * ac.sensing_ratio});
  spec.target = arm_joint_target(ac.arm, ac.task_target, ac.elbow_down);
  spec.alpha = ac.plan_alpha;
  spec.beta = ac.plan_beta;
  spec.theta = ac.plan_theta;
  spec.kappa = ac.plan_kappa;

  const Vec2 q0 = ac.q0 ? *ac.q0 : spec.target.position(ac.t0);
  res.plan = joint_motion_plan(spec, q0, ac.t0, ac.t1, ac.dt);
  const DensityField qfield = spec.make_field();

  Vec2 q = q0;
  Vec2 qd = res.plan.sample_qdot(ac.t0);
  res.min_ee_clearance = std::numeric_limits<double>::infinity();
  res.window_lo = std::numeric_limits<double>::infinity();
  res.window_hi = -std::numeric_limits<double>::infinity();
  const double dt = ac.dt;
  const long n_steps = std::lround(std::ceil((ac.t1 - ac.t0) / dt));
  res.steps.reserve(static_cast<size_t>(n_steps) + 1);

  for (long i = 0; i <= n_steps; ++i) {
    const double t = ac.t0 + dt * i;
    ArmTrackStep row;
    row.t = t;
    row.q = q;
    row.qdot = qd;
    row.q_ref = res.plan.sample_q(t);
    row.q_target = spec.target.position(t);
    row.torque = arm_inverse_dynamics(ac.arm, q, qd, row.q_ref, res.plan.sample_qdot(t),
                                      res.plan.sample_qddot(t), ac.Kp, ac.Kv);
    const auto fk = ac.arm.forward_kinematics(q);
    row.ee = fk.ee;
    row.ee_clearance = std::numeric_limits<double>::infinity();
    for (const auto& ob : ac.task_obstacles)
      row.ee_clearance = std::min(row.ee_clearance, (fk.ee - ob.center).norm() - ob.radius);
    row.track_err = (q - row.q_ref).lpNorm<Eigen::Infinity>();
    row.in_window = qfield.psi(t, row.q_ref) < 1.0 - 1e-9;
    if (row.in_window) {
      res.window_lo = std::min(res.window_lo, t);
      res.window_hi = std::max(res.window_hi, t);
    } else {
      res.max_track_err_outside = std::max(res.max_track_err_outside, row.track_err);
      res.max_target_err_outside = std::max(
          res.max_target_err_outside, wrap_angles(q - row.q_target).lpNorm<Eigen::Infinity>());
    }
    res.min_ee_clearance = std::min(res.min_ee_clearance, row.ee_clearance);
    res.max_track_err = std::max(res.max_track_err, row.track_err);
    res.steps.push_back(row);
    if (i == n_steps) break;

    const Vec2 torque = row.torque;
    auto deriv = [&](const Vec2& qq, const Vec2& qqd) { return ac.arm.dynamics(qq, qqd, torque); };
    const Vec2 k1x = qd, k1v = deriv(q, qd);
    const Vec2 k2x = qd + 0.5 * dt * k1v, k2v = deriv(q + 0.5 * dt * k1x, k2x);
    const Vec2 k3x = qd + 0.5 * dt * k2v, k3v = deriv(q + 0.5 * dt * k2x, k3x);
    const Vec2 k4x = qd + dt * k3v, k4v = deriv(q + dt * k3x, k4x);
    q += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    qd += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return res;
}

}  // namespace densnav

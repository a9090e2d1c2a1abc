#pragma once

#include <optional>
#include <vector>

#include "densnav/density.hpp"

namespace densnav {

/// Planar two-link arm with point masses at the link ends, gravity along -y.
/// Joint angles are absolute for link 1 and relative for link 2, measured from
/// the +x axis at q = 0.
struct TwoLinkArm {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = 9.81;

  Mat2 mass_matrix(const Vec2& q) const;
  /// Coriolis/centrifugal plus gravity torques H(q, qdot).
  Vec2 bias_torques(const Vec2& q, const Vec2& qdot) const;
  /// Forward dynamics: qddot = M(q)^{-1} (torque - H(q, qdot)).
  Vec2 dynamics(const Vec2& q, const Vec2& qdot, const Vec2& torque) const;

  struct FK {
    Vec2 elbow;
    Vec2 ee;
  };
  FK forward_kinematics(const Vec2& q) const;

  /// Closed-form inverse kinematics; empty if the point is out of reach.
  /// elbow_down selects the branch with q2 <= 0.
  std::optional<Vec2> inverse_kinematics(const Vec2& p, bool elbow_down) const;

  double kinetic_energy(const Vec2& q, const Vec2& qdot) const;
};

/// Circular obstacle in joint space.
struct JointObstacle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double sensing = 0.0;
};

/// Joint-space density specification for the arm motion plan.
struct JointDensitySpec {
  std::vector<JointObstacle> obstacles;
  Path2 target;  // q_T(t)
  double alpha = 0.2;
  double beta = 10.0;
  double theta = 0.05;
  double kappa = 1.0;

  DensityField make_field() const;
};

/// Sampled reference trajectory with derivatives, linearly interpolated.
struct MotionPlan {
  double t0 = 0.0;
  double dt = 0.01;
  std::vector<Vec2> q;
  std::vector<Vec2> qdot;
  std::vector<Vec2> qddot;

  double t_end() const { return t0 + dt * static_cast<double>(q.size() - 1); }
  Vec2 sample_q(double t) const;
  Vec2 sample_qdot(double t) const;
  Vec2 sample_qddot(double t) const;
};

/// Integrates the joint-space gradient flow qhat' = beta*grad(rho_q) + qTdot
/// and returns the sampled plan. Throws std::runtime_error (with the time of
/// violation) if the flow reaches an obstacle region, i.e. Psi at the theta
/// level with inward motion or strictly inside the exclusion radius.
MotionPlan joint_motion_plan(const JointDensitySpec& spec, const Vec2& q0, double t0, double t1,
                             double dt);

/// Maps task-space circular obstacles to joint space: a dense q-grid collision
/// test of both link segments, connected components on the torus, then
/// enclosing circles inflated by 10%. Components whose enclosing circle
/// exceeds radius_cap are split along their principal axis first (the
/// colliding set is typically a long curved band whose single enclosing
/// circle would block most of the torus). Throws if every grid cell collides.
std::vector<Disc> workspace_to_joint_obstacles(const TwoLinkArm& arm,
                                               const std::vector<Disc>& task_obstacles,
                                               int grid_n, double radius_cap = 0.8);

/// Fraction of grid-colliding configurations covered by the returned circles
/// (audit helper for the conservativeness check).
double joint_obstacle_coverage(const TwoLinkArm& arm, const std::vector<Disc>& task_obstacles,
                               const std::vector<Disc>& joint_circles, int grid_n);

}  // namespace densnav

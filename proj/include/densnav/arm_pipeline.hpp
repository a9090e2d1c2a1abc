#pragma once

#include "densnav/scenario_io.hpp"

namespace densnav {

/// One row of the arm tracking run.
struct ArmTrackStep {
  double t = 0.0;
  Vec2 q = Vec2::Zero();
  Vec2 qdot = Vec2::Zero();
  Vec2 q_ref = Vec2::Zero();   // plan sample
  Vec2 q_target = Vec2::Zero();  // raw joint-space target
  Vec2 torque = Vec2::Zero();
  Vec2 ee = Vec2::Zero();
  double ee_clearance = 0.0;
  double track_err = 0.0;  // |q - q_ref|_inf
  bool in_window = false;  // plan inside some sensing band
};

struct ArmRunResult {
  std::vector<Disc> joint_obstacles;
  double coverage = 1.0;  // grid-audit fraction covered by the circles
  MotionPlan plan;
  std::vector<ArmTrackStep> steps;
  double min_ee_clearance = 0.0;
  double max_track_err = 0.0;            // vs the plan, over the whole run
  double max_track_err_outside = 0.0;    // vs the plan, outside avoidance windows
  double max_target_err_outside = 0.0;   // plan vs raw target outside windows
  double window_lo = 0.0, window_hi = 0.0;
};

/// Full pipeline: map task obstacles to joint space, plan the gradient flow,
/// track the plan with the computed-torque controller.
ArmRunResult run_arm_pipeline(const ArmConfig& ac);

/// Joint-space target from the task path via inverse kinematics.
Path2 arm_joint_target(const TwoLinkArm& arm, const Path2& task, bool elbow_down);

}  // namespace densnav

#pragma once

#include <optional>
#include <string>

#include "densnav/robots.hpp"
#include "densnav/sim.hpp"
#include "densnav/toml.hpp"

namespace densnav {

/// Everything the arm pipeline needs: model, task obstacles, task target and
/// the planning/tracking parameters.
struct ArmConfig {
  TwoLinkArm arm;
  std::vector<Disc> task_obstacles;
  Path2 task_target = Path2::fixed(Vec2(1.0, 1.0));
  Vec2 Kp{1.0, 1.0};
  Vec2 Kv{10.0, 10.0};
  double plan_alpha = 0.2;
  double plan_beta = 10.0;
  double plan_theta = 0.05;
  double plan_kappa = 1.0;
  double sensing_ratio = 1.8;
  double obstacle_radius_cap = 0.8;  // split joint-space components above this
  int grid_n = 240;
  double t0 = 0.0;
  double t1 = 2.0 * kPi;
  double dt = 0.001;
  std::optional<Vec2> q0;  // default: inverse kinematics of the target at t0
  bool elbow_down = true;
};

struct LoadedConfig {
  toml::Value raw;
  bool has_scenario = false;
  Scenario scenario;
  std::optional<ArmConfig> arm;
};

/// Parses and validates a config file. Throws toml::ParseError for syntax
/// errors (line-anchored) and std::invalid_argument for semantic ones.
LoadedConfig load_config(const std::string& path);
LoadedConfig load_config_text(const std::string& text);

/// Parses a path table ("kind" plus family fields).
Path2 parse_path(const toml::Value& t);

}  // namespace densnav

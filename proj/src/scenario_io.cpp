#include "densnav/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace densnav {

namespace {

using toml::Value;

[[noreturn]] void cfg_fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

double need_double(const Value& t, const std::string& key, const std::string& ctx) {
  if (!t.contains(key)) cfg_fail(ctx + ": missing '" + key + "'");
  if (!t.at(key).is_number()) cfg_fail(ctx + ": '" + key + "' must be a number");
  return t.at(key).as_double();
}

double opt_double(const Value& t, const std::string& key, double def) {
  if (!t.contains(key)) return def;
  if (!t.at(key).is_number()) cfg_fail("'" + key + "' must be a number");
  return t.at(key).as_double();
}

bool opt_bool(const Value& t, const std::string& key, bool def) {
  if (!t.contains(key)) return def;
  if (!t.at(key).is_bool()) cfg_fail("'" + key + "' must be a boolean");
  return t.at(key).as_bool();
}

std::string opt_string(const Value& t, const std::string& key, const std::string& def) {
  if (!t.contains(key)) return def;
  if (!t.at(key).is_string()) cfg_fail("'" + key + "' must be a string");
  return t.at(key).as_string();
}

Vec2 need_vec2(const Value& t, const std::string& key, const std::string& ctx) {
  if (!t.contains(key)) cfg_fail(ctx + ": missing '" + key + "'");
  const Value& v = t.at(key);
  if (!v.is_array() || v.as_array().size() != 2 || !v.as_array()[0].is_number() ||
      !v.as_array()[1].is_number())
    cfg_fail(ctx + ": '" + key + "' must be [x, y]");
  return Vec2(v.as_array()[0].as_double(), v.as_array()[1].as_double());
}

Vec2 opt_vec2(const Value& t, const std::string& key, const Vec2& def) {
  if (!t.contains(key)) return def;
  return need_vec2(t, key, "");
}

}  // namespace

Path2 parse_path(const Value& t) {
  const std::string kind = opt_string(t, "kind", "static");
  if (kind == "static") {
    return Path2::fixed(need_vec2(t, "position", "path"));
  }
  if (kind == "line") {
    return Path2::line(need_vec2(t, "origin", "line path"), need_vec2(t, "velocity", "line path"));
  }
  if (kind == "sinusoid") {
    return Path2::sinusoid(need_vec2(t, "origin", "sinusoid path"),
                           opt_vec2(t, "velocity", Vec2::Zero()),
                           opt_vec2(t, "amp_sin", Vec2::Zero()),
                           opt_vec2(t, "amp_cos", Vec2::Zero()),
                           need_double(t, "omega", "sinusoid path"));
  }
  if (kind == "circle") {
    return Path2::circle(need_vec2(t, "center", "circle path"),
                         need_double(t, "radius", "circle path"),
                         need_double(t, "omega", "circle path"),
                         opt_double(t, "phase", 0.0));
  }
  cfg_fail("unknown path kind '" + kind + "'");
}

LoadedConfig load_config_text(const std::string& text) {
  LoadedConfig out;
  out.raw = toml::parse(text);
  const Value& root = out.raw;
  Scenario& sc = out.scenario;

  if (root.contains("workspace")) {
    const Value& w = root.at("workspace");
    sc.workspace.lo = need_vec2(w, "min", "workspace");
    sc.workspace.hi = need_vec2(w, "max", "workspace");
    if (!(sc.workspace.lo.x() < sc.workspace.hi.x() && sc.workspace.lo.y() < sc.workspace.hi.y()))
      cfg_fail("workspace: min must be component-wise below max");
  }

  if (root.contains("params")) {
    const Value& p = root.at("params");
    sc.alpha = opt_double(p, "alpha", sc.alpha);
    sc.beta = opt_double(p, "beta", sc.beta);
    sc.theta = opt_double(p, "theta", sc.theta);
    sc.kappa = opt_double(p, "kappa", sc.kappa);
    sc.K_heading = opt_double(p, "K_heading", sc.K_heading);
    sc.K_backstepping = opt_double(p, "K_backstepping", sc.K_backstepping);
    sc.bubble_margin = opt_double(p, "bubble_margin", sc.bubble_margin);
    sc.reciprocal_distance = opt_bool(p, "reciprocal_distance", false);
    if (p.contains("u_max")) sc.monitors.u_max = need_double(p, "u_max", "params");
  }

  if (root.contains("sfm")) {
    const Value& s = root.at("sfm");
    sc.sfm.A = opt_double(s, "A", sc.sfm.A);
    sc.sfm.B = opt_double(s, "B", sc.sfm.B);
    sc.sfm.kappa1 = opt_double(s, "kappa1", sc.sfm.kappa1);
    sc.sfm.kappa2 = opt_double(s, "kappa2", sc.sfm.kappa2);
    sc.sfm.d_H = opt_double(s, "d_H", sc.sfm.d_H);
    sc.sfm.desired_speed = opt_double(s, "desired_speed", sc.sfm.desired_speed);
    sc.sfm.relaxation_time = opt_double(s, "relaxation_time", sc.sfm.relaxation_time);
    sc.sfm.goal_slow_radius = opt_double(s, "goal_slow_radius", sc.sfm.goal_slow_radius);
  }

  if (root.contains("robot")) {
    const Value& r = root.at("robot");
    const std::string model = opt_string(r, "model", "single_integrator");
    if (model == "single_integrator")
      sc.model = RobotModel::kSingleIntegrator;
    else if (model == "double_integrator")
      sc.model = RobotModel::kDoubleIntegrator;
    else if (model == "unicycle")
      sc.model = RobotModel::kUnicycle;
    else
      cfg_fail("unknown robot model '" + model + "'");
    const std::string ctrl = opt_string(r, "controller", "gradient");
    if (ctrl == "gradient")
      sc.controller = ControllerKind::kGradient;
    else if (ctrl == "backstepping")
      sc.controller = ControllerKind::kBackstepping;
    else if (ctrl == "sfm")
      sc.controller = ControllerKind::kSFM;
    else
      cfg_fail("unknown controller '" + ctrl + "'");
    sc.start = opt_vec2(r, "start", sc.start);
    sc.start_heading = opt_double(r, "heading", 0.0);
  }

  if (root.contains("target")) sc.target = parse_path(root.at("target"));

  if (root.contains("obstacle")) {
    const Value& arr = root.at("obstacle");
    if (!arr.is_array()) cfg_fail("[[obstacle]] must be an array of tables");
    for (const Value& o : arr.as_array()) {
      ObstacleSpec obs;
      obs.shape.r = need_double(o, "radius", "obstacle");
      obs.shape.s = need_double(o, "sensing", "obstacle");
      obs.shape.theta = opt_double(o, "theta", sc.theta);
      obs.center = parse_path(o);
      sc.obstacles.push_back(std::move(obs));
    }
  }

  if (root.contains("agent")) {
    const Value& arr = root.at("agent");
    if (!arr.is_array()) cfg_fail("[[agent]] must be an array of tables");
    for (const Value& a : arr.as_array()) {
      AgentSetup setup;
      setup.start = need_vec2(a, "start", "agent");
      setup.spec.target = need_vec2(a, "target", "agent");
      setup.spec.radius = need_double(a, "radius", "agent");
      setup.spec.sensing = need_double(a, "sensing", "agent");
      setup.spec.alpha = opt_double(a, "alpha", sc.alpha);
      setup.spec.beta = opt_double(a, "beta", sc.beta);
      setup.spec.theta = opt_double(a, "theta", sc.theta);
      setup.spec.kappa = opt_double(a, "kappa", sc.kappa);
      setup.spec.reciprocal_distance = opt_bool(a, "reciprocal_distance", sc.reciprocal_distance);
      setup.heading = opt_double(a, "heading", 0.0);
      sc.agents.push_back(std::move(setup));
    }
  }

  if (root.contains("integration")) {
    const Value& iv = root.at("integration");
    sc.dt = opt_double(iv, "dt", sc.dt);
    sc.horizon = opt_double(iv, "horizon", sc.horizon);
    sc.log_dt = opt_double(iv, "log_dt", sc.log_dt);
  }

  if (root.contains("monitors")) {
    const Value& m = root.at("monitors");
    sc.monitors.convergence_radius = opt_double(m, "convergence_radius", 0.1);
    sc.monitors.convergence_hold = opt_double(m, "convergence_hold", 1.0);
  }

  if (root.contains("sampling")) {
    const Value& s = root.at("sampling");
    sc.initial_region.center = opt_vec2(s, "center", sc.start);
    sc.initial_region.radius = opt_double(s, "radius", 1.0);
  } else {
    sc.initial_region.center = sc.start;
  }
  sc.delta = opt_double(root, "delta", sc.delta);

  out.has_scenario = root.contains("robot") || root.contains("agent");
  if (out.has_scenario) sc.validate();

  if (root.contains("arm")) {
    ArmConfig ac;
    const Value& a = root.at("arm");
    ac.arm.m1 = opt_double(a, "m1", 1.0);
    ac.arm.m2 = opt_double(a, "m2", 1.0);
    ac.arm.l1 = opt_double(a, "l1", 1.0);
    ac.arm.l2 = opt_double(a, "l2", 1.0);
    ac.arm.g = opt_double(a, "g", 9.81);
    ac.Kp = opt_vec2(a, "Kp", ac.Kp);
    ac.Kv = opt_vec2(a, "Kv", ac.Kv);
    ac.plan_alpha = opt_double(a, "plan_alpha", ac.plan_alpha);
    ac.plan_beta = opt_double(a, "plan_beta", ac.plan_beta);
    ac.plan_theta = opt_double(a, "plan_theta", ac.plan_theta);
    ac.plan_kappa = opt_double(a, "plan_kappa", ac.plan_kappa);
    ac.sensing_ratio = opt_double(a, "sensing_ratio", ac.sensing_ratio);
    ac.obstacle_radius_cap = opt_double(a, "obstacle_radius_cap", ac.obstacle_radius_cap);
    ac.grid_n = static_cast<int>(opt_double(a, "grid_n", ac.grid_n));
    ac.t0 = opt_double(a, "t0", ac.t0);
    ac.t1 = opt_double(a, "t1", ac.t1);
    ac.dt = opt_double(a, "dt", ac.dt);
    ac.elbow_down = opt_bool(a, "elbow_down", true);
    if (a.contains("q0")) ac.q0 = need_vec2(a, "q0", "arm");
    if (!(ac.plan_theta > 0.0 && ac.plan_theta < 1.0))
      cfg_fail("arm: plan_theta must be in (0,1)");
    if (root.contains("arm_target")) ac.task_target = parse_path(root.at("arm_target"));
    if (root.contains("task_obstacle")) {
      const Value& arr = root.at("task_obstacle");
      if (!arr.is_array()) cfg_fail("[[task_obstacle]] must be an array of tables");
      for (const Value& o : arr.as_array()) {
        Disc d;
        d.center = need_vec2(o, "center", "task_obstacle");
        d.radius = need_double(o, "radius", "task_obstacle");
        ac.task_obstacles.push_back(d);
      }
    }
    out.arm = std::move(ac);
  }

  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

}  // namespace densnav

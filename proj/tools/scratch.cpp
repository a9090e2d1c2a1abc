// Scratch driver for scenario tuning during development.
#include <cstdio>
#include <random>

#include "densnav/certify.hpp"
#include "densnav/control.hpp"
#include "densnav/density.hpp"
#include "densnav/scenario_io.hpp"
#include "densnav/sim.hpp"

using namespace densnav;

namespace {

Scenario scenario_41() {
  Scenario sc;
  sc.workspace = {Vec2(-2.0, -8.0), Vec2(12.0, 8.0)};
  sc.target = Path2::fixed(Vec2(10.0, 0.0));
  sc.start = Vec2(0.0, 0.0);
  sc.alpha = 0.2;
  sc.beta = 10.0;
  sc.theta = 0.05;
  sc.kappa = 1.0;
  sc.monitors.u_max = 2.0;
  auto add = [&](Path2 p) {
    ObstacleSpec o;
    o.shape = {0.05, 0.75, 1.5};
    o.center = std::move(p);
    sc.obstacles.push_back(std::move(o));
  };
  add(Path2::line(Vec2(2.0, 0.0), Vec2(0.0, 0.25)));
  add(Path2::line(Vec2(4.0, 7.0), Vec2(0.0, -0.2)));
  add(Path2::sinusoid(Vec2(6.0, -6.0), Vec2(0.0, 0.15), Vec2(0.1, 0.0), Vec2::Zero(), 1.0));
  add(Path2::line(Vec2(8.0, 5.0), Vec2(0.0, -0.12)));
  sc.horizon = 60.0;
  sc.initial_region = {Vec2(0.0, 0.0), 1.0};
  return sc;
}

void fd_check() {
  const Scenario sc = scenario_41();
  const DensityField f = sc.make_field();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-2.0, 12.0), uy(-8.0, 8.0), ut(0.0, 60.0);
  double worst = 0.0, worst_dt = 0.0, worst_lap = 0.0;
  const double h = 1e-6;
  for (int i = 0; i < 2000; ++i) {
    const Vec2 x(ux(rng), uy(rng));
    const double t = ut(rng);
    FieldEval e;
    f.eval(t, x, e);
    Vec2 g_fd;
    g_fd.x() = (f.rho(t, x + Vec2(h, 0)) - f.rho(t, x - Vec2(h, 0))) / (2 * h);
    g_fd.y() = (f.rho(t, x + Vec2(0, h)) - f.rho(t, x - Vec2(0, h))) / (2 * h);
    const double rel = (g_fd - e.grad).norm() / std::max(e.grad.norm(), 1e-8);
    worst = std::max(worst, rel);
    const double dt_fd = (f.rho(t + h, x) - f.rho(t - h, x)) / (2 * h);
    worst_dt = std::max(worst_dt, std::abs(dt_fd - e.dt) / std::max(std::abs(e.dt), 1e-8));
    const double hh = 1e-4;
    const double lap_fd = (f.rho(t, x + Vec2(hh, 0)) + f.rho(t, x - Vec2(hh, 0)) +
                           f.rho(t, x + Vec2(0, hh)) + f.rho(t, x - Vec2(0, hh)) -
                           4 * f.rho(t, x)) /
                          (hh * hh);
    worst_lap = std::max(worst_lap, std::abs(lap_fd - e.lap) / std::max(std::abs(e.lap), 1e-4));
  }
  std::printf("fd_check: grad rel %.3e   dt rel %.3e   lap rel %.3e\n", worst, worst_dt, worst_lap);

  // grad_dt FD check
  double worst_gdt = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Vec2 x(ux(rng), uy(rng));
    const double t = ut(rng);
    const Vec2 gdt = f.rho_grad_dt(t, x);
    const Vec2 gdt_fd = (f.rho_grad(t + h, x) - f.rho_grad(t - h, x)) / (2 * h);
    worst_gdt = std::max(worst_gdt, (gdt_fd - gdt).norm() / std::max(gdt.norm(), 1e-8));
  }
  std::printf("fd_check: grad_dt rel %.3e\n", worst_gdt);
}

void run_41() {
  const Scenario sc = scenario_41();
  const TrajectoryLog log = simulate(sc);
  std::printf("41: converged=%d t_conv=%.2f min_clear=%.4f max_u=%.3f min_rho=%.4g min_psi=%.4g end=%.1f\n",
              log.summary.converged, log.summary.time_to_converge, log.summary.min_clearance,
              log.summary.max_u_inf, log.summary.min_rho, log.summary.min_psi,
              log.summary.end_time);
}

void lemma1_41() {
  const Scenario sc = scenario_41();
  const DensityField f = sc.make_field();
  const Lemma1Result r = check_lemma1(f, sc.workspace, 200, 200, 50, 0.0, 60.0);
  std::printf("lemma1: margin=%.4f at (%.2f,%.2f) t=%.2f tail=%.3f finite=%d excl=%ld\n", r.margin,
              r.argmin.x(), r.argmin.y(), r.argmin_t, r.tail_exponent, r.integral_finite,
              r.excluded_points);
  // Term breakdown at the argmin.
  FieldEval e;
  f.eval(r.argmin_t, r.argmin, e);
  std::printf("  at argmin: rho=%.4g |grad|^2=%.4g lap=%.4g dt=%.4g psi=%.4g V1=%.4g\n", e.rho,
              e.grad.squaredNorm(), e.lap, e.dt, e.psi, e.V1);
}

void constants_41() {
  const Scenario sc = scenario_41();
  const DensityField f = sc.make_field();
  const AssumptionConstants c = estimate_constants(f, sc.workspace, 200, 0.0, 60.0, 20);
  const AppendixCoeffs p = appendix_coeffs(c);
  std::printf("constants: c_psi_t=%.4f cbar_psi_x=%.4f cbar_psi_xx=%.4f cbar_x=%.3f cunder_x=%.3f\n",
              c.c_psi_t, c.cbar_psi_x, c.cbar_psi_xx, c.cbar_x, c.cunder_x);
  std::printf("  p1=%.6g p2=%.6g p3=%.6g alpha_min=%.6g\n", p.p1, p.p2, p.p3, alpha_range(c));
}

void run_single(const char* path) {
  const LoadedConfig cfg = load_config(path);
  const TrajectoryLog log = simulate(cfg.scenario);
  std::printf("%s: converged=%d t_conv=%.2f min_clear=%.4f max_u=%.3f min_rho=%.4g min_psi=%.4g end=%.1f\n",
              path, log.summary.converged, log.summary.time_to_converge,
              log.summary.min_clearance, log.summary.max_u_inf, log.summary.min_rho,
              log.summary.min_psi, log.summary.end_time);
}

void run_agents(const char* path, ControllerKind force = ControllerKind::kGradient,
                bool use_force = false) {
  LoadedConfig cfg = load_config(path);
  if (use_force) cfg.scenario.controller = force;
  const auto logs = simulate_agents(cfg.scenario);
  double min_clear = 1e18, worst_final = 0.0, t_last = 0.0, tv_sum = 0.0, tv_max = 0.0;
  int conv = 0;
  for (size_t j = 0; j < logs.size(); ++j) {
    const auto& s = logs[j].summary;
    min_clear = std::min(min_clear, s.min_clearance);
    if (s.converged) ++conv;
    const auto& last = logs[j].steps.back();
    const double dist = (last.pos - cfg.scenario.agents[j].spec.target).norm();
    worst_final = std::max(worst_final, dist);
    t_last = std::max(t_last, s.end_time);
    tv_sum += s.heading_total_variation;
    tv_max = std::max(tv_max, s.heading_total_variation);
    std::printf("  agent %zu: conv=%d t=%.2f min_clear=%.3f final_dist=%.3f hdgTV=%.2f\n", j,
                s.converged, s.time_to_converge, s.min_clearance, dist,
                s.heading_total_variation);
  }
  std::printf("%s: conv=%d/%zu min_clear=%.4f worst_final=%.3f t_end=%.2f hdgTV sum=%.2f max=%.2f\n",
              path, conv, logs.size(), min_clear, worst_final, t_last, tv_sum, tv_max);
}

void run_arm(const char* path) {
  const LoadedConfig cfg = load_config(path);
  const ArmConfig& ac = *cfg.arm;
  const auto joint_obs = workspace_to_joint_obstacles(ac.arm, ac.task_obstacles, ac.grid_n, ac.obstacle_radius_cap);
  std::printf("arm: %zu joint obstacles:", joint_obs.size());
  for (const auto& d : joint_obs)
    std::printf(" [(%.3f,%.3f) r=%.3f]", d.center.x(), d.center.y(), d.radius);
  std::printf("\n");
  const double cov = joint_obstacle_coverage(ac.arm, ac.task_obstacles, joint_obs, ac.grid_n);
  std::printf("arm: coverage=%.4f\n", cov);

  JointDensitySpec spec;
  for (const auto& d : joint_obs)
    spec.obstacles.push_back({d.center, d.radius, d.radius * ac.sensing_ratio});
  const TwoLinkArm& arm = ac.arm;
  const Path2 task = ac.task_target;
  const bool elbow_down = ac.elbow_down;
  spec.target = Path2::custom([arm, task, elbow_down](double t) {
    auto q = arm.inverse_kinematics(task.position(t), elbow_down);
    return q ? *q : Vec2::Zero();
  });
  spec.alpha = ac.plan_alpha;
  spec.beta = ac.plan_beta;
  spec.theta = ac.plan_theta;
  spec.kappa = ac.plan_kappa;

  const Vec2 q0 = ac.q0 ? *ac.q0 : spec.target.position(ac.t0);
  const MotionPlan plan = joint_motion_plan(spec, q0, ac.t0, ac.t1, ac.dt);

  // Track the plan with the inverse-dynamics controller.
  Vec2 q = q0, qd = plan.sample_qdot(ac.t0);
  double min_ee_clear = 1e18, max_track_err = 0.0, max_target_err_outside = 0.0;
  double window_lo = 1e18, window_hi = -1e18;
  const DensityField qfield = spec.make_field();
  for (double t = ac.t0; t < ac.t1; t += ac.dt) {
    const Vec2 tq = arm_inverse_dynamics(arm, q, qd, plan.sample_q(t), plan.sample_qdot(t),
                                         plan.sample_qddot(t), ac.Kp, ac.Kv);
    auto deriv = [&](const Vec2& qq, const Vec2& qqd) { return arm.dynamics(qq, qqd, tq); };
    const Vec2 k1x = qd, k1v = deriv(q, qd);
    const Vec2 k2x = qd + 0.5 * ac.dt * k1v, k2v = deriv(q + 0.5 * ac.dt * k1x, k2x);
    const Vec2 k3x = qd + 0.5 * ac.dt * k2v, k3v = deriv(q + 0.5 * ac.dt * k2x, k3x);
    const Vec2 k4x = qd + ac.dt * k3v, k4v = deriv(q + ac.dt * k3x, k4x);
    q += ac.dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    qd += ac.dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    const auto fk = arm.forward_kinematics(q);
    for (const auto& ob : ac.task_obstacles)
      min_ee_clear = std::min(min_ee_clear, (fk.ee - ob.center).norm() - ob.radius);
    const double terr = (q - plan.sample_q(t + ac.dt)).lpNorm<Eigen::Infinity>();
    max_track_err = std::max(max_track_err, terr);
    const bool in_window = qfield.psi(t, plan.sample_q(t)) < 1.0 - 1e-9;
    if (in_window) {
      window_lo = std::min(window_lo, t);
      window_hi = std::max(window_hi, t);
    } else {
      const Vec2 qT = spec.target.position(t + ac.dt);
      max_target_err_outside =
          std::max(max_target_err_outside, wrap_angles(q - qT).lpNorm<Eigen::Infinity>());
    }
  }
  std::printf("arm: min_ee_clear=%.4f max_track_err=%.3e window=[%.2f, %.2f] max_qT_err_outside=%.4f\n",
              min_ee_clear, max_track_err, window_lo, window_hi, max_target_err_outside);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string what = argc > 1 ? argv[1] : "all";
  if (what == "fd" || what == "all") fd_check();
  if (what == "41" || what == "all") run_41();
  if (what == "lemma1" || what == "all") lemma1_41();
  if (what == "constants" || what == "all") constants_41();
  if (what == "ex1" || what == "all") {
    run_single("configs/static_example1.toml");
    run_single("configs/static_example1_s25.toml");
  }
  if (what == "inter" || what == "all") {
    run_agents("configs/intersection6.toml");
    run_agents("configs/intersection6_large56.toml");
  }
  if (what == "swap" || what == "all") {
    run_agents("configs/swap4.toml", ControllerKind::kBackstepping, true);
    run_agents("configs/swap4.toml", ControllerKind::kSFM, true);
  }
  if (what == "arm" || what == "all") run_arm("configs/arm_tracking.toml");
  if (what == "cfg41" || what == "all") run_single("configs/dynamic_obstacles.toml");
  return 0;
}

#include "densnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace densnav {

FieldMode Scenario::field_mode() const {
  const bool target_moves = !target.is_static();
  bool obstacles_move = false;
  for (const auto& o : obstacles)
    if (!o.center.is_static()) obstacles_move = true;
  if (target_moves && obstacles_move)
    throw std::invalid_argument("scenario: moving obstacles with a moving target");
  if (target_moves) return FieldMode::kDynamicTarget;
  if (obstacles_move) return FieldMode::kDynamicObstacle;
  return FieldMode::kStatic;
}

DensityField Scenario::make_field() const {
  DistanceFn dist;
  dist.kind = reciprocal_distance ? DistanceKind::kQuadraticReciprocal : DistanceKind::kQuadratic;
  dist.target = target;
  dist.kappa = kappa;
  std::vector<ObstacleSpec> obs = obstacles;
  for (auto& o : obs) o.shape.theta = theta;
  DensityField f(field_mode(), std::move(obs), std::move(dist), alpha, beta);
  f.set_delta(delta);
  return f;
}

void Scenario::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("scenario: horizon must be positive");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("scenario: theta must be in (0,1), got " + std::to_string(theta));
  if (!(alpha > 0.0)) throw std::invalid_argument("scenario: alpha must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("scenario: beta must be nonnegative");
  if (!(kappa > 0.0)) throw std::invalid_argument("scenario: kappa must be positive");
  if (monitors.u_max && !(*monitors.u_max > 0.0))
    throw std::invalid_argument("scenario: u_max must be positive");
  for (const auto& o : obstacles) o.shape.validate();
  if (!multi_agent()) {
    for (size_t k = 0; k < obstacles.size(); ++k) {
      const auto& o = obstacles[k];
      if ((start - o.center.position(0.0)).norm() <= o.shape.r)
        throw std::invalid_argument("scenario: start is inside unsafe set " + std::to_string(k));
    }
  } else {
    for (const auto& a : agents) {
      if (!(a.spec.theta > 0.0 && a.spec.theta < 1.0))
        throw std::invalid_argument("scenario: agent theta must be in (0,1)");
      if (!(a.spec.sensing > a.spec.radius))
        throw std::invalid_argument("scenario: agent sensing radius must exceed its radius");
      if (!(a.spec.alpha > 0.0 && a.spec.beta > 0.0 && a.spec.kappa > 0.0))
        throw std::invalid_argument("scenario: agent alpha/beta/kappa must be positive");
    }
    for (size_t i = 0; i < agents.size(); ++i)
      for (size_t j = i + 1; j < agents.size(); ++j) {
        const double d = (agents[i].start - agents[j].start).norm();
        if (d <= agents[i].spec.radius + agents[j].spec.radius)
          throw std::invalid_argument("scenario: agents " + std::to_string(i) + " and " +
                                      std::to_string(j) + " start in collision");
      }
  }
}

namespace {

// Convergence/safety bookkeeping shared by the rollout loops.
struct Monitor {
  const Scenario* sc = nullptr;
  double enter_time = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  double t_conv = std::numeric_limits<double>::quiet_NaN();

  void update(double t, const Vec2& pos) {
    if (converged) return;
    const double dist = (pos - sc->target.position(t)).norm();
    if (dist <= sc->monitors.convergence_radius) {
      if (std::isnan(enter_time)) enter_time = t;
      if (t - enter_time >= sc->monitors.convergence_hold) {
        converged = true;
        t_conv = enter_time;
      }
    } else {
      enter_time = std::numeric_limits<double>::quiet_NaN();
    }
  }
};

struct AgentMonitor {
  Vec2 target;
  double radius, hold;
  double enter_time = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  double t_conv = std::numeric_limits<double>::quiet_NaN();

  void update(double t, const Vec2& pos) {
    if (converged) return;
    if ((pos - target).norm() <= radius) {
      if (std::isnan(enter_time)) enter_time = t;
      if (t - enter_time >= hold) {
        converged = true;
        t_conv = enter_time;
      }
    } else {
      enter_time = std::numeric_limits<double>::quiet_NaN();
    }
  }
};

struct StepRecorder {
  TrajectoryLog* log = nullptr;
  const Scenario* sc = nullptr;
  long stride = 10;
  Vec2 prev_u = Vec2::Zero();
  bool have_prev_u = false;
  double prev_heading = 0.0;
  bool have_prev_heading = false;

  void record(long step, double t, const Vec2& pos, const Vec2& vel, double heading,
              const Vec2& u, bool saturated, double rho, double psi,
              const std::vector<double>& clearance) {
    auto& s = log->summary;
    double cmin = std::numeric_limits<double>::infinity();
    for (double c : clearance) cmin = std::min(cmin, c);
    s.min_clearance = std::min(s.min_clearance, cmin);
    s.min_rho = std::min(s.min_rho, rho);
    s.min_psi = std::min(s.min_psi, psi);
    s.max_u_inf = std::max(s.max_u_inf, u.lpNorm<Eigen::Infinity>());
    if (have_prev_u) s.control_total_variation += (u - prev_u).norm();
    prev_u = u;
    have_prev_u = true;
    // Heading TV from the body velocity direction (skip near-rest samples).
    double hdg = heading;
    bool hdg_valid = true;
    if (sc->model != RobotModel::kUnicycle) {
      if (vel.norm() < 1e-3)
        hdg_valid = false;
      else
        hdg = std::atan2(vel.y(), vel.x());
    }
    if (hdg_valid) {
      if (have_prev_heading) s.heading_total_variation += std::abs(wrap_angle(hdg - prev_heading));
      prev_heading = hdg;
      have_prev_heading = true;
    }
    const bool inside = sc->workspace.contains(pos);
    if (!inside) s.exited_workspace = true;
    s.end_time = t;
    if (step % stride == 0) {
      LogStep row;
      row.t = t;
      row.pos = pos;
      row.vel = vel;
      row.heading = heading;
      row.u = u;
      row.rho = rho;
      row.psi = psi;
      row.clearance = clearance;
      row.saturated = saturated;
      row.in_workspace = inside;
      log->steps.push_back(std::move(row));
    }
  }
};

std::vector<double> obstacle_clearances(const Scenario& sc, double t, const Vec2& pos) {
  std::vector<double> out;
  out.reserve(sc.obstacles.size());
  for (const auto& o : sc.obstacles) out.push_back((pos - o.center.position(t)).norm() - o.shape.r);
  return out;
}

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

}  // namespace

TrajectoryLog simulate(const Scenario& sc) {
  sc.validate();
  const DensityField field = sc.make_field();
  TrajectoryLog log;
  log.log_dt = sc.log_dt;
  StepRecorder rec{&log, &sc, std::max(1L, std::lround(sc.log_dt / sc.dt))};
  Monitor mon{&sc};

  const long n_steps = std::lround(std::ceil(sc.horizon / sc.dt));
  const double dt = sc.dt;

  auto grad_u = [&](double t, const Vec2& x) {
    ControlCommand cmd = gradient_control(field, t, x);
    if (sc.monitors.u_max) cmd = saturate(cmd, *sc.monitors.u_max);
    return cmd;
  };

  if (sc.model == RobotModel::kSingleIntegrator) {
    Vec2 x = sc.start;
    const bool zoh = sc.monitors.u_max.has_value();  // saturated law: discrete, held per step
    for (long i = 0; i <= n_steps; ++i) {
      const double t = i * dt;
      const ControlCommand cmd = grad_u(t, x);
      FieldEval fe;
      field.eval(t, x, fe);
      rec.record(i, t, x, cmd.u, 0.0, cmd.u, cmd.saturated, fe.rho, fe.psi,
                 obstacle_clearances(sc, t, x));
      mon.update(t, x);
      if (mon.converged || i == n_steps) break;
      if (!finite(x)) {
        log.summary.aborted_nonfinite = true;
        log.summary.abort_step = i;
        break;
      }
      if (zoh) {
        x += cmd.u * dt;
      } else {
        const Vec2 k1 = grad_u(t, x).u;
        const Vec2 k2 = grad_u(t + 0.5 * dt, x + 0.5 * dt * k1).u;
        const Vec2 k3 = grad_u(t + 0.5 * dt, x + 0.5 * dt * k2).u;
        const Vec2 k4 = grad_u(t + dt, x + dt * k3).u;
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    log.summary.converged = mon.converged;
    log.summary.time_to_converge = mon.t_conv;
    return log;
  }

  if (sc.model == RobotModel::kDoubleIntegrator) {
    Vec2 x = sc.start;
    Vec2 v = Vec2::Zero();
    auto accel = [&](double t, const Vec2& xx, const Vec2& vv) {
      return backstepping_control(field, t, xx, vv, sc.K_backstepping).u;
    };
    for (long i = 0; i <= n_steps; ++i) {
      const double t = i * dt;
      const Vec2 u = accel(t, x, v);
      FieldEval fe;
      field.eval(t, x, fe);
      rec.record(i, t, x, v, 0.0, u, false, fe.rho, fe.psi, obstacle_clearances(sc, t, x));
      mon.update(t, x);
      if (mon.converged || i == n_steps) break;
      if (!finite(x) || !finite(v)) {
        log.summary.aborted_nonfinite = true;
        log.summary.abort_step = i;
        break;
      }
      const Vec2 k1x = v, k1v = u;
      const Vec2 k2x = v + 0.5 * dt * k1v, k2v = accel(t + 0.5 * dt, x + 0.5 * dt * k1x, k2x);
      const Vec2 k3x = v + 0.5 * dt * k2v, k3v = accel(t + 0.5 * dt, x + 0.5 * dt * k2x, k3x);
      const Vec2 k4x = v + dt * k3v, k4v = accel(t + dt, x + dt * k3x, k4x);
      x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    log.summary.converged = mon.converged;
    log.summary.time_to_converge = mon.t_conv;
    return log;
  }

  // Unicycle: planar control mapped through (v, omega), held across the step.
  UnicycleState us{sc.start.x(), sc.start.y(), sc.start_heading};
  UnicycleTracker tracker(sc.K_heading);
  for (long i = 0; i <= n_steps; ++i) {
    const double t = i * dt;
    ControlCommand cmd = grad_u(t, us.pos());
    const UnicycleCommand uc = tracker.control(us, cmd.u, t);
    FieldEval fe;
    field.eval(t, us.pos(), fe);
    const Vec2 body_vel(uc.v * std::cos(us.heading), uc.v * std::sin(us.heading));
    rec.record(i, t, us.pos(), body_vel, us.heading, cmd.u, cmd.saturated, fe.rho, fe.psi,
               obstacle_clearances(sc, t, us.pos()));
    mon.update(t, us.pos());
    if (mon.converged || i == n_steps) break;
    if (!finite(us.pos()) || !std::isfinite(us.heading)) {
      log.summary.aborted_nonfinite = true;
      log.summary.abort_step = i;
      break;
    }
    // RK4 on the kinematics with constant (v, omega).
    auto kin = [&](const UnicycleState& s) {
      return Eigen::Vector3d(uc.v * std::cos(s.heading), uc.v * std::sin(s.heading), uc.omega);
    };
    auto step_state = [&](const UnicycleState& s, double h, const Eigen::Vector3d& k) {
      return UnicycleState{s.x + h * k(0), s.y + h * k(1), wrap_angle(s.heading + h * k(2))};
    };
    const Eigen::Vector3d kk1 = kin(us);
    const Eigen::Vector3d kk2 = kin(step_state(us, 0.5 * dt, kk1));
    const Eigen::Vector3d kk3 = kin(step_state(us, 0.5 * dt, kk2));
    const Eigen::Vector3d kk4 = kin(step_state(us, dt, kk3));
    us.x += dt / 6.0 * (kk1(0) + 2.0 * kk2(0) + 2.0 * kk3(0) + kk4(0));
    us.y += dt / 6.0 * (kk1(1) + 2.0 * kk2(1) + 2.0 * kk3(1) + kk4(1));
    us.heading = wrap_angle(us.heading + dt / 6.0 * (kk1(2) + 2.0 * kk2(2) + 2.0 * kk3(2) + kk4(2)));
  }
  log.summary.converged = mon.converged;
  log.summary.time_to_converge = mon.t_conv;
  return log;
}

std::vector<Vec2> multiagent_step_controls(const Scenario& sc,
                                           const std::vector<AgentState>& states, double t) {
  std::vector<AgentSpec> specs;
  specs.reserve(sc.agents.size());
  for (const auto& a : sc.agents) specs.push_back(a.spec);
  std::vector<Vec2> out(states.size(), Vec2::Zero());
  for (size_t j = 0; j < states.size(); ++j) {
    const DensityField f = multiagent_field(specs, states, static_cast<int>(j), t, sc.bubble_margin);
    out[j] = gradient_control(f, t, states[j].pos).u;
  }
  return out;
}

std::vector<TrajectoryLog> simulate_agents(const Scenario& sc) {
  sc.validate();
  const size_t n = sc.agents.size();
  std::vector<AgentSpec> specs;
  specs.reserve(n);
  for (const auto& a : sc.agents) specs.push_back(a.spec);

  std::vector<TrajectoryLog> logs(n);
  std::vector<StepRecorder> recs(n);
  std::vector<AgentMonitor> mons(n);
  const long stride = std::max(1L, std::lround(sc.log_dt / sc.dt));
  for (size_t j = 0; j < n; ++j) {
    logs[j].log_dt = sc.log_dt;
    recs[j] = StepRecorder{&logs[j], &sc, stride};
    mons[j] = AgentMonitor{sc.agents[j].spec.target, sc.monitors.convergence_radius,
                           sc.monitors.convergence_hold};
  }

  std::vector<AgentState> st(n);
  std::vector<UnicycleState> ust(n);
  std::vector<UnicycleTracker> trackers;
  trackers.reserve(n);
  for (size_t j = 0; j < n; ++j) {
    st[j].pos = sc.agents[j].start;
    st[j].vel = Vec2::Zero();
    ust[j] = UnicycleState{st[j].pos.x(), st[j].pos.y(), sc.agents[j].heading};
    trackers.emplace_back(sc.K_heading);
  }

  const double dt = sc.dt;
  const long n_steps = std::lround(std::ceil(sc.horizon / sc.dt));
  bool aborted = false;

  for (long i = 0; i <= n_steps && !aborted; ++i) {
    const double t = i * dt;
    // Snapshot: all controls and fields are computed from the same state set.
    const std::vector<AgentState> snap = st;
    std::vector<DensityField> fields;
    fields.reserve(n);
    for (size_t j = 0; j < n; ++j)
      fields.push_back(multiagent_field(specs, snap, static_cast<int>(j), t, sc.bubble_margin));

    bool all_converged = true;
    for (size_t j = 0; j < n; ++j) {
      // Per-agent clearances against every other agent.
      std::vector<double> clearance;
      clearance.reserve(n - 1);
      for (size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        clearance.push_back((snap[j].pos - snap[k].pos).norm() -
                            (specs[j].radius + specs[k].radius));
      }
      FieldEval fe;
      fields[j].eval(t, snap[j].pos, fe);

      Vec2 u = Vec2::Zero();
      bool saturated = false;
      if (sc.controller == ControllerKind::kSFM) {
        std::vector<SFMNeighbor> nbs;
        for (size_t k = 0; k < n; ++k)
          if (k != j) nbs.push_back({snap[k].pos, snap[k].vel, specs[k].radius});
        u = sfm_control(snap[j].pos, snap[j].vel, specs[j].radius, nbs, sc.sfm,
                        specs[j].target).u;
      } else if (sc.controller == ControllerKind::kBackstepping) {
        u = backstepping_control(fields[j], t, snap[j].pos, snap[j].vel, sc.K_backstepping).u;
      } else {
        ControlCommand cmd = gradient_control(fields[j], t, snap[j].pos);
        if (sc.monitors.u_max) cmd = saturate(cmd, *sc.monitors.u_max);
        u = cmd.u;
        saturated = cmd.saturated;
      }

      double heading = 0.0;
      if (sc.model == RobotModel::kUnicycle) heading = ust[j].heading;
      recs[j].record(i, t, snap[j].pos, snap[j].vel, heading, u, saturated, fe.rho, fe.psi,
                     clearance);
      mons[j].update(t, snap[j].pos);
      all_converged = all_converged && mons[j].converged;

      if (!finite(snap[j].pos) || !finite(snap[j].vel)) {
        logs[j].summary.aborted_nonfinite = true;
        logs[j].summary.abort_step = i;
        aborted = true;
        continue;
      }
      if (i == n_steps) continue;

      // Advance agent j with its frozen field.
      if (sc.model == RobotModel::kUnicycle) {
        const UnicycleCommand uc = trackers[j].control(ust[j], u, t);
        auto kin = [&](const UnicycleState& s) {
          return Eigen::Vector3d(uc.v * std::cos(s.heading), uc.v * std::sin(s.heading), uc.omega);
        };
        auto adv = [&](const UnicycleState& s, double h, const Eigen::Vector3d& k) {
          return UnicycleState{s.x + h * k(0), s.y + h * k(1), wrap_angle(s.heading + h * k(2))};
        };
        const Eigen::Vector3d k1 = kin(ust[j]);
        const Eigen::Vector3d k2 = kin(adv(ust[j], 0.5 * dt, k1));
        const Eigen::Vector3d k3 = kin(adv(ust[j], 0.5 * dt, k2));
        const Eigen::Vector3d k4 = kin(adv(ust[j], dt, k3));
        ust[j].x += dt / 6.0 * (k1(0) + 2.0 * k2(0) + 2.0 * k3(0) + k4(0));
        ust[j].y += dt / 6.0 * (k1(1) + 2.0 * k2(1) + 2.0 * k3(1) + k4(1));
        ust[j].heading =
            wrap_angle(ust[j].heading + dt / 6.0 * (k1(2) + 2.0 * k2(2) + 2.0 * k3(2) + k4(2)));
        st[j].pos = ust[j].pos();
        st[j].vel = Vec2(uc.v * std::cos(ust[j].heading), uc.v * std::sin(ust[j].heading));
      } else if (sc.model == RobotModel::kDoubleIntegrator) {
        Vec2 x = snap[j].pos, v = snap[j].vel;
        auto accel = [&](double tau, const Vec2& xx, const Vec2& vv) {
          if (sc.controller == ControllerKind::kSFM) {
            std::vector<SFMNeighbor> nbs;
            for (size_t k = 0; k < n; ++k)
              if (k != j)
                nbs.push_back({snap[k].pos + snap[k].vel * (tau - t), snap[k].vel,
                               specs[k].radius});
            return sfm_control(xx, vv, specs[j].radius, nbs, sc.sfm, specs[j].target).u;
          }
          return backstepping_control(fields[j], tau, xx, vv, sc.K_backstepping).u;
        };
        const Vec2 k1x = v, k1v = accel(t, x, v);
        const Vec2 k2x = v + 0.5 * dt * k1v,
                   k2v = accel(t + 0.5 * dt, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
        const Vec2 k3x = v + 0.5 * dt * k2v,
                   k3v = accel(t + 0.5 * dt, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
        const Vec2 k4x = v + dt * k3v, k4v = accel(t + dt, x + dt * k3x, v + dt * k3v);
        st[j].pos = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        st[j].vel = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      } else {
        // Single integrator, gradient law evaluated on the frozen field.
        Vec2 x = snap[j].pos;
        auto vel = [&](double tau, const Vec2& xx) {
          ControlCommand cmd = gradient_control(fields[j], tau, xx);
          if (sc.monitors.u_max) cmd = saturate(cmd, *sc.monitors.u_max);
          return cmd.u;
        };
        const Vec2 k1 = vel(t, x);
        const Vec2 k2 = vel(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Vec2 k3 = vel(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Vec2 k4 = vel(t + dt, x + dt * k3);
        st[j].pos = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        st[j].vel = (st[j].pos - x) / dt;
      }
    }
    if (all_converged) break;
  }

  for (size_t j = 0; j < n; ++j) {
    logs[j].summary.converged = mons[j].converged;
    logs[j].summary.time_to_converge = mons[j].t_conv;
  }
  return logs;
}

RegionFn unsafe_region(const Scenario& sc) {
  return [&sc](double t, const Vec2& x) {
    for (const auto& o : sc.obstacles)
      if ((x - o.center.position(t)).norm() <= o.shape.r) return true;
    return false;
  };
}

std::vector<Vec2> sample_initial_conditions(const Scenario& sc, int n, uint64_t seed) {
  std::vector<Vec2> out;
  out.reserve(static_cast<size_t>(n));
  std::mt19937_64 rng(seed);
  const RegionFn unsafe = unsafe_region(sc);
  for (int i = 0; i < n; ++i) {
    Vec2 p;
    int guard = 0;
    do {
      p = sample_disc(sc.initial_region, rng);
      if (++guard > 100000)
        throw std::runtime_error("sample_initial_conditions: initial region mostly unsafe");
    } while (unsafe(0.0, p));
    out.push_back(p);
  }
  return out;
}

OccupancyResult estimate_occupancy(const Scenario& sc, const RegionFn& region, int n_samples,
                                   uint64_t seed, int grid_nx, int grid_ny) {
  const std::vector<Vec2> ics = sample_initial_conditions(sc, n_samples, seed);
  std::vector<double> dwell(static_cast<size_t>(n_samples), 0.0);
  std::vector<std::vector<Vec2>> paths(static_cast<size_t>(n_samples));

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    Scenario s = sc;
    s.start = ics[static_cast<size_t>(i)];
    s.log_dt = s.dt;  // keep every internal step
    const TrajectoryLog log = simulate(s);
    double acc = 0.0;
    auto& path = paths[static_cast<size_t>(i)];
    path.reserve(log.steps.size());
    for (const auto& step : log.steps) {
      if (region(step.t, step.pos)) acc += s.dt;
      path.push_back(step.pos);
    }
    dwell[static_cast<size_t>(i)] = acc;
  }

  OccupancyResult res;
  res.grid.box = sc.workspace;
  res.grid.nx = grid_nx;
  res.grid.ny = grid_ny;
  res.grid.cells.assign(static_cast<size_t>(grid_nx) * grid_ny, 0.0);
  const double vol0 = sc.initial_region.area();
  double total = 0.0;
  const Vec2 ext = sc.workspace.extent();
  for (int i = 0; i < n_samples; ++i) {
    total += dwell[static_cast<size_t>(i)];
    for (const auto& p : paths[static_cast<size_t>(i)]) {
      if (!sc.workspace.contains(p)) continue;
      const int ix = std::min(grid_nx - 1, static_cast<int>((p.x() - sc.workspace.lo.x()) /
                                                            ext.x() * grid_nx));
      const int iy = std::min(grid_ny - 1, static_cast<int>((p.y() - sc.workspace.lo.y()) /
                                                            ext.y() * grid_ny));
      res.grid.cells[static_cast<size_t>(iy) * grid_nx + ix] += sc.dt * vol0 / n_samples;
    }
  }
  res.occupancy = vol0 * total / n_samples;
  return res;
}

AeResult ae_convergence_sample(const Scenario& sc, int n_samples, uint64_t seed) {
  const std::vector<Vec2> ics = sample_initial_conditions(sc, n_samples, seed);
  std::vector<uint8_t> ok(static_cast<size_t>(n_samples), 0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    Scenario s = sc;
    s.start = ics[static_cast<size_t>(i)];
    s.log_dt = s.horizon;  // summaries only
    const TrajectoryLog log = simulate(s);
    ok[static_cast<size_t>(i)] = log.summary.converged ? 1 : 0;
  }

  AeResult res;
  int cnt = 0;
  for (int i = 0; i < n_samples; ++i) {
    if (ok[static_cast<size_t>(i)])
      ++cnt;
    else
      res.failures.push_back(ics[static_cast<size_t>(i)]);
  }
  res.fraction = static_cast<double>(cnt) / n_samples;
  return res;
}

void write_log_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  size_t n_clear = 0;
  if (!log.steps.empty()) n_clear = log.steps.front().clearance.size();
  out << "t,x,y,heading,vx,vy,ux,uy,rho,psi,saturated,in_workspace,clearance_min";
  for (size_t k = 0; k < n_clear; ++k) out << ",clearance_" << k;
  out << "\n";
  out.precision(10);
  for (const auto& s : log.steps) {
    double cmin = std::numeric_limits<double>::infinity();
    for (double c : s.clearance) cmin = std::min(cmin, c);
    if (s.clearance.empty()) cmin = std::numeric_limits<double>::quiet_NaN();
    out << s.t << ',' << s.pos.x() << ',' << s.pos.y() << ',' << s.heading << ',' << s.vel.x()
        << ',' << s.vel.y() << ',' << s.u.x() << ',' << s.u.y() << ',' << s.rho << ',' << s.psi
        << ',' << (s.saturated ? 1 : 0) << ',' << (s.in_workspace ? 1 : 0) << ',' << cmin;
    for (double c : s.clearance) out << ',' << c;
    out << "\n";
  }
}

void write_occupancy_csv(const OccupancyGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(10);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      out << grid.cells[static_cast<size_t>(iy) * grid.nx + ix];
      out << (ix + 1 == grid.nx ? '\n' : ',');
    }
  }
}

}  // namespace densnav

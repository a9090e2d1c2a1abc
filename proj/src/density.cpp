#include "densnav/density.hpp"

#include <cmath>
#include <stdexcept>

namespace densnav {

DistanceFn::Eval DistanceFn::eval(double t, const Vec2& x) const {
  Eval out;
  switch (kind) {
    case DistanceKind::kQuadratic: {
      const Vec2 w = x - target.position(t);
      out.V = w.squaredNorm();
      out.grad = 2.0 * w;
      out.hess_diag = Vec2(2.0, 2.0);
      if (!target.is_static()) {
        const Vec2 td = target.velocity(t);
        out.dt = -2.0 * w.dot(td);
        out.grad_dt = -2.0 * td;
      }
      break;
    }
    case DistanceKind::kQuadraticReciprocal: {
      const Vec2 w = x - target.position(t);
      const double n2 = std::max(w.squaredNorm(), 1e-12);
      const double n4 = n2 * n2;
      out.V = 1.0 / n2;
      out.grad = -2.0 * w / n4;
      out.hess_diag = Vec2(-2.0 / n4 + 8.0 * w.x() * w.x() / (n4 * n2),
                           -2.0 / n4 + 8.0 * w.y() * w.y() / (n4 * n2));
      if (!target.is_static()) {
        const Vec2 td = target.velocity(t);
        out.dt = 2.0 * w.dot(td) / n4;
        out.grad_dt = 2.0 * td / n4 - 8.0 * w * (w.dot(td)) / (n4 * n2);
      }
      break;
    }
    case DistanceKind::kJointCosine: {
      const Vec2 qbar = wrap_angles(x - target.position(t));
      Vec2 vj, vjj;
      double V = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double c = std::cos(qbar[i]);
        const double sn = std::sin(qbar[i]);
        V += (1.0 - c) * (1.0 - c);
        vj[i] = 2.0 * (1.0 - c) * sn;
        vjj[i] = 2.0 * sn * sn + 2.0 * (1.0 - c) * c;
      }
      out.V = V;
      out.grad = vj;
      out.hess_diag = vjj;
      if (!target.is_static()) {
        const Vec2 td = target_velocity(t);
        out.dt = -vj.dot(td);
        out.grad_dt = Vec2(-vjj.x() * td.x(), -vjj.y() * td.y());
      }
      break;
    }
  }
  return out;
}

Vec2 DistanceFn::target_velocity(double t) const {
  if (kind != DistanceKind::kJointCosine) return target.velocity(t);
  const double h = 1e-4;
  return wrap_angles(target.position(t + h) - target.position(t - h)) / (2.0 * h);
}

DensityField::DensityField(FieldMode mode, std::vector<ObstacleSpec> obstacles, DistanceFn distance,
                           double alpha, double beta, bool wrap_displacement)
    : mode_(mode),
      obstacles_(std::move(obstacles)),
      distance_(std::move(distance)),
      alpha_(alpha),
      beta_(beta),
      wrap_(wrap_displacement) {
  if (!(alpha_ > 0.0)) throw std::invalid_argument("density: alpha must be positive");
  // beta = 0 is the degenerate zero-flow case used by the transport checks.
  if (!(beta_ >= 0.0)) throw std::invalid_argument("density: beta must be nonnegative");
  if (!(distance_.kappa > 0.0)) throw std::invalid_argument("density: kappa must be positive");
  for (const auto& o : obstacles_) o.shape.validate();
  const bool target_moves = !distance_.target.is_static();
  bool obstacles_move = false;
  for (const auto& o : obstacles_)
    if (!o.center.is_static()) obstacles_move = true;
  if (target_moves && obstacles_move)
    throw std::invalid_argument(
        "density: simultaneous moving obstacles and moving target are not supported");
  if (mode_ == FieldMode::kDynamicObstacle && target_moves)
    throw std::invalid_argument("density: dynamic-obstacle mode requires a static target");
  if (mode_ == FieldMode::kDynamicTarget && obstacles_move)
    throw std::invalid_argument("density: dynamic-target mode requires static obstacles");
}

Vec2 DensityField::displacement(int k, double t, const Vec2& x) const {
  const Vec2 u = x - obstacles_[static_cast<size_t>(k)].center.position(t);
  return wrap_ ? wrap_angles(u) : u;
}

void DensityField::eval(double t, const Vec2& x, FieldEval& out, bool with_grad_dt) const {
  // Product of bumps via log-derivatives: with S1_j = sum_k dPsi_k/Psi_k etc.,
  //   Psi_j  = Psi * S1_j
  //   Psi_jj = Psi * (S1_j^2 + sum_k [Psi_k,jj/Psi_k - (Psi_k,j/Psi_k)^2])
  double psi = 1.0;
  Vec2 s1 = Vec2::Zero();
  Vec2 s2 = Vec2::Zero();
  double st = 0.0;       // sum_k dPsi_k/dt / Psi_k
  Vec2 s1t = Vec2::Zero();  // d/dt of s1 (needs full bump Hessians)
  BumpEval be;
  for (size_t k = 0; k < obstacles_.size(); ++k) {
    const auto& obs = obstacles_[k];
    const Vec2 u = wrap_ ? wrap_angles(x - obs.center.position(t)) : x - obs.center.position(t);
    bump_core(obs.shape, u, be);
    psi *= be.value;
    if (be.grad.isZero() && be.hess_diag.isZero()) continue;
    const double inv = 1.0 / be.value;
    const Vec2 g = be.grad * inv;
    s1 += g;
    s2 += Vec2(be.hess_diag.x() * inv - g.x() * g.x(), be.hess_diag.y() * inv - g.y() * g.y());
    if (!obs.center.is_static()) {
      const Vec2 cdot = obs.center.velocity(t);
      const double bdt = -be.grad.dot(cdot);
      st += bdt * inv;
      if (with_grad_dt) {
        // d/dt grad Psi_k = -Hess(Psi_k) * cdot
        const Vec2 gdt = -(be.hess * cdot);
        s1t += gdt * inv - g * (bdt * inv);
      }
    }
  }
  const Vec2 psi_grad = psi * s1;
  const Vec2 psi_hess(psi * (s1.x() * s1.x() + s2.x()), psi * (s1.y() * s1.y() + s2.y()));
  const double psi_dt = psi * st;

  const DistanceFn::Eval dv = distance_.eval(t, x);
  const double V1 = dv.V + distance_.kappa;
  const double P = std::pow(V1, -alpha_);
  const double a = alpha_;

  out.psi = psi;
  out.psi_grad = psi_grad;
  out.psi_hess_diag = psi_hess;
  out.psi_dt = psi_dt;
  out.V = dv.V;
  out.V1 = V1;
  out.rho = psi * P;
  double lap = 0.0;
  for (int j = 0; j < 2; ++j) {
    out.grad[j] = P * (psi_grad[j] - a * psi * dv.grad[j] / V1);
    lap += P * (psi_hess[j] - 2.0 * a * psi_grad[j] * dv.grad[j] / V1 -
                a * psi * dv.hess_diag[j] / V1 +
                a * (a + 1.0) * psi * dv.grad[j] * dv.grad[j] / (V1 * V1));
  }
  out.lap = lap;
  out.dt = P * (psi_dt - a * psi * dv.dt / V1);

  if (with_grad_dt) {
    // d/dt of grad rho. P_t = -a * V1^{-a-1} * V_t.
    const double Pt = -a * P / V1 * dv.dt;
    const Vec2 psi_grad_dt = psi_dt * s1 + psi * s1t;
    for (int j = 0; j < 2; ++j) {
      const double core = psi_grad[j] - a * psi * dv.grad[j] / V1;
      const double core_dt = psi_grad_dt[j] -
                             a * (psi_dt * dv.grad[j] + psi * dv.grad_dt[j]) / V1 +
                             a * psi * dv.grad[j] * dv.dt / (V1 * V1);
      out.grad_dt[j] = Pt * core + P * core_dt;
    }
  } else {
    out.grad_dt.setZero();
  }
}

double DensityField::rho(double t, const Vec2& x) const {
  FieldEval e;
  eval(t, x, e);
  return e.rho;
}

Vec2 DensityField::rho_grad(double t, const Vec2& x) const {
  FieldEval e;
  eval(t, x, e);
  return e.grad;
}

double DensityField::rho_dt(double t, const Vec2& x) const {
  FieldEval e;
  eval(t, x, e);
  return e.dt;
}

double DensityField::rho_lap(double t, const Vec2& x) const {
  FieldEval e;
  eval(t, x, e);
  return e.lap;
}

Vec2 DensityField::rho_grad_dt(double t, const Vec2& x) const {
  FieldEval e;
  eval(t, x, e, /*with_grad_dt=*/true);
  return e.grad_dt;
}

double DensityField::psi(double t, const Vec2& x) const {
  double p = 1.0;
  BumpEval be;
  for (size_t k = 0; k < obstacles_.size(); ++k) {
    const auto& obs = obstacles_[k];
    const Vec2 u = wrap_ ? wrap_angles(x - obs.center.position(t)) : x - obs.center.position(t);
    bump_core(obs.shape, u, be);
    p *= be.value;
  }
  return p;
}

double DensityField::divergence_k_rho(double t, const Vec2& x) const {
  const Vec2 to_target = wrap_ ? wrap_angles(x - distance_.target.position(t))
                               : x - distance_.target.position(t);
  if (to_target.norm() < delta_)
    throw std::domain_error("divergence_k_rho: point inside the excluded target neighborhood");
  FieldEval e;
  eval(t, x, e);
  return beta_ * (e.grad.squaredNorm() + e.rho * e.lap);
}

DensityField multiagent_field(std::span<const AgentSpec> agents, std::span<const AgentState> states,
                              int j, double t_ref, double bubble_margin) {
  const auto& me = agents[static_cast<size_t>(j)];
  const Vec2 xj = states[static_cast<size_t>(j)].pos;
  std::vector<ObstacleSpec> obstacles;
  obstacles.reserve(agents.size());
  for (size_t k = 0; k < agents.size(); ++k) {
    if (static_cast<int>(k) == j) continue;
    const auto& other = agents[k];
    // Agent k is a disk of radius r_k advertising a sensing circle of radius
    // s_k; agent j's own disk inflates both: exclusion at contact distance,
    // repulsion onset when j's disk touches k's sensing circle.
    const double s_jk = me.radius + other.sensing;
    if ((states[k].pos - xj).norm() > s_jk) continue;  // locality: not sensed yet
    ObstacleSpec obs;
    obs.shape.theta = other.theta;
    obs.shape.r = me.radius + other.radius + bubble_margin;
    obs.shape.s = s_jk;
    obs.center = Path2::line(states[k].pos - states[k].vel * t_ref, states[k].vel);
    obstacles.push_back(std::move(obs));
  }
  DistanceFn dist;
  dist.kind = me.reciprocal_distance ? DistanceKind::kQuadraticReciprocal : DistanceKind::kQuadratic;
  dist.target = Path2::fixed(me.target);
  dist.kappa = me.kappa;
  return DensityField(FieldMode::kDynamicObstacle, std::move(obstacles), std::move(dist), me.alpha,
                      me.beta);
}

double multiagent_rho(std::span<const AgentSpec> agents, std::span<const AgentState> states, int j,
                      double t, const Vec2& xj, double bubble_margin) {
  return multiagent_field(agents, states, j, t, bubble_margin).rho(t, xj);
}

Vec2 multiagent_rho_grad(std::span<const AgentSpec> agents, std::span<const AgentState> states,
                         int j, double t, const Vec2& xj, double bubble_margin) {
  return multiagent_field(agents, states, j, t, bubble_margin).rho_grad(t, xj);
}

}  // namespace densnav

#pragma once

#include <span>
#include <vector>

#include "densnav/smoothfn.hpp"

namespace densnav {

enum class FieldMode { kStatic, kDynamicObstacle, kDynamicTarget };

enum class DistanceKind { kQuadratic, kQuadraticReciprocal, kJointCosine };

/// Distance-to-target part of the density denominator, V(t,x), plus the
/// regularizer kappa. Quadratic: V = |x - x_T(t)|^2. Reciprocal: V = 1/|x-x_T|^2
/// (the multi-agent form written in some formulations; see DensityField notes).
/// Joint-cosine: V = (1-cos(q1-q1T))^2 + (1-cos(q2-q2T))^2 on the joint torus.
struct DistanceFn {
  DistanceKind kind = DistanceKind::kQuadratic;
  Path2 target;  // x_T(t) or q_T(t); Path2::fixed for static targets
  double kappa = 1.0;

  struct Eval {
    double V = 0.0;
    Vec2 grad = Vec2::Zero();       // dV/dx_j
    Vec2 hess_diag = Vec2::Zero();  // d2V/dx_j^2
    double dt = 0.0;                // dV/dt
    Vec2 grad_dt = Vec2::Zero();    // d/dt (dV/dx_j)
  };
  Eval eval(double t, const Vec2& x) const;

  /// Target velocity; wrap-aware finite difference for joint-space targets
  /// (whose inverse-kinematics parameterization can jump by 2*pi).
  Vec2 target_velocity(double t) const;
};

/// Fused evaluation of the density and every derivative the controllers,
/// simulator and certification code need at one (t, x).
struct FieldEval {
  double rho = 0.0;
  Vec2 grad = Vec2::Zero();
  double lap = 0.0;  // sum_j d2rho/dx_j^2
  double dt = 0.0;   // drho/dt
  Vec2 grad_dt = Vec2::Zero();
  double psi = 1.0;  // product of bumps
  Vec2 psi_grad = Vec2::Zero();
  Vec2 psi_hess_diag = Vec2::Zero();
  double psi_dt = 0.0;
  double V = 0.0;
  double V1 = 0.0;  // V + kappa
};

/// Navigation density rho(t,x) = prod_k Psi_k(t,x) / (V(t,x) + kappa)^alpha.
///
/// The product gradient and Laplacian use the logarithmic product rule, valid
/// because every bump is bounded below by its theta > 0.
class DensityField {
 public:
  DensityField() = default;
  DensityField(FieldMode mode, std::vector<ObstacleSpec> obstacles, DistanceFn distance,
               double alpha, double beta, bool wrap_displacement = false);

  double rho(double t, const Vec2& x) const;
  Vec2 rho_grad(double t, const Vec2& x) const;
  double rho_dt(double t, const Vec2& x) const;
  double rho_lap(double t, const Vec2& x) const;
  /// d/dt of the gradient (used by the backstepping feedforward term).
  Vec2 rho_grad_dt(double t, const Vec2& x) const;
  /// Product of bump values at (t, x).
  double psi(double t, const Vec2& x) const;

  /// Divergence of the closed-loop flux, div(beta * grad(rho) * rho)
  ///   = beta * (|grad rho|^2 + rho * lap rho).
  /// Defined on X_1 only: throws std::domain_error within delta of the target.
  double divergence_k_rho(double t, const Vec2& x) const;

  void eval(double t, const Vec2& x, FieldEval& out, bool with_grad_dt = false) const;

  FieldMode mode() const { return mode_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double kappa() const { return distance_.kappa; }
  double delta() const { return delta_; }
  void set_delta(double d) { delta_ = d; }
  bool wrapped() const { return wrap_; }
  const std::vector<ObstacleSpec>& obstacles() const { return obstacles_; }
  const DistanceFn& distance() const { return distance_; }
  Vec2 target_position(double t) const { return distance_.target.position(t); }
  Vec2 target_velocity(double t) const { return distance_.target_velocity(t); }

  /// Displacement from obstacle k's center, wrapped on the joint torus when
  /// the field is configured for joint space.
  Vec2 displacement(int k, double t, const Vec2& x) const;

 private:
  FieldMode mode_ = FieldMode::kStatic;
  std::vector<ObstacleSpec> obstacles_;
  DistanceFn distance_;
  double alpha_ = 0.2;
  double beta_ = 10.0;
  double delta_ = 1e-3;
  bool wrap_ = false;
};

/// One agent of a multi-agent scenario, as the density construction sees it.
struct AgentSpec {
  double radius = 0.5;
  double sensing = 2.0;
  Vec2 target = Vec2::Zero();
  double alpha = 0.2;
  double beta = 10.0;
  double theta = 0.05;
  double kappa = 1.0;
  bool reciprocal_distance = false;  // fidelity flag: V_j = 1/|x_j - x_Tj|^2
};

struct AgentState {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
};

/// Builds agent j's density field from a state snapshot taken at time t_ref.
/// Every other agent k becomes a moving circular obstacle with exclusion
/// radius r_j + r_k + margin and sensing onset r_j + s_k (agent j's disk
/// touching k's advertised sensing circle), extrapolated along its current
/// velocity. Agents not yet sensed are skipped entirely, so the construction
/// is local by structure.
DensityField multiagent_field(std::span<const AgentSpec> agents, std::span<const AgentState> states,
                              int j, double t_ref, double bubble_margin = 0.0);

double multiagent_rho(std::span<const AgentSpec> agents, std::span<const AgentState> states, int j,
                      double t, const Vec2& xj, double bubble_margin = 0.0);
Vec2 multiagent_rho_grad(std::span<const AgentSpec> agents, std::span<const AgentState> states,
                         int j, double t, const Vec2& xj, double bubble_margin = 0.0);

}  // namespace densnav

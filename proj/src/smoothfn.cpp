#include "densnav/smoothfn.hpp"

#include <cmath>
#include <stdexcept>

namespace densnav {

double elementary_f(double tau) {
  if (tau <= kTauUnderflow) return 0.0;
  return std::exp(-1.0 / tau);
}

double elementary_f_d1(double tau) {
  if (tau <= kTauUnderflow) return 0.0;
  const double f = std::exp(-1.0 / tau);
  return f / (tau * tau);
}

double elementary_f_d2(double tau) {
  if (tau <= kTauUnderflow) return 0.0;
  const double f = std::exp(-1.0 / tau);
  const double t2 = tau * tau;
  return f * (1.0 - 2.0 * tau) / (t2 * t2);
}

StepEval smooth_step_eval(double tau, double theta) {
  StepEval out;
  // Flat branches, including the underflow strip next to each seam.
  if (tau <= kTauUnderflow) {
    out.value = theta;
    return out;
  }
  if (tau >= 1.0 - kTauUnderflow) {
    out.value = 1.0;
    return out;
  }
  const double a = std::exp(-1.0 / tau);                  // f(tau)
  const double b = std::exp(-1.0 / (1.0 - tau));          // f(1-tau)
  const double ap = a / (tau * tau);                      // f'(tau)
  const double bp = -b / ((1.0 - tau) * (1.0 - tau));     // d/dtau f(1-tau)
  const double t2 = tau * tau;
  const double m2 = (1.0 - tau) * (1.0 - tau);
  const double app = a * (1.0 - 2.0 * tau) / (t2 * t2);
  const double bpp = b * (1.0 - 2.0 * (1.0 - tau)) / (m2 * m2);  // d^2/dtau^2 f(1-tau)
  const double den = a + b;
  const double g = a / den;
  const double gp = (ap * b - a * bp) / (den * den);
  const double gpp = ((app * b - a * bpp) * den - 2.0 * (ap * b - a * bp) * (ap + bp)) /
                     (den * den * den);
  out.value = (1.0 - theta) * g + theta;
  out.d1 = (1.0 - theta) * gp;
  out.d2 = (1.0 - theta) * gpp;
  return out;
}

double smooth_step(double tau, double theta) { return smooth_step_eval(tau, theta).value; }

void BumpShape::validate() const {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("bump: theta must be in (0,1), got " + std::to_string(theta));
  if (!(r > 0.0)) throw std::invalid_argument("bump: radius must be positive");
  if (!(s > r))
    throw std::invalid_argument("bump: sensing radius must exceed obstacle radius (s > r)");
}

void bump_core(const BumpShape& shape, const Vec2& u, BumpEval& out) {
  const double d2 = u.squaredNorm();
  const double band = shape.s * shape.s - shape.r * shape.r;
  const double tau = (d2 - shape.r * shape.r) / band;
  if (tau <= kTauUnderflow) {
    out.value = shape.theta;
    out.grad.setZero();
    out.hess_diag.setZero();
    out.hess.setZero();
    return;
  }
  if (tau >= 1.0 - kTauUnderflow) {
    out.value = 1.0;
    out.grad.setZero();
    out.hess_diag.setZero();
    out.hess.setZero();
    return;
  }
  const StepEval st = smooth_step_eval(tau, shape.theta);
  const Vec2 tau_grad = 2.0 * u / band;  // d tau / d x
  const double tau_hess = 2.0 / band;    // diagonal of d^2 tau / d x^2
  out.value = st.value;
  out.grad = st.d1 * tau_grad;
  out.hess = st.d2 * (tau_grad * tau_grad.transpose());
  out.hess(0, 0) += st.d1 * tau_hess;
  out.hess(1, 1) += st.d1 * tau_hess;
  out.hess_diag = out.hess.diagonal();
}

BumpEval bump_eval(const ObstacleSpec& obs, double t, const Vec2& x) {
  BumpEval out;
  bump_core(obs.shape, x - obs.center.position(t), out);
  // Psi depends on time only through x - c(t).
  out.dt = (out.grad.isZero() || obs.center.is_static()) ? 0.0 : -out.grad.dot(obs.center.velocity(t));
  return out;
}

double bump_value(const ObstacleSpec& obs, double t, const Vec2& x) {
  BumpEval e;
  bump_core(obs.shape, x - obs.center.position(t), e);
  return e.value;
}

Vec2 bump_grad(const ObstacleSpec& obs, double t, const Vec2& x) {
  BumpEval e;
  bump_core(obs.shape, x - obs.center.position(t), e);
  return e.grad;
}

Vec2 bump_hess_diag(const ObstacleSpec& obs, double t, const Vec2& x) {
  BumpEval e;
  bump_core(obs.shape, x - obs.center.position(t), e);
  return e.hess_diag;
}

double bump_dt(const ObstacleSpec& obs, double t, const Vec2& x) { return bump_eval(obs, t, x).dt; }

}  // namespace densnav

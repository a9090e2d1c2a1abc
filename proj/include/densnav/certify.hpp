#pragma once

#include <optional>
#include <string>

#include "densnav/density.hpp"
#include "densnav/geometry.hpp"

namespace densnav {

/// Sampled uniform bounds behind the convergence analysis. The Psi bounds are
/// taken over the sensing bands, the distance-function bounds over X_1, and
/// cbar_x/cunder_x over the sensing bands (target-centered norms). dunder_Vx
/// is an aggregate (root-mean-square over components) bound so that the
/// summed inequalities the calculator relies on hold for quadratic V, where a
/// per-component lower bound would degenerate to zero on the axes.
struct AssumptionConstants {
  double c_psi_t = 0.0;      // |dPsi/dt| on the sensing bands
  double cbar_psi_x = 0.0;   // |dPsi/dx_j|
  double cbar_psi_xx = 0.0;  // |d2Psi/dx_j^2|
  double dbar_V = 1.0;
  double dunder_V = 1.0;
  double dbar_Vx = 2.0;
  double dunder_Vx = 1.4142135623730951;
  double dbar_Vxx = 2.0;
  double cbar_x = 1.0;
  double cunder_x = 1.0;
  double delta = 1e-3;
  double theta = 0.05;
  double kappa = 1.0;
};

struct AppendixCoeffs {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
};

AppendixCoeffs appendix_coeffs(const AssumptionConstants& c);

/// Admissible lower bound on alpha: max of the quadratic-root branch (inside
/// the sensing bands) and the outside-sensing branch. Throws on p1 <= 0.
double alpha_range(const AssumptionConstants& c);

/// L1 aggregate at a given alpha; positive iff alpha clears the root branch.
double compute_L1(const AssumptionConstants& c, double alpha);

/// beta_min = c_psi_t / L1. Throws std::domain_error when L1 <= 0.
double beta_range(const AssumptionConstants& c, double alpha);

/// Analytic in-band lower bound on div(k rho) at local values (V, V1),
/// evaluated with the estimated constants.
double lemma3_lower_bound(const AssumptionConstants& c, double alpha, double beta, double V,
                          double V1);

/// Samples the field to estimate the constants. grid_n controls both the
/// polar band sampling and the X_1 grid; nt time samples cover [t0, t1].
AssumptionConstants estimate_constants(const DensityField& field, const Box& workspace, int grid_n,
                                       double t0, double t1, int nt);

struct Lemma1Result {
  double margin = 0.0;            // min over grid x times of drho/dt + div(k rho)
  Vec2 argmin = Vec2::Zero();
  double argmin_t = 0.0;
  double tail_exponent = 0.0;     // fitted decay exponent, min over 16 rays
  bool integral_finite = false;   // tail_exponent > 1
  long excluded_points = 0;       // grid points inside the B_delta exclusion
};

Lemma1Result check_lemma1(const DensityField& field, const Box& workspace, int nx, int ny, int nt,
                          double t0, double t1);

struct LiouvilleResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs-rhs| / max(|lhs|,|rhs|,eps)
};

/// Monte-Carlo transport check of the Liouville identity over [t0, t1] on the
/// initial disc Z. Sample trajectories follow the closed-loop gradient flow;
/// set integrals carry the flow-map Jacobian integrated along each path.
/// Throws std::runtime_error naming the sample if a trajectory leaves the
/// workspace.
LiouvilleResult liouville_residual(const DensityField& field, const Disc& Z, double t0, double t1,
                                   double dt, int n_samples, const Box& workspace, uint64_t seed);

struct CertificateReport {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0, L1 = 0.0;
  double alpha_min = 0.0;
  double beta_min = 0.0;
  bool beta_min_defined = false;  // false when L1 <= 0 at the scenario alpha
  double lemma1_margin = 0.0;
  bool lemma1_integral_finite = false;
  double tail_exponent = 0.0;
  double liouville_residual = 0.0;
  double alpha = 0.0, beta = 0.0;
  Vec2 margin_argmin = Vec2::Zero();
  double margin_argmin_t = 0.0;
  std::string notes;

  bool alpha_in_range() const { return alpha >= alpha_min; }
  bool beta_in_range() const { return beta_min_defined && beta >= beta_min; }
  std::string to_json() const;
};

}  // namespace densnav

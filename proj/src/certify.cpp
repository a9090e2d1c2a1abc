#include "densnav/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace densnav {

AppendixCoeffs appendix_coeffs(const AssumptionConstants& c) {
  AppendixCoeffs out;
  const double denom = std::pow(c.dbar_V * c.cbar_x * c.cbar_x + c.kappa, -2.0);
  const double a_term = denom * std::pow(c.dunder_Vx * c.cbar_x * c.theta, 2.0);
  out.p1 = 2.0 * a_term;
  out.p2 = a_term - 4.0 / c.dunder_V * c.dbar_Vx * c.cbar_psi_x / c.cbar_x -
           c.dbar_Vxx / c.kappa;
  out.p3 = c.cbar_psi_xx;
  return out;
}

double alpha_range(const AssumptionConstants& c) {
  const AppendixCoeffs p = appendix_coeffs(c);
  if (!(p.p1 > 0.0))
    throw std::domain_error("alpha_range: degenerate constants, p1 <= 0");
  const double disc = p.p2 * p.p2 + 4.0 * p.p1 * p.p3;
  const double root = (-p.p2 + std::sqrt(disc)) / (2.0 * p.p1);
  // Outside the sensing bands: dbar_V1 >= dbar_V + kappa/delta absorbs kappa.
  const double dbar_V1 = c.dbar_V + c.kappa / c.delta;
  const double out_branch =
      c.dbar_Vxx / c.dunder_V /
          (2.0 * std::pow(dbar_V1, -2.0) * std::pow(c.dunder_Vx * c.theta, 2.0)) -
      0.5;
  return std::max(root, out_branch);
}

double compute_L1(const AssumptionConstants& c, double alpha) {
  const AppendixCoeffs p = appendix_coeffs(c);
  const double n = 2.0;
  return n / (c.dbar_V * c.cbar_x * c.cbar_x) * (p.p1 * alpha * alpha + p.p2 * alpha - p.p3);
}

double beta_range(const AssumptionConstants& c, double alpha) {
  const double L1 = compute_L1(c, alpha);
  if (!(L1 > 0.0))
    throw std::domain_error("beta_range: L1 <= 0, alpha below the admissible range");
  return c.c_psi_t / L1;
}

double lemma3_lower_bound(const AssumptionConstants& c, double alpha, double beta, double V,
                          double V1) {
  const double n = 2.0;
  const double bracket =
      (2.0 * alpha + 1.0) * std::pow(c.dbar_V * c.cbar_x * c.cbar_x + c.kappa, -2.0) *
          std::pow(c.dunder_Vx * c.cbar_x * c.theta, 2.0) -
      4.0 / c.dunder_V * c.dbar_Vx * c.cbar_psi_x / c.cunder_x - c.dbar_Vxx / c.kappa -
      c.cbar_psi_xx / alpha;
  return alpha * beta * n / (std::pow(V, alpha) * std::pow(V1, alpha)) * bracket;
}

AssumptionConstants estimate_constants(const DensityField& field, const Box& workspace, int grid_n,
                                       double t0, double t1, int nt) {
  AssumptionConstants c;
  c.kappa = field.kappa();
  c.delta = field.delta();
  c.theta = 1.0;
  for (const auto& o : field.obstacles()) c.theta = std::min(c.theta, o.shape.theta);
  if (field.obstacles().empty()) c.theta = 1.0;

  const bool time_varying = field.mode() == FieldMode::kDynamicObstacle;
  const int n_times = time_varying ? std::max(nt, 2) : 1;

  // Psi bounds and target-centered norm bounds over the sensing bands (polar
  // sampling of each band, swept over time for moving obstacles).
  double cpsit = 0.0, cpsix = 0.0, cpsixx = 0.0;
  double cx_max = 0.0, cx_min = std::numeric_limits<double>::infinity();
  const int n_rad = std::max(grid_n, 64);
  const int n_ang = 96;
  FieldEval fe;
  for (size_t k = 0; k < field.obstacles().size(); ++k) {
    const auto& obs = field.obstacles()[k];
    for (int it = 0; it < n_times; ++it) {
      const double t = n_times == 1 ? t0 : t0 + (t1 - t0) * it / (n_times - 1);
      const Vec2 ck = obs.center.position(t);
      const Vec2 xt = field.target_position(t);
      for (int ir = 0; ir <= n_rad; ++ir) {
        const double d = obs.shape.r + (obs.shape.s - obs.shape.r) * ir / n_rad;
        for (int ia = 0; ia < n_ang; ++ia) {
          const double phi = 2.0 * kPi * ia / n_ang;
          const Vec2 x = ck + d * Vec2(std::cos(phi), std::sin(phi));
          field.eval(t, x, fe);
          cpsit = std::max(cpsit, std::abs(fe.psi_dt));
          cpsix = std::max({cpsix, std::abs(fe.psi_grad.x()), std::abs(fe.psi_grad.y())});
          cpsixx = std::max(
              {cpsixx, std::abs(fe.psi_hess_diag.x()), std::abs(fe.psi_hess_diag.y())});
          const double nrm = (x - xt).norm();
          cx_max = std::max(cx_max, nrm);
          cx_min = std::min(cx_min, nrm);
        }
      }
    }
  }
  const double inflate = 1.05;
  c.c_psi_t = cpsit * inflate;
  c.cbar_psi_x = cpsix * inflate;
  c.cbar_psi_xx = cpsixx * inflate;
  if (field.obstacles().empty()) {
    c.c_psi_t = c.cbar_psi_x = c.cbar_psi_xx = 0.0;
    // Fall back to X_1 norms for the workspace bounds.
    for (int i = 0; i <= grid_n; ++i)
      for (int j = 0; j <= grid_n; ++j) {
        const Vec2 x = workspace.lerp(static_cast<double>(i) / grid_n,
                                      static_cast<double>(j) / grid_n);
        const double nrm = (x - field.target_position(t0)).norm();
        if (nrm < field.delta()) continue;
        cx_max = std::max(cx_max, nrm);
        cx_min = std::min(cx_min, nrm);
      }
  }
  c.cbar_x = cx_max * inflate;
  c.cunder_x = cx_min / inflate;

  if (field.distance().kind == DistanceKind::kQuadratic) {
    // Exact for the quadratic distance; dunder_Vx is the aggregate constant
    // with |grad V|^2 = n * dunder_Vx^2 * |x|^2 holding with equality.
    c.dbar_V = c.dunder_V = 1.0;
    c.dbar_Vxx = 2.0;
    c.dbar_Vx = 2.0;
    c.dunder_Vx = std::sqrt(2.0);
    return c;
  }

  // Grid-estimated distance bounds for non-quadratic kinds.
  double dbarV = 0.0, dunderV = std::numeric_limits<double>::infinity();
  double dbarVx = 0.0, dunderVx = std::numeric_limits<double>::infinity(), dbarVxx = 0.0;
  for (int it = 0; it < n_times; ++it) {
    const double t = n_times == 1 ? t0 : t0 + (t1 - t0) * it / (n_times - 1);
    for (int i = 0; i <= grid_n; ++i)
      for (int j = 0; j <= grid_n; ++j) {
        const Vec2 x = workspace.lerp(static_cast<double>(i) / grid_n,
                                      static_cast<double>(j) / grid_n);
        const Vec2 xt = field.target_position(t);
        const double nrm = (x - xt).norm();
        if (nrm < std::max(field.delta(), 1e-6)) continue;
        const DistanceFn::Eval dv = field.distance().eval(t, x);
        dbarV = std::max(dbarV, dv.V / (nrm * nrm));
        dunderV = std::min(dunderV, dv.V / (nrm * nrm));
        dbarVx = std::max({dbarVx, std::abs(dv.grad.x()) / nrm, std::abs(dv.grad.y()) / nrm});
        dunderVx = std::min(dunderVx, dv.grad.norm() / (std::sqrt(2.0) * nrm));
        dbarVxx = std::max({dbarVxx, dv.hess_diag.x(), dv.hess_diag.y()});
      }
  }
  c.dbar_V = dbarV * inflate;
  c.dunder_V = dunderV / inflate;
  c.dbar_Vx = dbarVx * inflate;
  c.dunder_Vx = dunderVx / inflate;
  c.dbar_Vxx = dbarVxx * inflate;
  return c;
}

Lemma1Result check_lemma1(const DensityField& field, const Box& workspace, int nx, int ny, int nt,
                          double t0, double t1) {
  Lemma1Result res;
  res.margin = std::numeric_limits<double>::infinity();
  FieldEval fe;
  for (int it = 0; it < nt; ++it) {
    const double t = nt == 1 ? t0 : t0 + (t1 - t0) * it / (nt - 1);
    const Vec2 target = field.target_position(t);
    for (int i = 0; i <= nx; ++i) {
      for (int j = 0; j <= ny; ++j) {
        const Vec2 x =
            workspace.lerp(static_cast<double>(i) / nx, static_cast<double>(j) / ny);
        if ((x - target).norm() < field.delta()) {
          ++res.excluded_points;
          continue;
        }
        field.eval(t, x, fe);
        const double div = field.beta() * (fe.grad.squaredNorm() + fe.rho * fe.lap);
        const double val = fe.dt + div;
        if (val < res.margin) {
          res.margin = val;
          res.argmin = x;
          res.argmin_t = t;
        }
      }
    }
  }

  // Tail decay along 16 rays from the target, beyond the workspace.
  const Vec2 target = field.target_position(t0);
  double r0 = 0.0;
  const Vec2 corners[4] = {workspace.lo, workspace.hi, Vec2(workspace.lo.x(), workspace.hi.y()),
                           Vec2(workspace.hi.x(), workspace.lo.y())};
  for (const auto& c : corners) r0 = std::max(r0, (c - target).norm());
  for (const auto& o : field.obstacles())
    r0 = std::max(r0, (o.center.position(t0) - target).norm() + o.shape.s);
  res.tail_exponent = std::numeric_limits<double>::infinity();
  const int n_rays = 16, n_pts = 10;
  for (int ray = 0; ray < n_rays; ++ray) {
    const double phi = 2.0 * kPi * ray / n_rays;
    const Vec2 dir(std::cos(phi), std::sin(phi));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int ip = 0; ip < n_pts; ++ip) {
      const double r = 1.5 * r0 * std::pow(1.35, ip);
      const Vec2 x = target + r * dir;
      field.eval(t0, x, fe);
      const double speed = (field.beta() * fe.grad).norm();
      const double g = (1.0 + speed) / (1.0 + x.norm()) * fe.rho;
      const double lx = std::log(r), ly = std::log(std::max(g, 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
    res.tail_exponent = std::min(res.tail_exponent, -slope);
  }
  res.integral_finite = res.tail_exponent > 1.0;
  return res;
}

LiouvilleResult liouville_residual(const DensityField& field, const Disc& Z, double t0, double t1,
                                   double dt, int n_samples, const Box& workspace, uint64_t seed) {
  // Augmented state per sample: (x, logJ, I) with
  //   xdot    = beta * grad rho
  //   logJdot = div(beta * grad rho) = beta * lap rho
  //   Idot    = (drho/dt + div(k rho)) * J
  // Then per sample rho(t1,x1)*J1 - rho(t0,x0) should equal I(t1).
  struct Aug {
    Vec2 x;
    double logJ;
    double I;
  };
  std::mt19937_64 rng(seed);
  std::vector<Vec2> x0(static_cast<size_t>(n_samples));
  for (auto& p : x0) p = sample_disc(Z, rng);

  const long n_steps = std::lround(std::ceil((t1 - t0) / dt));
  std::vector<double> lhs_i(static_cast<size_t>(n_samples), 0.0);
  std::vector<double> rhs_i(static_cast<size_t>(n_samples), 0.0);
  std::vector<long> escaped(static_cast<size_t>(n_samples), -1);

#pragma omp parallel for schedule(static)
  for (int s = 0; s < n_samples; ++s) {
    FieldEval fe;
    auto deriv = [&](double t, const Aug& a, Aug& out) {
      field.eval(t, a.x, fe);
      out.x = field.beta() * fe.grad;
      out.logJ = field.beta() * fe.lap;
      const double div_krho = field.beta() * (fe.grad.squaredNorm() + fe.rho * fe.lap);
      out.I = (fe.dt + div_krho) * std::exp(a.logJ);
    };
    Aug a{x0[static_cast<size_t>(s)], 0.0, 0.0};
    const double rho0 = field.rho(t0, a.x);
    bool out_of_box = false;
    for (long i = 0; i < n_steps; ++i) {
      const double t = t0 + dt * i;
      if (!workspace.contains(a.x)) {
        escaped[static_cast<size_t>(s)] = i;
        out_of_box = true;
        break;
      }
      Aug k1, k2, k3, k4;
      deriv(t, a, k1);
      Aug tmp{a.x + 0.5 * dt * k1.x, a.logJ + 0.5 * dt * k1.logJ, a.I + 0.5 * dt * k1.I};
      deriv(t + 0.5 * dt, tmp, k2);
      tmp = {a.x + 0.5 * dt * k2.x, a.logJ + 0.5 * dt * k2.logJ, a.I + 0.5 * dt * k2.I};
      deriv(t + 0.5 * dt, tmp, k3);
      tmp = {a.x + dt * k3.x, a.logJ + dt * k3.logJ, a.I + dt * k3.I};
      deriv(t + dt, tmp, k4);
      a.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      a.logJ += dt / 6.0 * (k1.logJ + 2.0 * k2.logJ + 2.0 * k3.logJ + k4.logJ);
      a.I += dt / 6.0 * (k1.I + 2.0 * k2.I + 2.0 * k3.I + k4.I);
    }
    if (!out_of_box) {
      lhs_i[static_cast<size_t>(s)] = field.rho(t1, a.x) * std::exp(a.logJ) - rho0;
      rhs_i[static_cast<size_t>(s)] = a.I;
    }
  }

  for (int s = 0; s < n_samples; ++s) {
    if (escaped[static_cast<size_t>(s)] >= 0) {
      std::ostringstream msg;
      msg << "liouville_residual: sample " << s << " left the workspace at step "
          << escaped[static_cast<size_t>(s)];
      throw std::runtime_error(msg.str());
    }
  }

  const double w = Z.area() / n_samples;
  LiouvilleResult res;
  for (int s = 0; s < n_samples; ++s) {
    res.lhs += w * lhs_i[static_cast<size_t>(s)];
    res.rhs += w * rhs_i[static_cast<size_t>(s)];
  }
  const double scale = std::max({std::abs(res.lhs), std::abs(res.rhs), 1e-12});
  res.residual = std::abs(res.lhs - res.rhs) / scale;
  return res;
}

std::string CertificateReport::to_json() const {
  std::ostringstream o;
  o.precision(12);
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "{\n";
  o << "  \"p1\": " << p1 << ",\n  \"p2\": " << p2 << ",\n  \"p3\": " << p3 << ",\n";
  o << "  \"L1\": " << L1 << ",\n";
  o << "  \"alpha\": " << alpha << ",\n  \"beta\": " << beta << ",\n";
  o << "  \"alpha_min\": " << alpha_min << ",\n";
  o << "  \"beta_min\": ";
  if (beta_min_defined)
    o << beta_min;
  else
    o << "null";
  o << ",\n";
  o << "  \"alpha_in_range\": " << b(alpha_in_range()) << ",\n";
  o << "  \"beta_in_range\": " << b(beta_in_range()) << ",\n";
  o << "  \"lemma1_margin\": " << lemma1_margin << ",\n";
  o << "  \"lemma1_margin_argmin\": [" << margin_argmin.x() << ", " << margin_argmin.y()
    << "],\n";
  o << "  \"lemma1_margin_argmin_t\": " << margin_argmin_t << ",\n";
  o << "  \"lemma1_integral_finite\": " << b(lemma1_integral_finite) << ",\n";
  o << "  \"tail_exponent\": " << tail_exponent << ",\n";
  o << "  \"liouville_residual\": " << liouville_residual << ",\n";
  o << "  \"notes\": \"" << notes << "\"\n";
  o << "}\n";
  return o.str();
}

}  // namespace densnav

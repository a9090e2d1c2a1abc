#include <doctest.h>

#include <cmath>

#include "densnav/smoothfn.hpp"
#include "oracles.hpp"

using namespace densnav;
using namespace densnav::test;

TEST_CASE("elementary function branches") {
  CHECK(elementary_f(-1.0) == 0.0);
  CHECK(elementary_f(0.0) == 0.0);
  CHECK(elementary_f(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  // Extended-precision reference for a small positive argument.
  const long double ref = expl(-100.0L);
  CHECK(elementary_f(0.01) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  // Below the documented threshold the value and derivatives are exactly zero.
  CHECK(elementary_f(0.004) == 0.0);
  CHECK(elementary_f_d1(0.004) == 0.0);
  CHECK(elementary_f_d2(0.004) == 0.0);
}

TEST_CASE("smooth step endpoints and symmetry") {
  CHECK(smooth_step(0.0, 0.1) == 0.1);
  CHECK(smooth_step(-3.0, 0.1) == 0.1);
  CHECK(smooth_step(1.0, 0.1) == 1.0);
  CHECK(smooth_step(2.0, 0.1) == 1.0);
  CHECK(smooth_step(0.5, 0.1) == doctest::Approx(0.55).epsilon(1e-14));
}

TEST_CASE("smooth step monotone and in range") {
  const double theta = 0.05;
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double tau = -0.5 + 2.0 * i / 2000.0;
    const double v = smooth_step(tau, theta);
    CHECK(v >= theta);
    CHECK(v <= 1.0);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("smooth step derivatives match finite differences") {
  auto rg = rng(1);
  std::uniform_real_distribution<double> ut(0.03, 0.97);
  for (int i = 0; i < 300; ++i) {
    const double tau = ut(rg);
    const double h = 1e-6;
    const StepEval e = smooth_step_eval(tau, 0.1);
    const double d1_fd = (smooth_step(tau + h, 0.1) - smooth_step(tau - h, 0.1)) / (2 * h);
    const double d2_fd =
        (smooth_step_eval(tau + h, 0.1).d1 - smooth_step_eval(tau - h, 0.1).d1) / (2 * h);
    CHECK(rel_err(e.d1, d1_fd, 1e-9) < 1e-5);
    CHECK(rel_err(e.d2, d2_fd, 1e-6) < 1e-4);
  }
}

TEST_CASE("bump branch values") {
  ObstacleSpec obs;
  obs.shape = {0.1, 1.0, 2.0};
  obs.center = Path2::fixed(Vec2(3.0, -1.0));
  const Vec2 c(3.0, -1.0);
  CHECK(bump_value(obs, 0.0, c + Vec2(1.0, 0.0)) == 0.1);            // on the unsafe boundary
  CHECK(bump_value(obs, 0.0, c + Vec2(0.3, 0.0)) == 0.1);            // inside
  CHECK(bump_value(obs, 0.0, c + Vec2(2.0, 0.0)) == 1.0);            // sensing boundary
  CHECK(bump_value(obs, 0.0, c + Vec2(0.0, 5.0)) == 1.0);            // far outside
  const double mid = std::sqrt((1.0 + 4.0) / 2.0);                   // tau = 1/2
  CHECK(bump_value(obs, 0.0, c + Vec2(mid, 0.0)) == doctest::Approx(0.55).epsilon(1e-13));
}

TEST_CASE("bump derivatives vanish outside the band and inside the obstacle") {
  ObstacleSpec obs;
  obs.shape = {0.05, 0.75, 1.5};
  obs.center = Path2::line(Vec2(2.0, 0.0), Vec2(0.0, 0.25));
  for (const Vec2& u : {Vec2(2.0, 0.0), Vec2(0.0, -3.0), Vec2(0.5, 0.1), Vec2(-0.3, 0.2)}) {
    const double t = 1.7;
    const Vec2 x = obs.center.position(t) + u;
    const BumpEval e = bump_eval(obs, t, x);
    const double d = u.norm();
    if (d >= obs.shape.s || d <= obs.shape.r) {
      CHECK(e.grad == Vec2::Zero());
      CHECK(e.hess_diag == Vec2::Zero());
      CHECK(e.dt == 0.0);
    }
  }
}

TEST_CASE("bump gradient and Hessian diagonal match finite differences") {
  ObstacleSpec obs;
  obs.shape = {0.1, 1.0, 2.0};
  obs.center = Path2::fixed(Vec2(0.0, 0.0));
  auto rg = rng(2);
  std::uniform_real_distribution<double> ur(1.03, 1.97), ua(0.0, 2 * kPi);
  auto f = [&](const Vec2& x) { return bump_value(obs, 0.0, x); };
  for (int i = 0; i < 1000; ++i) {
    const double d = ur(rg), a = ua(rg);
    const Vec2 x(d * std::cos(a), d * std::sin(a));
    const BumpEval e = bump_eval(obs, 0.0, x);
    CHECK(rel_err(fd_gradient(f, x), e.grad) < 1e-5);
    const Vec2 hess_fd(
        (bump_grad(obs, 0, x + Vec2(1e-5, 0)).x() - bump_grad(obs, 0, x - Vec2(1e-5, 0)).x()) /
            2e-5,
        (bump_grad(obs, 0, x + Vec2(0, 1e-5)).y() - bump_grad(obs, 0, x - Vec2(0, 1e-5)).y()) /
            2e-5);
    CHECK(rel_err(hess_fd, e.hess_diag, 1e-6) < 1e-3);
  }
}

TEST_CASE("bump time derivative matches central differences for a moving obstacle") {
  ObstacleSpec obs;
  obs.shape = {0.05, 0.75, 1.5};
  obs.center = Path2::sinusoid(Vec2(6.0, -6.0), Vec2(0.0, 0.15), Vec2(0.1, 0.0), Vec2::Zero(), 1.0);
  auto rg = rng(3);
  std::uniform_real_distribution<double> ur(0.8, 1.45), ua(0.0, 2 * kPi), ut(0.0, 50.0);
  for (int i = 0; i < 400; ++i) {
    const double t = ut(rg), d = ur(rg), a = ua(rg);
    const Vec2 x = obs.center.position(t) + d * Vec2(std::cos(a), std::sin(a));
    const double want = bump_dt(obs, t, x);
    const double got = fd_time([&](double tt) { return bump_value(obs, tt, x); }, t);
    CHECK(std::abs(got - want) < 1e-5 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("one-sided derivative estimates at the seams shrink with h") {
  ObstacleSpec obs;
  obs.shape = {0.1, 1.0, 2.0};
  obs.center = Path2::fixed(Vec2::Zero());
  for (double seam : {1.0, 2.0}) {
    double prev = 1e9;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double inner = bump_value(obs, 0, Vec2(seam - h, 0.0));
      const double outer = bump_value(obs, 0, Vec2(seam + h, 0.0));
      const double base = bump_value(obs, 0, Vec2(seam, 0.0));
      const double one_sided =
          std::max(std::abs(outer - base), std::abs(base - inner)) / h;
      CHECK(one_sided <= prev + 1e-12);
      prev = one_sided;
    }
    CHECK(prev < 1e-6);  // essentially flat at the seam
  }
}

TEST_CASE("bump range, radial monotonicity and translation covariance") {
  ObstacleSpec obs;
  obs.shape = {0.05, 0.75, 1.5};
  obs.center = Path2::fixed(Vec2(1.0, 2.0));
  auto rg = rng(4);
  std::uniform_real_distribution<double> ur(0.0, 3.0), ua(0.0, 2 * kPi), ud(-5.0, 5.0);
  double prev_d = 0.0, prev_v = obs.shape.theta;
  for (int i = 0; i < 10000; ++i) {
    const double d = ur(rg), a = ua(rg);
    const Vec2 x = Vec2(1.0, 2.0) + d * Vec2(std::cos(a), std::sin(a));
    const double v = bump_value(obs, 0.0, x);
    CHECK(v >= obs.shape.theta);
    CHECK(v <= 1.0);
    // translation covariance
    const Vec2 shift(ud(rg), ud(rg));
    ObstacleSpec moved = obs;
    moved.center = Path2::fixed(Vec2(1.0, 2.0) + shift);
    CHECK(bump_value(moved, 0.0, x + shift) == v);
    (void)prev_d;
    (void)prev_v;
  }
  // radial monotonicity on a sorted sweep
  double last = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double d = 3.0 * i / 600.0;
    const double v = bump_value(obs, 0.0, Vec2(1.0 + d, 2.0));
    if (i > 0) CHECK(v >= last - 1e-15);
    last = v;
  }
}

TEST_CASE("parametric paths expose consistent velocities") {
  auto rg = rng(5);
  std::uniform_real_distribution<double> ut(0.0, 20.0);
  const Path2 paths[] = {
      Path2::line(Vec2(1, 2), Vec2(-0.3, 0.4)),
      Path2::sinusoid(Vec2(0, 1), Vec2(0.1, 0), Vec2(0.5, 0), Vec2(0, 0.25), 1.3),
      Path2::circle(Vec2(2, -1), 1.5, 0.7, 0.3),
      Path2::custom([](double t) { return Vec2(std::sin(0.5 * t), t * t * 0.01); }),
  };
  for (const auto& p : paths) {
    for (int i = 0; i < 50; ++i) {
      const double t = ut(rg);
      const Vec2 v_fd = (p.position(t + 1e-6) - p.position(t - 1e-6)) / 2e-6;
      CHECK((p.velocity(t) - v_fd).norm() < 1e-5 * std::max(1.0, v_fd.norm()));
    }
  }
  CHECK(Path2::fixed(Vec2(1, 1)).is_static());
  CHECK(!paths[0].is_static());
}

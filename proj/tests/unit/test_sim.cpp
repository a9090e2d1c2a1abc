#include <doctest.h>

#include <cmath>

#include "densnav/sim.hpp"
#include "oracles.hpp"

using namespace densnav;
using namespace densnav::test;

namespace {

Scenario simple_scenario() {
  Scenario sc;
  sc.workspace = {Vec2(-3, -5), Vec2(12, 5)};
  sc.target = Path2::fixed(Vec2(8, 0));
  sc.start = Vec2(0, 0.3);
  sc.alpha = 0.2;
  sc.beta = 10.0;
  sc.theta = 0.05;
  sc.kappa = 1.0;
  sc.horizon = 40.0;
  sc.initial_region = {Vec2(0, 0), 1.0};
  return sc;
}

bool logs_equal(const TrajectoryLog& a, const TrajectoryLog& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].pos != b.steps[i].pos) return false;
    if (a.steps[i].u != b.steps[i].u) return false;
    if (a.steps[i].rho != b.steps[i].rho) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("simulation is deterministic") {
  Scenario sc = simple_scenario();
  ObstacleSpec o;
  o.shape = {0.05, 0.8, 1.6};
  o.center = Path2::line(Vec2(4, -2), Vec2(0, 0.1));
  sc.obstacles.push_back(o);
  const TrajectoryLog a = simulate(sc);
  const TrajectoryLog b = simulate(sc);
  CHECK(logs_equal(a, b));
}

TEST_CASE("zero gain freezes a static scenario") {
  Scenario sc = simple_scenario();
  sc.beta = 0.0;
  sc.horizon = 2.0;
  const TrajectoryLog log = simulate(sc);
  for (const auto& s : log.steps) CHECK(s.pos == sc.start);
}

TEST_CASE("RK4 refinement converges at fourth order on a smooth scenario") {
  auto final_pos = [&](double dt) {
    Scenario sc = simple_scenario();
    sc.dt = dt;
    sc.log_dt = dt;
    sc.horizon = 5.0;  // stop before convergence so the endpoint is smooth
    sc.monitors.convergence_radius = 1e-9;
    const TrajectoryLog log = simulate(sc);
    return log.steps.back().pos;
  };
  const double e1 = (final_pos(0.04) - final_pos(0.02)).norm();
  const double e2 = (final_pos(0.02) - final_pos(0.01)).norm();
  CHECK(e2 < e1 / 8.0);  // ~16x for a 4th-order scheme
}

TEST_CASE("obstacle-free run converges straight to the target") {
  const Scenario sc = simple_scenario();
  const TrajectoryLog log = simulate(sc);
  CHECK(log.summary.converged);
  CHECK(log.summary.min_psi == 1.0);
  for (const auto& s : log.steps) CHECK(std::abs(s.pos.y()) <= 0.31);
}

TEST_CASE("two far-apart agents behave like solo runs") {
  Scenario sc = simple_scenario();
  sc.model = RobotModel::kSingleIntegrator;
  AgentSetup a;
  a.spec = {0.5, 2.0, Vec2(5, 0), 0.2, 10.0, 0.05, 1.0};
  a.start = Vec2(0, 0);
  AgentSetup b;
  b.spec = {0.5, 2.0, Vec2(100, 100), 0.2, 10.0, 0.05, 1.0};
  b.start = Vec2(95, 95);
  sc.agents = {a, b};
  sc.workspace = {Vec2(-5, -5), Vec2(120, 120)};
  sc.horizon = 30.0;
  const std::vector<AgentState> snap = {{a.start, Vec2::Zero()}, {b.start, Vec2::Zero()}};
  const auto controls = multiagent_step_controls(sc, snap, 0.0);

  DistanceFn d;
  d.target = Path2::fixed(a.spec.target);
  d.kappa = 1.0;
  const DensityField solo(FieldMode::kStatic, {}, d, 0.2, 10.0);
  CHECK((controls[0] - solo.beta() * solo.rho_grad(0.0, a.start)).norm() == 0.0);
}

TEST_CASE("agent order permutation permutes the controls") {
  Scenario sc = simple_scenario();
  AgentSetup a;
  a.spec = {0.5, 2.0, Vec2(4, 0), 0.2, 10.0, 0.05, 1.0};
  a.start = Vec2(0, 0.2);
  AgentSetup b;
  b.spec = {0.5, 2.0, Vec2(-4, 0), 0.2, 10.0, 0.05, 1.0};
  b.start = Vec2(1.5, -0.2);
  sc.agents = {a, b};
  const std::vector<AgentState> snap = {{a.start, Vec2(0.1, 0)}, {b.start, Vec2(-0.2, 0)}};
  const auto c1 = multiagent_step_controls(sc, snap, 0.0);
  Scenario swapped = sc;
  swapped.agents = {b, a};
  const std::vector<AgentState> snap2 = {snap[1], snap[0]};
  const auto c2 = multiagent_step_controls(swapped, snap2, 0.0);
  CHECK((c1[0] - c2[1]).norm() == 0.0);
  CHECK((c1[1] - c2[0]).norm() == 0.0);
}

TEST_CASE("removing an agent that is never sensed leaves the other logs unchanged") {
  Scenario sc = simple_scenario();
  sc.workspace = {Vec2(-5, -5), Vec2(60, 60)};
  sc.model = RobotModel::kSingleIntegrator;
  sc.horizon = 10.0;
  AgentSetup a;
  a.spec = {0.5, 2.0, Vec2(5, 0), 0.2, 10.0, 0.05, 1.0};
  a.start = Vec2(0, 0.2);
  AgentSetup b;
  b.spec = {0.5, 2.0, Vec2(0, 5), 0.2, 10.0, 0.05, 1.0};
  b.start = Vec2(1.2, -0.4);
  AgentSetup far;
  far.spec = {0.5, 2.0, Vec2(55, 55), 0.2, 10.0, 0.05, 1.0};
  far.start = Vec2(50, 50);
  sc.agents = {a, b, far};
  const auto with = simulate_agents(sc);
  Scenario without = sc;
  without.agents = {a, b};
  const auto wo = simulate_agents(without);
  REQUIRE(with[0].steps.size() == wo[0].steps.size());
  for (size_t i = 0; i < with[0].steps.size(); ++i) {
    CHECK(with[0].steps[i].pos == wo[0].steps[i].pos);
    CHECK(with[1].steps[i].pos == wo[1].steps[i].pos);
  }
}

TEST_CASE("occupancy of the whole workspace is the stopped time") {
  Scenario sc = simple_scenario();
  // Initial region with unit area so the volume factor drops out.
  sc.initial_region = {Vec2(0, 0), 1.0 / std::sqrt(kPi)};
  const RegionFn everywhere = [](double, const Vec2&) { return true; };
  const OccupancyResult r = estimate_occupancy(sc, everywhere, 1, 7);
  Scenario one = sc;
  one.start = sample_initial_conditions(sc, 1, 7)[0];
  one.log_dt = one.dt;
  const TrajectoryLog log = simulate(one);
  CHECK(r.occupancy == doctest::Approx(log.summary.end_time).epsilon(0.01));
}

TEST_CASE("dwell time near the target grows once trajectories reach it") {
  Scenario sc = simple_scenario();
  const Vec2 target(8, 0);
  const RegionFn ball = [target](double, const Vec2& x) { return (x - target).norm() < 0.3; };
  Scenario shorter = sc;
  shorter.horizon = 10.0;  // not yet at the target
  const double d_short = estimate_occupancy(shorter, ball, 8, 3).occupancy;
  const double d_long = estimate_occupancy(sc, ball, 8, 3).occupancy;
  CHECK(d_short == 0.0);
  CHECK(d_long > d_short);
}

TEST_CASE("Monte-Carlo error shrinks with the sample count") {
  Scenario sc = simple_scenario();
  sc.horizon = 12.0;
  const Vec2 target(8, 0);
  const RegionFn half = [](double, const Vec2& x) { return x.y() > 0.0; };
  auto stddev = [&](int n, uint64_t base_seed) {
    double sum = 0, sum2 = 0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      const double v = estimate_occupancy(sc, half, n, base_seed + r).occupancy;
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / reps;
    return std::sqrt(std::max(0.0, sum2 / reps - mean * mean));
  };
  const double s1 = stddev(8, 100);
  const double s2 = stddev(32, 900);  // 4x samples: expect ~2x smaller error
  CHECK(s2 < s1);
  CHECK(s1 / s2 > 1.2);
  CHECK(s1 / s2 < 4.0);
}

TEST_CASE("a.e. sampling on an obstacle-free scenario converges everywhere") {
  Scenario sc = simple_scenario();
  const AeResult r = ae_convergence_sample(sc, 50, 11);
  CHECK(r.fraction == 1.0);
  CHECK(r.failures.empty());
}

TEST_CASE("scenario validation rejects broken setups") {
  Scenario sc = simple_scenario();
  sc.theta = 1.5;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = simple_scenario();
  sc.dt = -0.01;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = simple_scenario();
  ObstacleSpec o;
  o.shape = {0.05, 1.0, 2.0};
  o.center = Path2::fixed(sc.start);  // start inside the unsafe set
  sc.obstacles.push_back(o);
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = simple_scenario();
  AgentSetup a, b;
  a.spec.radius = b.spec.radius = 0.5;
  a.start = Vec2(0, 0);
  b.start = Vec2(0.6, 0);  // overlapping disks
  sc.agents = {a, b};
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("min clearance in the summary matches the logged minimum") {
  Scenario sc = simple_scenario();
  ObstacleSpec o;
  o.shape = {0.05, 0.8, 1.6};
  o.center = Path2::fixed(Vec2(4, 0.4));
  sc.obstacles.push_back(o);
  sc.log_dt = sc.dt;  // keep every internal step
  const TrajectoryLog log = simulate(sc);
  double mn = 1e18;
  for (const auto& s : log.steps)
    for (double c : s.clearance) mn = std::min(mn, c);
  CHECK(log.summary.min_clearance == doctest::Approx(mn).epsilon(1e-12));
}

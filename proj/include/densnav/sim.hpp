#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "densnav/control.hpp"
#include "densnav/density.hpp"

namespace densnav {

enum class RobotModel { kSingleIntegrator, kDoubleIntegrator, kUnicycle };
enum class ControllerKind { kGradient, kBackstepping, kSFM };

struct MonitorSettings {
  double convergence_radius = 0.1;
  double convergence_hold = 1.0;  // seconds the radius must be held
  std::optional<double> u_max;    // infinity-norm saturation, if set
};

struct AgentSetup {
  AgentSpec spec;
  Vec2 start = Vec2::Zero();
  double heading = 0.0;  // unicycle initial heading
};

struct Scenario {
  Box workspace;
  std::vector<ObstacleSpec> obstacles;  // environment obstacles
  Path2 target = Path2::fixed(Vec2::Zero());
  Vec2 start = Vec2::Zero();
  double start_heading = 0.0;

  double alpha = 0.2;
  double beta = 10.0;
  double theta = 0.05;
  double kappa = 1.0;
  bool reciprocal_distance = false;

  RobotModel model = RobotModel::kSingleIntegrator;
  ControllerKind controller = ControllerKind::kGradient;
  double K_heading = 10.0;       // unicycle heading gain
  double K_backstepping = 1.0;   // velocity-tracking gain
  double bubble_margin = 0.0;    // added to pairwise exclusion radii
  SFMParams sfm;

  std::vector<AgentSetup> agents;  // non-empty: multi-agent scenario

  double dt = 0.01;
  double horizon = 60.0;
  double log_dt = 0.1;
  MonitorSettings monitors;

  Disc initial_region{Vec2::Zero(), 1.0};  // X_0 for the sampling commands
  double delta = 1e-3;                     // X_1 exclusion radius (certification)

  bool multi_agent() const { return !agents.empty(); }
  /// Field mode implied by what moves. Throws if both obstacles and target move.
  FieldMode field_mode() const;
  /// Environment density field for the single-robot case.
  DensityField make_field() const;
  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct LogStep {
  double t = 0.0;
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();      // double integrator / unicycle body velocity
  double heading = 0.0;         // unicycle
  Vec2 u = Vec2::Zero();        // planar control (or accel for 2nd-order models)
  double rho = 0.0;
  double psi = 1.0;
  std::vector<double> clearance;  // per obstacle/other agent: distance to unsafe boundary
  bool saturated = false;
  bool in_workspace = true;
};

struct RunSummary {
  bool converged = false;
  double time_to_converge = std::numeric_limits<double>::quiet_NaN();
  double min_clearance = std::numeric_limits<double>::infinity();
  double min_rho = std::numeric_limits<double>::infinity();
  double min_psi = std::numeric_limits<double>::infinity();
  double control_total_variation = 0.0;
  double heading_total_variation = 0.0;
  double max_u_inf = 0.0;
  bool exited_workspace = false;
  bool aborted_nonfinite = false;
  long abort_step = -1;
  double end_time = 0.0;
};

struct TrajectoryLog {
  double log_dt = 0.1;
  std::vector<LogStep> steps;
  RunSummary summary;
};

/// Fixed-step RK4 closed-loop rollout of a single-robot scenario.
TrajectoryLog simulate(const Scenario& sc);

/// Synchronous multi-agent rollout; one log per agent.
std::vector<TrajectoryLog> simulate_agents(const Scenario& sc);

/// Integrator-level controls for all agents from one state snapshot.
std::vector<Vec2> multiagent_step_controls(const Scenario& sc,
                                           const std::vector<AgentState>& states, double t);

/// Occupancy-measure estimate (Monte Carlo over initial conditions) of the
/// indicator region, plus a per-cell dwell grid for export.
struct OccupancyGrid {
  Box box;
  int nx = 0;
  int ny = 0;
  std::vector<double> cells;  // row-major, cells[iy*nx+ix]
};

struct OccupancyResult {
  double occupancy = 0.0;  // scaled by the volume of X_0
  OccupancyGrid grid;
};

using RegionFn = std::function<bool(double t, const Vec2& x)>;

/// Indicator of "inside any unsafe set at time t" for this scenario.
RegionFn unsafe_region(const Scenario& sc);

OccupancyResult estimate_occupancy(const Scenario& sc, const RegionFn& region, int n_samples,
                                   uint64_t seed, int grid_nx = 100, int grid_ny = 100);

struct AeResult {
  double fraction = 0.0;
  std::vector<Vec2> failures;
};

/// Almost-everywhere convergence sampling: simulate from n initial conditions
/// drawn uniformly from X_0 (excluding unsafe sets) and report the converged
/// fraction plus failing initial conditions.
AeResult ae_convergence_sample(const Scenario& sc, int n_samples, uint64_t seed);

/// Draw initial conditions uniformly from the scenario's initial region,
/// rejecting points inside an unsafe set at t = 0.
std::vector<Vec2> sample_initial_conditions(const Scenario& sc, int n, uint64_t seed);

void write_log_csv(const TrajectoryLog& log, const std::string& path);
void write_occupancy_csv(const OccupancyGrid& grid, const std::string& path);

}  // namespace densnav

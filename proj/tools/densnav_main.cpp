// Command-line front end: scenario simulation, certification, occupancy
// sampling, SFM comparison, and the two-link arm pipeline.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "densnav/arm_pipeline.hpp"
#include "densnav/certify.hpp"
#include "densnav/scenario_io.hpp"
#include "densnav/sim.hpp"

using namespace densnav;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitUnsafe = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitOutOfRange = 4;

json summary_to_json(const RunSummary& s) {
  json j;
  j["converged"] = s.converged;
  j["time_to_converge"] = s.converged ? json(s.time_to_converge) : json(nullptr);
  j["min_clearance"] = s.min_clearance;
  j["min_rho"] = s.min_rho;
  j["min_psi"] = s.min_psi;
  j["control_total_variation"] = s.control_total_variation;
  j["heading_total_variation"] = s.heading_total_variation;
  j["max_u_inf"] = s.max_u_inf;
  j["exited_workspace"] = s.exited_workspace;
  j["aborted_nonfinite"] = s.aborted_nonfinite;
  j["end_time"] = s.end_time;
  return j;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open " + p.string());
  out << text;
}

int run_simulate(const std::string& config, const std::string& out_dir, double dt_override) {
  LoadedConfig cfg = load_config(config);
  if (!cfg.has_scenario) {
    std::cerr << "config error: no robot/agent scenario in " << config << "\n";
    return kExitConfig;
  }
  if (dt_override > 0.0) cfg.scenario.dt = dt_override;
  fs::create_directories(out_dir);
  json j;
  bool safe = true, converged = true;
  if (cfg.scenario.multi_agent()) {
    const auto logs = simulate_agents(cfg.scenario);
    for (size_t k = 0; k < logs.size(); ++k) {
      write_log_csv(logs[k], (fs::path(out_dir) / ("agent_" + std::to_string(k) + ".csv")).string());
      j["agents"].push_back(summary_to_json(logs[k].summary));
      safe = safe && logs[k].summary.min_clearance > 0.0 && !logs[k].summary.aborted_nonfinite;
      converged = converged && logs[k].summary.converged;
    }
  } else {
    const TrajectoryLog log = simulate(cfg.scenario);
    write_log_csv(log, (fs::path(out_dir) / "trajectory.csv").string());
    j["run"] = summary_to_json(log.summary);
    safe = log.summary.min_clearance > 0.0 && !log.summary.aborted_nonfinite;
    converged = log.summary.converged;
  }
  j["safe"] = safe;
  j["all_converged"] = converged;
  write_text(fs::path(out_dir) / "summary.json", j.dump(2) + "\n");
  if (!safe) return kExitUnsafe;
  if (!converged) return kExitNotConverged;
  return kExitOk;
}

int run_certify(const std::string& config, const std::string& out_path, int grid_n,
                int time_samples) {
  LoadedConfig cfg = load_config(config);
  if (!cfg.has_scenario) {
    std::cerr << "config error: no robot scenario in " << config << "\n";
    return kExitConfig;
  }
  const Scenario& sc = cfg.scenario;
  if (sc.multi_agent() || sc.controller != ControllerKind::kGradient) {
    std::cerr << "config error: certification needs a single-robot gradient scenario\n";
    return kExitConfig;
  }
  const DensityField field = sc.make_field();

  CertificateReport rep;
  rep.alpha = sc.alpha;
  rep.beta = sc.beta;
  const AssumptionConstants consts =
      estimate_constants(field, sc.workspace, grid_n, 0.0, sc.horizon, 20);
  const AppendixCoeffs p = appendix_coeffs(consts);
  rep.p1 = p.p1;
  rep.p2 = p.p2;
  rep.p3 = p.p3;
  rep.L1 = compute_L1(consts, sc.alpha);
  rep.alpha_min = alpha_range(consts);
  try {
    rep.beta_min = beta_range(consts, sc.alpha);
    rep.beta_min_defined = true;
  } catch (const std::domain_error&) {
    rep.beta_min_defined = false;
    rep.notes += "L1 <= 0 at the scenario alpha; beta_min undefined. ";
  }
  if (std::abs(rep.p2) < 1e-9 * std::max(1.0, rep.p3))
    rep.notes += "p2 ~ 0: alpha_min uses the quadratic-root formula sqrt(p3/p1). ";

  const Lemma1Result l1 =
      check_lemma1(field, sc.workspace, grid_n, grid_n, time_samples, 0.0, sc.horizon);
  rep.lemma1_margin = l1.margin;
  rep.margin_argmin = l1.argmin;
  rep.margin_argmin_t = l1.argmin_t;
  rep.lemma1_integral_finite = l1.integral_finite;
  rep.tail_exponent = l1.tail_exponent;
  if (l1.excluded_points > 0)
    std::cerr << "warning: " << l1.excluded_points
              << " grid points inside the target exclusion ball were skipped\n";

  const Disc Z{sc.initial_region.center, sc.initial_region.radius};
  rep.liouville_residual =
      liouville_residual(field, Z, 0.0, 1.0, 1e-3, 2000, sc.workspace, 2024).residual;

  if (!out_path.empty()) {
    const fs::path parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_text(out_path, rep.to_json());
  } else {
    std::cout << rep.to_json();
  }
  const bool ok = rep.lemma1_margin > 0.0 && rep.alpha_in_range() && rep.beta_in_range();
  if (!ok) {
    std::cerr << "certification not satisfied:";
    if (!(rep.lemma1_margin > 0.0)) std::cerr << " lemma1_margin<=0";
    if (!rep.alpha_in_range()) std::cerr << " alpha<alpha_min";
    if (!rep.beta_in_range()) std::cerr << " beta<beta_min";
    std::cerr << "\n";
    return kExitOutOfRange;
  }
  return kExitOk;
}

int run_occupancy(const std::string& config, const std::string& out_dir, int samples,
                  uint64_t seed, int grid_n) {
  LoadedConfig cfg = load_config(config);
  if (!cfg.has_scenario) {
    std::cerr << "config error: no robot scenario in " << config << "\n";
    return kExitConfig;
  }
  fs::create_directories(out_dir);
  const auto unsafe = unsafe_region(cfg.scenario);
  const OccupancyResult res =
      estimate_occupancy(cfg.scenario, unsafe, samples, seed, grid_n, grid_n);
  write_occupancy_csv(res.grid, (fs::path(out_dir) / "occupancy_grid.csv").string());
  json j;
  j["unsafe_occupancy"] = res.occupancy;
  j["samples"] = samples;
  j["seed"] = seed;
  write_text(fs::path(out_dir) / "occupancy.json", j.dump(2) + "\n");
  std::cout << "unsafe-set occupancy: " << res.occupancy << "\n";
  return kExitOk;
}

int run_ae(const std::string& config, const std::string& out_path, int samples, uint64_t seed) {
  LoadedConfig cfg = load_config(config);
  if (!cfg.has_scenario) {
    std::cerr << "config error: no robot scenario in " << config << "\n";
    return kExitConfig;
  }
  const AeResult res = ae_convergence_sample(cfg.scenario, samples, seed);
  json j;
  j["fraction_converged"] = res.fraction;
  j["samples"] = samples;
  j["seed"] = seed;
  j["failures"] = json::array();
  for (const auto& f : res.failures) j["failures"].push_back({f.x(), f.y()});
  if (!out_path.empty())
    write_text(out_path, j.dump(2) + "\n");
  else
    std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int run_compare_sfm(const std::string& config, const std::string& out_dir) {
  LoadedConfig cfg = load_config(config);
  if (!cfg.has_scenario || !cfg.scenario.multi_agent() ||
      cfg.scenario.model != RobotModel::kDoubleIntegrator) {
    std::cerr << "config error: compare-sfm needs a multi-agent double-integrator scenario\n";
    return kExitConfig;
  }
  fs::create_directories(out_dir);
  json j;
  double tv[2] = {0.0, 0.0};
  bool safe = true, converged = true;
  const char* names[2] = {"density", "sfm"};
  const ControllerKind kinds[2] = {ControllerKind::kBackstepping, ControllerKind::kSFM};
  for (int c = 0; c < 2; ++c) {
    Scenario sc = cfg.scenario;
    sc.controller = kinds[c];
    const auto logs = simulate_agents(sc);
    double min_clear = std::numeric_limits<double>::infinity();
    double worst_final = 0.0;
    for (size_t k = 0; k < logs.size(); ++k) {
      write_log_csv(logs[k], (fs::path(out_dir) /
                              (std::string(names[c]) + "_agent_" + std::to_string(k) + ".csv"))
                                 .string());
      j[names[c]]["agents"].push_back(summary_to_json(logs[k].summary));
      tv[c] += logs[k].summary.heading_total_variation;
      min_clear = std::min(min_clear, logs[k].summary.min_clearance);
      worst_final = std::max(
          worst_final, (logs[k].steps.back().pos - sc.agents[k].spec.target).norm());
    }
    j[names[c]]["heading_total_variation"] = tv[c];
    j[names[c]]["min_clearance"] = min_clear;
    j[names[c]]["worst_final_distance"] = worst_final;
    safe = safe && min_clear > 0.0;
    converged = converged && worst_final <= 0.2;
  }
  j["density_smoother"] = tv[0] < tv[1];
  write_text(fs::path(out_dir) / "comparison.json", j.dump(2) + "\n");
  std::cout << "heading total variation: density=" << tv[0] << " sfm=" << tv[1] << "\n";
  if (!safe) return kExitUnsafe;
  if (!converged) return kExitNotConverged;
  return kExitOk;
}

int run_arm_cmd(const std::string& config, const std::string& out_dir) {
  LoadedConfig cfg = load_config(config);
  if (!cfg.arm) {
    std::cerr << "config error: no [arm] section in " << config << "\n";
    return kExitConfig;
  }
  fs::create_directories(out_dir);
  const ArmRunResult res = run_arm_pipeline(*cfg.arm);
  {
    std::ofstream out(fs::path(out_dir) / "tracking.csv");
    out << "t,q1,q2,qd1,qd2,ref1,ref2,target1,target2,tau1,tau2,ee_x,ee_y,ee_clearance,"
           "track_err,in_window\n";
    out.precision(10);
    for (const auto& s : res.steps)
      out << s.t << ',' << s.q.x() << ',' << s.q.y() << ',' << s.qdot.x() << ',' << s.qdot.y()
          << ',' << s.q_ref.x() << ',' << s.q_ref.y() << ',' << s.q_target.x() << ','
          << s.q_target.y() << ',' << s.torque.x() << ',' << s.torque.y() << ',' << s.ee.x()
          << ',' << s.ee.y() << ',' << s.ee_clearance << ',' << s.track_err << ','
          << (s.in_window ? 1 : 0) << "\n";
  }
  json j;
  j["joint_obstacles"] = json::array();
  for (const auto& d : res.joint_obstacles)
    j["joint_obstacles"].push_back({{"center", {d.center.x(), d.center.y()}},
                                    {"radius", d.radius}});
  j["coverage"] = res.coverage;
  j["min_ee_clearance"] = res.min_ee_clearance;
  j["max_track_err"] = res.max_track_err;
  j["max_track_err_outside_windows"] = res.max_track_err_outside;
  j["max_target_err_outside_windows"] = res.max_target_err_outside;
  j["window"] = {res.window_lo, res.window_hi};
  write_text(fs::path(out_dir) / "arm_summary.json", j.dump(2) + "\n");
  std::cout << "arm: min ee clearance " << res.min_ee_clearance << ", max tracking error "
            << res.max_track_err << "\n";
  if (!(res.min_ee_clearance > 0.0)) return kExitUnsafe;
  if (!(res.max_track_err_outside < 0.05)) return kExitNotConverged;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-based safe navigation in dynamic environments"};
  app.require_subcommand(1);

  std::string config, out;
  int samples = 100;
  uint64_t seed = 0;
  double dt = -1.0;
  int grid_n = 200;
  int time_samples = 50;

  auto* sim = app.add_subcommand("simulate", "roll out a scenario and write logs");
  sim->add_option("--config", config)->required();
  sim->add_option("--out", out)->required();
  sim->add_option("--dt", dt);

  auto* cert = app.add_subcommand("certify", "check the convergence/avoidance conditions");
  cert->add_option("--config", config)->required();
  cert->add_option("--out", out);
  cert->add_option("--grid", grid_n);
  cert->add_option("--time-samples", time_samples);

  auto* occ = app.add_subcommand("occupancy", "Monte-Carlo occupancy estimate");
  occ->add_option("--config", config)->required();
  occ->add_option("--out", out)->required();
  occ->add_option("--samples", samples);
  occ->add_option("--seed", seed);
  occ->add_option("--grid", grid_n);

  auto* ae = app.add_subcommand("ae", "almost-everywhere convergence sampling");
  ae->add_option("--config", config)->required();
  ae->add_option("--out", out);
  ae->add_option("--samples", samples);
  ae->add_option("--seed", seed);

  auto* cmp = app.add_subcommand("compare-sfm", "density vs social-force comparison");
  cmp->add_option("--config", config)->required();
  cmp->add_option("--out", out)->required();

  auto* arm = app.add_subcommand("arm", "two-link arm planning and tracking pipeline");
  arm->add_option("--config", config)->required();
  arm->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(config, out, dt);
    if (cert->parsed()) return run_certify(config, out, grid_n, time_samples);
    if (occ->parsed()) return run_occupancy(config, out, samples, seed, grid_n);
    if (ae->parsed()) return run_ae(config, out, samples, seed);
    if (cmp->parsed()) return run_compare_sfm(config, out);
    if (arm->parsed()) return run_arm_cmd(config, out);
  } catch (const toml::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

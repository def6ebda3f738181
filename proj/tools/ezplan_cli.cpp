// Command-line front end: planning, scenario generation, plan verification,
// dynamic-zone snapshots, Monte Carlo sweeps, and standalone Dubins queries.
// All outputs are files (JSON/CSV) intended for external plotting; runs with
// --seed and iteration budgets are byte-reproducible.
//
// Exit codes: 0 solved/ok, 1 usage or input error, 2 no solution in budget
// (or a failed verification).

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ezplan/ezplan.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoSolution = 2;

std::vector<double> parse_doubles(const std::string& csv, std::size_t expected,
                                  const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "'" + item + "' is not a number");
    }
  }
  if (expected != 0 && values.size() != expected)
    throw CLI::ValidationError(what, "expected " + std::to_string(expected) +
                                         " comma-separated values, got " +
                                         std::to_string(values.size()));
  return values;
}

ezplan::Configuration parse_config(const std::string& csv, const std::string& what) {
  const auto v = parse_doubles(csv, 3, what);
  return ezplan::Configuration(v[0], v[1], v[2]);
}

struct PlannerFlags {
  double steer_step = -1.0;
  double goal_bias = -1.0;
  double check_step = -1.0;
  double goal_pos_tol = -1.0;
  double goal_ang_tol = -1.0;
  double gamma = -1.0;
  double heading_weight = -2.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--steer-step", steer_step, "Steering hop arc length [LU]");
    cmd.add_option("--goal-bias", goal_bias, "Probability of sampling the goal");
    cmd.add_option("--check-step", check_step, "Collision sampling resolution [LU]");
    cmd.add_option("--goal-pos-tol", goal_pos_tol, "Goal position tolerance [LU]");
    cmd.add_option("--goal-ang-tol", goal_ang_tol, "Goal heading tolerance [rad]");
    cmd.add_option("--gamma", gamma, "Rewiring neighborhood radius scale");
    cmd.add_option("--heading-weight", heading_weight,
                   "Heading weight of the lifted metric [LU/rad]; negative = turn radius");
  }
  void apply(ezplan::PlannerParams& p) const {
    if (steer_step > 0.0) p.steer_step = steer_step;
    if (goal_bias >= 0.0) p.goal_bias = goal_bias;
    if (check_step > 0.0) p.check_step = check_step;
    if (goal_pos_tol > 0.0) p.goal_pos_tol = goal_pos_tol;
    if (goal_ang_tol > 0.0) p.goal_ang_tol = goal_ang_tol;
    if (gamma > 0.0) p.near_radius_gamma = gamma;
    if (heading_weight > -2.0) p.heading_weight = heading_weight;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Risk-aware Dubins path planning around engagement zones"};
  app.require_subcommand(1);

  // --- plan ---------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "Plan a path for a scenario file");
  std::string plan_scenario, plan_out, plan_trajectory;
  std::uint64_t plan_iters = 0, plan_seed = 0;
  double plan_secs = 0.0, traj_dt = 0.005;
  PlannerFlags plan_flags;
  plan_cmd->add_option("--scenario", plan_scenario, "Scenario JSON file")->required();
  auto* iters_opt = plan_cmd->add_option("--budget-iters", plan_iters, "Iteration budget");
  auto* secs_opt = plan_cmd->add_option("--budget-secs", plan_secs, "Wall-clock budget [s]");
  iters_opt->excludes(secs_opt);
  plan_cmd->add_option("--seed", plan_seed, "Planner RNG seed");
  plan_cmd->add_option("--out", plan_out, "Plan result JSON output")->required();
  plan_cmd->add_option("--trajectory", plan_trajectory, "Optional sampled trajectory CSV");
  plan_cmd->add_option("--traj-dt", traj_dt, "Trajectory sampling period [TU]");
  plan_flags.add_to(*plan_cmd);

  // --- scenario -----------------------------------------------------------
  auto* scen_cmd = app.add_subcommand("scenario", "Generate a randomized scenario");
  int scen_zones = 16;
  std::uint64_t scen_seed = 0;
  std::string scen_out, scen_start = "0,0,0", scen_goal = "1,1,0", scen_domain = "0,0,1,1";
  double scen_rmax = 0.15, scen_v = 1.0, scen_radius = 0.1;
  scen_cmd->add_option("--n-zones", scen_zones, "Number of engagement zones")->required();
  scen_cmd->add_option("--seed", scen_seed, "Generator seed")->required();
  scen_cmd->add_option("--out", scen_out, "Scenario JSON output")->required();
  scen_cmd->add_option("--r-max", scen_rmax, "Zone maximum range [LU]");
  scen_cmd->add_option("--v", scen_v, "Vehicle speed [LU/TU]");
  scen_cmd->add_option("--turn-radius", scen_radius, "Vehicle turn radius [LU]");
  scen_cmd->add_option("--start", scen_start, "Start configuration 'x,y,psi'");
  scen_cmd->add_option("--goal", scen_goal, "Goal configuration 'x,y,psi'");
  scen_cmd->add_option("--domain", scen_domain, "Operating region 'xmin,ymin,xmax,ymax'");

  // --- verify ---------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "Replay a plan against the dynamics");
  std::string verify_scenario, verify_plan_file, verify_out;
  double verify_dt = 0.001;
  verify_cmd->add_option("--scenario", verify_scenario, "Scenario JSON file")->required();
  verify_cmd->add_option("--plan", verify_plan_file, "Plan result JSON file")->required();
  verify_cmd->add_option("--time-step", verify_dt, "Integration step [TU]");
  verify_cmd->add_option("--out", verify_out, "Verification report JSON output");

  // --- snapshot -------------------------------------------------------
  auto* snap_cmd = app.add_subcommand("snapshot", "Export dynamic zone shapes at times");
  std::string snap_scenario, snap_plan, snap_out, snap_times;
  double snap_res = 1.0;
  snap_cmd->add_option("--scenario", snap_scenario, "Scenario JSON file")->required();
  snap_cmd->add_option("--plan", snap_plan, "Plan result JSON file")->required();
  snap_cmd->add_option("--times", snap_times, "Comma-separated times [TU]")->required();
  snap_cmd->add_option("--out", snap_out, "Snapshot CSV output")->required();
  snap_cmd->add_option("--resolution-deg", snap_res, "Angular resolution [deg]");

  // --- mc -------------------------------------------------------------
  auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo benchmark sweep");
  std::string mc_preset = "desk", mc_config, mc_csv, mc_jsonl;
  int mc_workers = 0, mc_trials = 0;
  std::uint64_t mc_base_seed = 0;
  bool mc_have_seed = false;
  mc_cmd->add_option("--preset", mc_preset, "Preset: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  mc_cmd->add_option("--config", mc_config, "Experiment config JSON (overrides --preset)");
  mc_cmd->add_option("--out-csv", mc_csv, "Aggregate CSV output")->required();
  mc_cmd->add_option("--out-jsonl", mc_jsonl, "Per-trial JSONL log");
  mc_cmd->add_option("--workers", mc_workers, "Parallel workers");
  mc_cmd->add_option("--trials", mc_trials, "Trials per zone count (override)");
  mc_cmd->add_option("--base-seed", mc_base_seed, "Base seed (override)")
      ->each([&](const std::string&) { mc_have_seed = true; });

  // --- dubins ---------------------------------------------------------
  auto* dubins_cmd = app.add_subcommand("dubins", "Shortest Dubins path between two states");
  std::string dubins_from, dubins_to, dubins_out;
  double dubins_radius = 0.1;
  dubins_cmd->add_option("--from", dubins_from, "Start 'x,y,psi'")->required();
  dubins_cmd->add_option("--to", dubins_to, "Goal 'x,y,psi'")->required();
  dubins_cmd->add_option("--turn-radius", dubins_radius, "Turn radius [LU]");
  dubins_cmd->add_option("--out", dubins_out, "Optional JSON output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the diagnostic
    return code == 0 ? kExitOk : kExitError;
  }

  if (plan_cmd->parsed()) {
    if (iters_opt->count() == 0 && secs_opt->count() == 0) {
      std::cerr << "plan: one of --budget-iters or --budget-secs is required\n";
      return kExitError;
    }
    const ezplan::Scenario scenario = ezplan::load_scenario(plan_scenario);
    ezplan::PlannerParams params;
    params.rng_seed = plan_seed;
    if (iters_opt->count() > 0) {
      params.max_iterations = plan_iters;
    } else {
      params.time_budget = plan_secs;
      params.max_iterations = std::numeric_limits<std::uint64_t>::max();
    }
    plan_flags.apply(params);
    const ezplan::PlanResult result = ezplan::plan(scenario, params);
    ezplan::write_plan_result(result, plan_out);
    if (result.status == ezplan::PlanStatus::solved) {
      if (!plan_trajectory.empty())
        ezplan::write_trajectory_csv(result, scenario, traj_dt, plan_trajectory);
      std::cout << "solved: cost " << result.cost << " TU, " << result.iterations
                << " iterations, " << result.nodes_in_tree << " nodes\n";
      return kExitOk;
    }
    std::cout << "no solution within budget (" << result.iterations << " iterations, "
              << result.nodes_in_tree << " nodes)\n";
    return kExitNoSolution;
  }

  if (scen_cmd->parsed()) {
    ezplan::ScenarioParams params;
    params.r_max = scen_rmax;
    params.v = scen_v;
    params.turn_radius = scen_radius;
    params.start = parse_config(scen_start, "--start");
    params.goal = parse_config(scen_goal, "--goal");
    const auto d = parse_doubles(scen_domain, 4, "--domain");
    params.domain = ezplan::Domain{d[0], d[1], d[2], d[3]};
    const ezplan::Scenario s = ezplan::generate_scenario(scen_zones, scen_seed, params);
    ezplan::save_scenario(s, scen_out);
    std::cout << "wrote " << scen_out << " (" << s.zones.size() << " zones, seed " << s.seed
              << ")\n";
    return kExitOk;
  }

  if (verify_cmd->parsed()) {
    const ezplan::Scenario scenario = ezplan::load_scenario(verify_scenario);
    const ezplan::PlanResult result = ezplan::load_plan_result(verify_plan_file);
    const ezplan::VerificationReport report = ezplan::verify_plan(result, scenario, verify_dt);
    if (!verify_out.empty()) ezplan::write_report(report, verify_out);
    std::cout << "dynamics_ok=" << report.dynamics_ok
              << " (max position defect " << report.max_position_defect << ")\n"
              << "boundary_ok=" << report.boundary_ok << '\n'
              << "domain_ok=" << report.domain_ok << '\n'
              << "ez_ok=" << report.ez_ok << " (min slack " << report.min_ez_slack << ")\n"
              << (report.pass() ? "PASS" : "FAIL") << '\n';
    return report.pass() ? kExitOk : kExitNoSolution;
  }

  if (snap_cmd->parsed()) {
    const ezplan::Scenario scenario = ezplan::load_scenario(snap_scenario);
    const ezplan::PlanResult result = ezplan::load_plan_result(snap_plan);
    std::vector<ezplan::Snapshot> snaps;
    for (const double t : parse_doubles(snap_times, 0, "--times"))
      snaps.push_back(ezplan::snapshot(result, scenario, t, snap_res));
    ezplan::write_snapshot_csv(snaps, snap_out);
    std::cout << "wrote " << snap_out << " (" << snaps.size() << " snapshots)\n";
    return kExitOk;
  }

  if (mc_cmd->parsed()) {
    ezplan::ExperimentConfig cfg = !mc_config.empty() ? ezplan::load_experiment_config(mc_config)
                                   : mc_preset == "paper" ? ezplan::paper_preset()
                                                          : ezplan::desk_preset();
    if (mc_workers > 0) cfg.parallel_workers = mc_workers;
    if (mc_trials > 0) cfg.trials_per_count = mc_trials;
    if (mc_have_seed) cfg.base_seed = mc_base_seed;
    const ezplan::ExperimentResults results = ezplan::run_experiment(cfg);
    const std::string summary = ezplan::summarize(results, mc_csv);
    if (!mc_jsonl.empty()) ezplan::write_trials_jsonl(results, mc_jsonl);
    std::cout << summary << "replaced scenarios during screening: " << results.replaced_scenarios
              << "\n";
    return kExitOk;
  }

  if (dubins_cmd->parsed()) {
    const ezplan::DubinsPath path = ezplan::shortest_path(
        parse_config(dubins_from, "--from"), parse_config(dubins_to, "--to"), dubins_radius);
    const ezplan::ojson j = ezplan::to_json(path);
    if (dubins_out.empty())
      std::cout << j.dump(2) << '\n';
    else
      ezplan::detail::write_file(j, dubins_out, "dubins");
    std::cerr << "word " << ezplan::to_string(path.word) << ", length " << path.total_length
              << " LU\n";
    return kExitOk;
  }

  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

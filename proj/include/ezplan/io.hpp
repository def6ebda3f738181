#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ezplan/dubins.hpp"
#include "ezplan/ez_geometry.hpp"
#include "ezplan/montecarlo.hpp"
#include "ezplan/planner.hpp"
#include "ezplan/scenario.hpp"
#include "ezplan/verify.hpp"

namespace ezplan {

// File formats. All JSON documents carry a versioned "schema" field and use
// insertion-ordered keys so identical inputs produce byte-identical files.
using ojson = nlohmann::ordered_json;

inline constexpr const char* kScenarioSchema = "ezplan.scenario.v1";
inline constexpr const char* kPlanResultSchema = "ezplan.plan_result.v1";
inline constexpr const char* kVerifyReportSchema = "ezplan.verify_report.v1";
inline constexpr const char* kExperimentConfigSchema = "ezplan.experiment_config.v1";

namespace detail {

template <typename T>
T require_field(const ojson& j, const std::string& field, const std::string& context) {
  const auto it = j.find(field);
  if (it == j.end())
    throw std::runtime_error(context + ": missing field '" + field + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error(context + ": field '" + field + "' has the wrong type");
  }
}

inline void check_schema(const ojson& j, const std::string& expected, const std::string& context) {
  if (!j.is_object()) throw std::runtime_error(context + ": not a JSON object");
  if (j.contains("schema") && j.at("schema") != expected)
    throw std::runtime_error(context + ": unexpected schema '" +
                             j.at("schema").dump() + "', wanted '" + expected + "'");
}

inline ojson parse_file(const std::string& path, const std::string& context) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(context + ": cannot open '" + path + "'");
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(context + ": parse error in '" + path + "': " + e.what());
  }
}

inline void write_file(const ojson& j, const std::string& path, const std::string& context) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(context + ": cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out.flush()) throw std::runtime_error(context + ": write to '" + path + "' failed");
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline ojson to_json(const Configuration& c) {
  return ojson{{"x", c.x}, {"y", c.y}, {"psi", c.psi}};
}

inline Configuration configuration_from_json(const ojson& j, const std::string& ctx) {
  return Configuration(detail::require_field<double>(j, "x", ctx),
                       detail::require_field<double>(j, "y", ctx),
                       detail::require_field<double>(j, "psi", ctx));
}

inline ojson to_json(const EngagementZone& z) {
  return ojson{{"x", z.x}, {"y", z.y}, {"r_max", z.r_max}, {"r_min", z.r_min}};
}

inline EngagementZone zone_from_json(const ojson& j, const std::string& ctx) {
  return EngagementZone{detail::require_field<double>(j, "x", ctx),
                        detail::require_field<double>(j, "y", ctx),
                        detail::require_field<double>(j, "r_max", ctx),
                        detail::require_field<double>(j, "r_min", ctx)};
}

inline ojson to_json(const Domain& d) {
  return ojson{{"xmin", d.xmin}, {"ymin", d.ymin}, {"xmax", d.xmax}, {"ymax", d.ymax}};
}

inline Domain domain_from_json(const ojson& j, const std::string& ctx) {
  return Domain{detail::require_field<double>(j, "xmin", ctx),
                detail::require_field<double>(j, "ymin", ctx),
                detail::require_field<double>(j, "xmax", ctx),
                detail::require_field<double>(j, "ymax", ctx)};
}

inline ojson to_json(const Scenario& s) {
  ojson zones = ojson::array();
  for (const auto& z : s.zones) zones.push_back(to_json(z));
  return ojson{{"schema", kScenarioSchema},
               {"domain", to_json(s.domain)},
               {"vehicle", ojson{{"v", s.vehicle.v}, {"u_max", s.vehicle.u_max}}},
               {"zones", std::move(zones)},
               {"start", to_json(s.start)},
               {"goal", to_json(s.goal)},
               {"seed", s.seed}};
}

inline Scenario scenario_from_json(const ojson& j) {
  const std::string ctx = "scenario";
  detail::check_schema(j, kScenarioSchema, ctx);
  Scenario s;
  s.domain = domain_from_json(detail::require_field<ojson>(j, "domain", ctx), ctx + ".domain");
  const ojson vj = detail::require_field<ojson>(j, "vehicle", ctx);
  s.vehicle.v = detail::require_field<double>(vj, "v", ctx + ".vehicle");
  s.vehicle.u_max = detail::require_field<double>(vj, "u_max", ctx + ".vehicle");
  const ojson zones = detail::require_field<ojson>(j, "zones", ctx);
  if (!zones.is_array()) throw std::runtime_error(ctx + ": field 'zones' must be an array");
  for (std::size_t i = 0; i < zones.size(); ++i)
    s.zones.push_back(zone_from_json(zones[i], ctx + ".zones[" + std::to_string(i) + "]"));
  s.start = configuration_from_json(detail::require_field<ojson>(j, "start", ctx), ctx + ".start");
  s.goal = configuration_from_json(detail::require_field<ojson>(j, "goal", ctx), ctx + ".goal");
  s.seed = detail::require_field<std::uint64_t>(j, "seed", ctx);
  validate(s);
  return s;
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  detail::write_file(to_json(s), path, "save_scenario");
}

inline Scenario load_scenario(const std::string& path) {
  return scenario_from_json(detail::parse_file(path, "load_scenario"));
}

inline ojson to_json(const DubinsPath& p) {
  return ojson{{"word", to_string(p.word)},
               {"params", p.params},
               {"start", to_json(p.start)},
               {"turn_radius", p.turn_radius},
               {"length", p.total_length}};
}

inline DubinsPath dubins_from_json(const ojson& j, const std::string& ctx) {
  DubinsPath p;
  const auto word = dubins_word_from_string(detail::require_field<std::string>(j, "word", ctx));
  if (!word) throw std::runtime_error(ctx + ": field 'word' is not a valid Dubins word");
  p.word = *word;
  const auto params = detail::require_field<std::vector<double>>(j, "params", ctx);
  if (params.size() != 3) throw std::runtime_error(ctx + ": field 'params' must have 3 entries");
  std::copy(params.begin(), params.end(), p.params.begin());
  p.start = configuration_from_json(detail::require_field<ojson>(j, "start", ctx), ctx + ".start");
  p.turn_radius = detail::require_field<double>(j, "turn_radius", ctx);
  p.total_length = detail::require_field<double>(j, "length", ctx);
  return p;
}

inline ojson to_json(const PlanResult& r) {
  ojson first = nullptr;
  const bool iter_budget = r.budget_kind == BudgetKind::iterations;
  if (!r.cost_history.empty()) {
    // "time" is the budget clock: iterations under iteration budgets (exact
    // and reproducible), wall seconds under wall-clock budgets.
    first = ojson{{"time", iter_budget ? static_cast<double>(r.first_solution_iteration)
                                       : r.first_solution_time},
                  {"cost", r.first_solution_cost}};
  }
  ojson history = ojson::array();
  for (const auto& ev : r.cost_history)
    history.push_back(ojson::array(
        {iter_budget ? static_cast<double>(ev.iteration) : ev.time, ev.cost}));
  ojson edges = ojson::array();
  for (const auto& e : r.path) edges.push_back(to_json(e));
  return ojson{{"schema", kPlanResultSchema},
               {"status", to_string(r.status)},
               {"cost", r.status == PlanStatus::solved ? ojson(r.cost) : ojson(nullptr)},
               {"iterations", r.iterations},
               {"nodes", r.nodes_in_tree},
               {"first_solution", std::move(first)},
               {"cost_history", std::move(history)},
               {"edges", std::move(edges)},
               {"budget_mode", iter_budget ? "iterations" : "seconds"}};
}

/// Reads back the fields verification and snapshotting need; the anytime
/// history is not reconstructed.
inline PlanResult plan_result_from_json(const ojson& j) {
  const std::string ctx = "plan_result";
  detail::check_schema(j, kPlanResultSchema, ctx);
  PlanResult r;
  const std::string status = detail::require_field<std::string>(j, "status", ctx);
  if (status == "solved")
    r.status = PlanStatus::solved;
  else if (status == "infeasible_budget_exhausted")
    r.status = PlanStatus::infeasible_budget_exhausted;
  else
    throw std::runtime_error(ctx + ": unknown status '" + status + "'");
  if (j.contains("cost") && j.at("cost").is_number()) r.cost = j.at("cost").get<double>();
  r.iterations = detail::require_field<std::uint64_t>(j, "iterations", ctx);
  r.nodes_in_tree = detail::require_field<std::uint64_t>(j, "nodes", ctx);
  const ojson edges = detail::require_field<ojson>(j, "edges", ctx);
  if (!edges.is_array()) throw std::runtime_error(ctx + ": field 'edges' must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i)
    r.path.push_back(dubins_from_json(edges[i], ctx + ".edges[" + std::to_string(i) + "]"));
  const std::string mode = detail::require_field<std::string>(j, "budget_mode", ctx);
  r.budget_kind = mode == "seconds" ? BudgetKind::seconds : BudgetKind::iterations;
  return r;
}

inline void write_plan_result(const PlanResult& r, const std::string& path) {
  detail::write_file(to_json(r), path, "write_plan_result");
}

inline PlanResult load_plan_result(const std::string& path) {
  return plan_result_from_json(detail::parse_file(path, "load_plan_result"));
}

inline ojson to_json(const VerificationReport& r) {
  return ojson{{"schema", kVerifyReportSchema},
               {"pass", r.pass()},
               {"dynamics_ok", r.dynamics_ok},
               {"max_position_defect", r.max_position_defect},
               {"boundary_ok", r.boundary_ok},
               {"domain_ok", r.domain_ok},
               {"ez_ok", r.ez_ok},
               {"min_ez_slack", std::isnan(r.min_ez_slack) ? ojson(nullptr) : ojson(r.min_ez_slack)},
               {"time_step", r.time_step}};
}

inline void write_report(const VerificationReport& r, const std::string& path) {
  detail::write_file(to_json(r), path, "write_report");
}

inline ojson to_json(const ExperimentConfig& c) {
  return ojson{{"schema", kExperimentConfigSchema},
               {"zone_counts", c.zone_counts},
               {"trials_per_count", c.trials_per_count},
               {"budget_mode", c.budget_kind == BudgetKind::iterations ? "iterations" : "seconds"},
               {"budgets", c.budgets},
               {"base_seed", c.base_seed},
               {"parallel_workers", c.parallel_workers},
               {"scenario",
                ojson{{"r_max", c.scenario.r_max},
                      {"v", c.scenario.v},
                      {"turn_radius", c.scenario.turn_radius},
                      {"domain", to_json(c.scenario.domain)},
                      {"start", to_json(c.scenario.start)},
                      {"goal", to_json(c.scenario.goal)}}},
               {"planner",
                ojson{{"steer_step", c.planner.steer_step},
                      {"goal_pos_tol", c.planner.goal_pos_tol},
                      {"goal_ang_tol", c.planner.goal_ang_tol},
                      {"goal_bias", c.planner.goal_bias},
                      {"near_radius_gamma", c.planner.near_radius_gamma},
                      {"check_step", c.planner.check_step},
                      {"heading_weight", c.planner.heading_weight}}}};
}

inline ExperimentConfig experiment_config_from_json(const ojson& j) {
  const std::string ctx = "experiment_config";
  detail::check_schema(j, kExperimentConfigSchema, ctx);
  ExperimentConfig c;
  c.zone_counts = detail::require_field<std::vector<int>>(j, "zone_counts", ctx);
  c.trials_per_count = detail::require_field<int>(j, "trials_per_count", ctx);
  const std::string mode = detail::require_field<std::string>(j, "budget_mode", ctx);
  if (mode != "iterations" && mode != "seconds")
    throw std::runtime_error(ctx + ": budget_mode must be 'iterations' or 'seconds'");
  c.budget_kind = mode == "seconds" ? BudgetKind::seconds : BudgetKind::iterations;
  c.budgets = detail::require_field<std::vector<double>>(j, "budgets", ctx);
  c.base_seed = detail::require_field<std::uint64_t>(j, "base_seed", ctx);
  if (j.contains("parallel_workers"))
    c.parallel_workers = detail::require_field<int>(j, "parallel_workers", ctx);
  if (j.contains("scenario")) {
    const ojson sj = j.at("scenario");
    const std::string sctx = ctx + ".scenario";
    if (sj.contains("r_max")) c.scenario.r_max = detail::require_field<double>(sj, "r_max", sctx);
    if (sj.contains("v")) c.scenario.v = detail::require_field<double>(sj, "v", sctx);
    if (sj.contains("turn_radius"))
      c.scenario.turn_radius = detail::require_field<double>(sj, "turn_radius", sctx);
    if (sj.contains("domain")) c.scenario.domain = domain_from_json(sj.at("domain"), sctx + ".domain");
    if (sj.contains("start")) c.scenario.start = configuration_from_json(sj.at("start"), sctx + ".start");
    if (sj.contains("goal")) c.scenario.goal = configuration_from_json(sj.at("goal"), sctx + ".goal");
  }
  if (j.contains("planner")) {
    const ojson pj = j.at("planner");
    const std::string pctx = ctx + ".planner";
    if (pj.contains("steer_step")) c.planner.steer_step = detail::require_field<double>(pj, "steer_step", pctx);
    if (pj.contains("goal_pos_tol")) c.planner.goal_pos_tol = detail::require_field<double>(pj, "goal_pos_tol", pctx);
    if (pj.contains("goal_ang_tol")) c.planner.goal_ang_tol = detail::require_field<double>(pj, "goal_ang_tol", pctx);
    if (pj.contains("goal_bias")) c.planner.goal_bias = detail::require_field<double>(pj, "goal_bias", pctx);
    if (pj.contains("near_radius_gamma"))
      c.planner.near_radius_gamma = detail::require_field<double>(pj, "near_radius_gamma", pctx);
    if (pj.contains("check_step")) c.planner.check_step = detail::require_field<double>(pj, "check_step", pctx);
    if (pj.contains("heading_weight"))
      c.planner.heading_weight = detail::require_field<double>(pj, "heading_weight", pctx);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(detail::parse_file(path, "load_experiment_config"));
}

/// Per-trial JSONL log: one object per line in trial order.
inline void write_trials_jsonl(const ExperimentResults& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trials_jsonl: cannot open '" + path + "'");
  for (const auto& rec : results.trials) {
    ojson budgets = ojson::array();
    for (const auto& pb : rec.budgets)
      budgets.push_back(ojson{{"budget", pb.budget},
                              {"solved", pb.solved},
                              {"cost", pb.solved ? ojson(pb.cost) : ojson(nullptr)}});
    out << ojson{{"n_zones", rec.n_zones},
                 {"trial", rec.trial},
                 {"scenario_seed", rec.scenario_seed},
                 {"discarded_scenarios", rec.discarded_scenarios},
                 {"budgets", std::move(budgets)}}
               .dump()
        << '\n';
  }
  if (!out.flush()) throw std::runtime_error("write_trials_jsonl: write to '" + path + "' failed");
}

/// Sampled trajectory CSV with rows (t, x, y, psi, u); the final row is at
/// exactly the plan duration.
inline void write_trajectory_csv(const PlanResult& r, const Scenario& scenario, double dt,
                                 const std::string& path) {
  if (r.status != PlanStatus::solved)
    throw std::invalid_argument("write_trajectory_csv: plan is not solved");
  if (!(dt > 0.0)) throw std::invalid_argument("write_trajectory_csv: dt must be positive");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open '" + path + "'");

  // Flatten the per-edge schedules into one global timeline.
  struct Piece {
    double t_end;
    double u;
  };
  std::vector<Piece> pieces;
  double duration = 0.0;
  for (const auto& edge : r.path) {
    const ControlSchedule s = control_profile(edge, scenario.vehicle);
    for (const auto& iv : s.intervals) {
      if (iv.duration <= 0.0) continue;
      duration += iv.duration;
      pieces.push_back({duration, iv.u});
    }
  }
  const auto u_at = [&](double t) {
    for (const auto& p : pieces)
      if (t < p.t_end) return p.u;
    return pieces.empty() ? 0.0 : pieces.back().u;
  };

  out << "t,x,y,psi,u\n";
  const auto emit = [&](double t) {
    const Configuration c =
        config_along(r.path, scenario.start, std::min(scenario.vehicle.v * t, scenario.vehicle.v * duration));
    out << detail::fmt17(t) << ',' << detail::fmt17(c.x) << ',' << detail::fmt17(c.y) << ','
        << detail::fmt17(c.psi) << ',' << detail::fmt17(u_at(t)) << '\n';
  };
  for (std::size_t i = 0; static_cast<double>(i) * dt < duration; ++i)
    emit(static_cast<double>(i) * dt);
  emit(duration);
  if (!out.flush()) throw std::runtime_error("write_trajectory_csv: write to '" + path + "' failed");
}

/// Snapshot CSV: rows (t, zone_id, theta, x, y); each snapshot also carries
/// one aircraft row with zone_id = -1 and theta = psi.
inline void write_snapshot_csv(const std::vector<Snapshot>& snapshots, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot_csv: cannot open '" + path + "'");
  out << "t,zone_id,theta,x,y\n";
  for (const auto& snap : snapshots) {
    out << detail::fmt17(snap.t) << ",-1," << detail::fmt17(snap.aircraft.psi) << ','
        << detail::fmt17(snap.aircraft.x) << ',' << detail::fmt17(snap.aircraft.y) << '\n';
    for (const auto& zone : snap.zones)
      for (const auto& pt : zone.points)
        out << detail::fmt17(snap.t) << ',' << zone.zone_id << ',' << detail::fmt17(pt[0]) << ','
            << detail::fmt17(pt[1]) << ',' << detail::fmt17(pt[2]) << '\n';
  }
  if (!out.flush()) throw std::runtime_error("write_snapshot_csv: write to '" + path + "' failed");
}

/// Cross-section CSV for one zone: rows (psi_plane, lambda, rho) sweeping
/// lambda over [0, 2*pi) on each requested heading plane.
inline void write_cross_section_csv(const EngagementZone& ez, const std::vector<double>& psi_planes,
                                    int n_lambda, const std::string& path) {
  if (n_lambda < 1) throw std::invalid_argument("write_cross_section_csv: n_lambda must be >= 1");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_cross_section_csv: cannot open '" + path + "'");
  out << "psi_plane,lambda,rho\n";
  for (const double psi : psi_planes)
    for (int i = 0; i < n_lambda; ++i) {
      const double lambda = kTwoPi * i / n_lambda;
      out << detail::fmt17(psi) << ',' << detail::fmt17(lambda) << ','
          << detail::fmt17(obstacle_cross_section(lambda, psi, ez)) << '\n';
    }
  if (!out.flush())
    throw std::runtime_error("write_cross_section_csv: write to '" + path + "' failed");
}

}  // namespace ezplan

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ezplan/planner.hpp"
#include "ezplan/rng.hpp"
#include "ezplan/scenario.hpp"

namespace ezplan {

/// Batch experiment description: sweep zone counts and planning budgets over
/// many seeded scenarios. Budgets are iteration counts (hardware-independent,
/// reproducible) or wall-clock seconds; they must be sorted ascending.
struct ExperimentConfig {
  std::vector<int> zone_counts{4, 8, 16};
  int trials_per_count = 50;
  BudgetKind budget_kind = BudgetKind::iterations;
  std::vector<double> budgets{2000, 5000, 10000, 20000, 50000};
  std::uint64_t base_seed = 1;
  PlannerParams planner;      // per-trial seed/budget fields are overridden
  ScenarioParams scenario;
  int parallel_workers = 1;
  int max_scenario_attempts = 100;
};

/// Desk-scale defaults: small sweep that runs in minutes.
inline ExperimentConfig desk_preset() { return ExperimentConfig{}; }

/// Full-scale wall-clock sweep mirroring a workstation study; expect hours.
inline ExperimentConfig paper_preset() {
  ExperimentConfig c;
  c.zone_counts = {4, 8, 20, 24};
  c.trials_per_count = 500;
  c.budget_kind = BudgetKind::seconds;
  c.budgets = {5, 10, 20, 40, 60, 80, 100, 120, 140, 160};
  return c;
}

inline void validate(const ExperimentConfig& c) {
  if (c.trials_per_count < 1)
    throw std::invalid_argument("ExperimentConfig: trials_per_count must be >= 1");
  if (c.budgets.empty()) throw std::invalid_argument("ExperimentConfig: no budgets");
  for (std::size_t i = 0; i + 1 < c.budgets.size(); ++i)
    if (!(c.budgets[i] < c.budgets[i + 1]))
      throw std::invalid_argument("ExperimentConfig: budgets must be sorted ascending");
  for (const double b : c.budgets)
    if (!(b > 0.0)) throw std::invalid_argument("ExperimentConfig: budgets must be positive");
  for (const int n : c.zone_counts)
    if (n < 0) throw std::invalid_argument("ExperimentConfig: zone counts must be >= 0");
  if (c.parallel_workers < 1)
    throw std::invalid_argument("ExperimentConfig: parallel_workers must be >= 1");
}

struct TrialRecord {
  int n_zones = 0;
  int trial = 0;
  std::uint64_t scenario_seed = 0;
  int discarded_scenarios = 0;  // screening replacements before this one
  struct PerBudget {
    double budget = 0.0;
    bool solved = false;
    double cost = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<PerBudget> budgets;
};

struct AggregateRow {
  int n_zones = 0;
  double budget = 0.0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_cost = std::numeric_limits<double>::quiet_NaN();  // over successes
  double cost_std = std::numeric_limits<double>::quiet_NaN();   // sample std over successes
};

struct ExperimentResults {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;   // ordered by (zone count position, trial)
  std::vector<AggregateRow> rows;    // ordered by (zone count position, budget)
  int replaced_scenarios = 0;
};

namespace detail {

/// Deterministic per-trial seed; stable in isolation so any trial can be
/// reproduced without running the whole sweep.
inline std::uint64_t trial_seed(std::uint64_t base, int n_zones, int trial, int attempt) {
  return mix_seed(base, static_cast<std::uint64_t>(n_zones),
                  static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(attempt));
}

/// One trial under iteration budgets: a single run at the largest budget,
/// reading the smaller budgets off nested snapshots of the same RNG stream.
/// A separate run at a smaller budget with the same seed would execute the
/// identical iteration prefix, so the snapshots coincide with it. A scenario
/// unsolved at the largest (screening) budget is discarded and regenerated,
/// which makes the screening-budget success rate 1 by construction.
inline TrialRecord run_trial_iterations(const ExperimentConfig& cfg, int n_zones, int trial) {
  TrialRecord rec;
  rec.n_zones = n_zones;
  rec.trial = trial;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= cfg.max_scenario_attempts)
      throw std::runtime_error("run_experiment: no feasible scenario after " +
                               std::to_string(cfg.max_scenario_attempts) + " attempts (N=" +
                               std::to_string(n_zones) + ", trial " + std::to_string(trial) + ")");
    const std::uint64_t seed = trial_seed(cfg.base_seed, n_zones, trial, attempt);
    const Scenario scenario = generate_scenario(n_zones, seed, cfg.scenario);

    PlannerParams pp = cfg.planner;
    pp.rng_seed = mix_seed(seed, 0x706c616eULL);  // decorrelate from scenario stream
    pp.max_iterations = static_cast<std::uint64_t>(cfg.budgets.back());
    pp.time_budget = std::numeric_limits<double>::infinity();

    PlanHooks hooks;
    for (const double b : cfg.budgets)
      hooks.snapshot_iters.push_back(static_cast<std::uint64_t>(b));

    const PlanResult res = plan(scenario, pp, hooks);
    if (res.status != PlanStatus::solved) {
      rec.discarded_scenarios++;
      continue;
    }
    rec.scenario_seed = seed;
    for (const auto& snap : res.snapshots)
      rec.budgets.push_back({static_cast<double>(snap.iterations), snap.solved, snap.cost});
    return rec;
  }
}

/// One trial under wall-clock budgets: the screening run uses the largest
/// budget; accepted scenarios are then re-planned at every budget.
inline TrialRecord run_trial_seconds(const ExperimentConfig& cfg, int n_zones, int trial) {
  TrialRecord rec;
  rec.n_zones = n_zones;
  rec.trial = trial;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= cfg.max_scenario_attempts)
      throw std::runtime_error("run_experiment: no feasible scenario after " +
                               std::to_string(cfg.max_scenario_attempts) + " attempts");
    const std::uint64_t seed = trial_seed(cfg.base_seed, n_zones, trial, attempt);
    const Scenario scenario = generate_scenario(n_zones, seed, cfg.scenario);

    PlannerParams pp = cfg.planner;
    pp.rng_seed = mix_seed(seed, 0x706c616eULL);
    pp.max_iterations = std::numeric_limits<std::uint64_t>::max();

    pp.time_budget = cfg.budgets.back();
    const PlanResult screening = plan(scenario, pp, {});
    if (screening.status != PlanStatus::solved) {
      rec.discarded_scenarios++;
      continue;
    }
    rec.scenario_seed = seed;
    for (std::size_t i = 0; i + 1 < cfg.budgets.size(); ++i) {
      pp.time_budget = cfg.budgets[i];
      const PlanResult res = plan(scenario, pp, {});
      rec.budgets.push_back({cfg.budgets[i], res.status == PlanStatus::solved, res.cost});
    }
    rec.budgets.push_back({cfg.budgets.back(), true, screening.cost});
    return rec;
  }
}

}  // namespace detail

/// Runs the full sweep. Trials are independent, individually seeded, and
/// distributed over a worker pool; records land in a pre-sized table and
/// aggregation runs afterwards in a fixed order, so results do not depend
/// on the worker count.
inline ExperimentResults run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  validate(cfg.planner);

  ExperimentResults results;
  results.config = cfg;
  const std::size_t n_trials = cfg.zone_counts.size() * static_cast<std::size_t>(cfg.trials_per_count);
  results.trials.resize(n_trials);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_trials || failed.load()) break;
      const int n_zones = cfg.zone_counts[task / cfg.trials_per_count];
      const int trial = static_cast<int>(task % cfg.trials_per_count);
      try {
        results.trials[task] = cfg.budget_kind == BudgetKind::iterations
                                   ? detail::run_trial_iterations(cfg, n_zones, trial)
                                   : detail::run_trial_seconds(cfg, n_zones, trial);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure_message = e.what();
        failed.store(true);
        break;
      }
    }
  };

  const int n_workers = std::min<int>(cfg.parallel_workers, static_cast<int>(n_trials));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(failure_message);

  for (const auto& rec : results.trials) results.replaced_scenarios += rec.discarded_scenarios;

  // Aggregates in fixed (zone count, budget) order; means over successes only.
  for (std::size_t zi = 0; zi < cfg.zone_counts.size(); ++zi) {
    for (std::size_t bi = 0; bi < cfg.budgets.size(); ++bi) {
      AggregateRow row;
      row.n_zones = cfg.zone_counts[zi];
      row.budget = cfg.budgets[bi];
      row.trials = cfg.trials_per_count;
      double sum = 0.0, sum_sq = 0.0;
      for (int t = 0; t < cfg.trials_per_count; ++t) {
        const auto& pb = results.trials[zi * cfg.trials_per_count + t].budgets[bi];
        if (!pb.solved) continue;
        row.successes++;
        sum += pb.cost;
        sum_sq += pb.cost * pb.cost;
      }
      row.success_rate = static_cast<double>(row.successes) / row.trials;
      if (row.successes > 0) row.mean_cost = sum / row.successes;
      if (row.successes > 1) {
        const double var =
            (sum_sq - sum * sum / row.successes) / (row.successes - 1);
        row.cost_std = std::sqrt(std::max(0.0, var));
      } else if (row.successes == 1) {
        row.cost_std = 0.0;
      }
      results.rows.push_back(row);
    }
  }
  return results;
}

namespace detail {

/// %.17g prints doubles round-trip exactly, keeping CSV parse-back lossless.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes the aggregate CSV (header row always present) and returns a short
/// human-readable summary, one line per (zone count, budget) cell.
inline std::string summarize(const ExperimentResults& results, const std::string& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("summarize: cannot open '" + csv_path + "' for writing");
  csv << "n_zones,budget,trials,successes,success_rate,mean_cost,cost_std\n";
  std::string text;
  for (const auto& row : results.rows) {
    csv << row.n_zones << ',' << detail::format_double(row.budget) << ',' << row.trials << ','
        << row.successes << ',' << detail::format_double(row.success_rate) << ','
        << detail::format_double(row.mean_cost) << ',' << detail::format_double(row.cost_std)
        << '\n';
    char line[160];
    std::snprintf(line, sizeof(line), "N=%-3d budget=%-8g %3d/%-3d solved (%5.1f%%)  mean cost %.4f (std %.4f)",
                  row.n_zones, row.budget, row.successes, row.trials, 100.0 * row.success_rate,
                  row.mean_cost, row.cost_std);
    text += line;
    text += '\n';
  }
  if (!csv.flush())
    throw std::runtime_error("summarize: write to '" + csv_path + "' failed");
  return text;
}

}  // namespace ezplan

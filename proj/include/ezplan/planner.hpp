#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ezplan/dubins.hpp"
#include "ezplan/ez_geometry.hpp"
#include "ezplan/rng.hpp"
#include "ezplan/scenario.hpp"

namespace ezplan {

/// Planner tuning. Iteration and wall-clock budgets are both honored;
/// whichever is hit first terminates the loop. Tests and reproducible runs
/// use iteration budgets.
struct PlannerParams {
  double steer_step = 0.2;        // LU; arc length of one steering hop
  double goal_pos_tol = 0.01;     // LU
  double goal_ang_tol = 0.05;     // rad
  double goal_bias = 0.05;        // probability of sampling the goal itself
  double near_radius_gamma = 1.0; // scales the shrinking neighborhood radius
  std::uint64_t max_iterations = 100000;
  double time_budget = std::numeric_limits<double>::infinity(); // seconds
  double check_step = 0.005;      // LU; collision sampling resolution
  double heading_weight = -1.0;   // LU/rad; negative means "use the turn radius"
  std::uint64_t rng_seed = 0;
};

inline void validate(const PlannerParams& p) {
  if (!(p.steer_step > 0.0) || !(p.goal_pos_tol > 0.0) || !(p.goal_ang_tol > 0.0) ||
      !(p.near_radius_gamma > 0.0) || !(p.check_step > 0.0) || p.max_iterations == 0 ||
      !(p.time_budget > 0.0))
    throw std::invalid_argument("PlannerParams: budgets, steps and tolerances must be positive");
  if (!(p.goal_bias >= 0.0) || !(p.goal_bias < 1.0))
    throw std::invalid_argument("PlannerParams: goal_bias must be in [0, 1)");
}

/// Search tree over the lifted configuration space. Node 0 is the root
/// (the start configuration); edge[i] is the curvature-bounded path from
/// parent[i] to node i and cost_to_come accumulates edge travel times.
struct Tree {
  std::vector<Configuration> nodes;
  std::vector<std::int32_t> parent;                 // -1 at the root
  std::vector<DubinsPath> edge;                     // edge[0] is unused
  std::vector<double> cost_to_come;                 // TU
  std::vector<std::vector<std::int32_t>> children;

  std::int32_t size() const { return static_cast<std::int32_t>(nodes.size()); }
};

enum class PlanStatus { solved, infeasible_budget_exhausted };

inline const char* to_string(PlanStatus s) {
  return s == PlanStatus::solved ? "solved" : "infeasible_budget_exhausted";
}

enum class BudgetKind { iterations, seconds };

struct CostEvent {
  std::uint64_t iteration = 0;
  double time = 0.0;  // seconds since planning started
  double cost = 0.0;  // TU
};

/// Planner state sampled after a requested iteration count; used by batch
/// experiments to read several nested budgets off a single run.
struct BudgetSnapshot {
  std::uint64_t iterations = 0;
  bool solved = false;
  double cost = std::numeric_limits<double>::quiet_NaN();
};

struct PlanResult {
  PlanStatus status = PlanStatus::infeasible_budget_exhausted;
  std::vector<DubinsPath> path;  // edges in order root -> goal; empty if unsolved
  double cost = std::numeric_limits<double>::quiet_NaN();  // TU
  std::uint64_t iterations = 0;
  std::uint64_t nodes_in_tree = 0;
  double first_solution_cost = std::numeric_limits<double>::quiet_NaN();
  double first_solution_time = std::numeric_limits<double>::quiet_NaN();      // seconds
  std::uint64_t first_solution_iteration = 0;
  std::vector<CostEvent> cost_history;  // recorded on improvement; non-increasing cost
  BudgetKind budget_kind = BudgetKind::iterations;
  std::vector<BudgetSnapshot> snapshots;
};

/// Optional instrumentation for plan(). snapshot_iters must be sorted
/// ascending; on_iteration runs after every loop pass (test hook).
struct PlanHooks {
  std::vector<std::uint64_t> snapshot_iters;
  std::function<void(std::uint64_t iteration, const Tree&)> on_iteration;
};

/// Weighted lifted-space metric: d^2 = dx^2 + dy^2 + (w * wrap(dpsi))^2.
/// The heading weight converts radians to length units; the default scale
/// is the vehicle turn radius.
inline double lifted_distance_sq(const Configuration& a, const Configuration& b,
                                 double heading_weight) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dpsi = heading_weight * wrap_pi(a.psi - b.psi);
  return dx * dx + dy * dy + dpsi * dpsi;
}

inline double lifted_distance(const Configuration& a, const Configuration& b,
                              double heading_weight) {
  return std::sqrt(lifted_distance_sq(a, b, heading_weight));
}

/// Uniform sample over domain x [0, 2*pi), rejected until collision-free.
/// Throws after 10^6 rejected draws (effectively blocked free space).
inline Configuration sample_free(std::span<const EngagementZone> zones, const Domain& domain,
                                 RandomStream& rng) {
  constexpr int kRejectionCap = 1000000;
  for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
    const Configuration c(rng.uniform(domain.xmin, domain.xmax),
                          rng.uniform(domain.ymin, domain.ymax),
                          rng.uniform(0.0, kTwoPi));
    if (config_free(c, zones, domain)) return c;
  }
  throw std::runtime_error("sample_free: rejection cap exceeded; free space looks empty");
}

/// Index of the tree node closest to q in the lifted metric; ties resolve
/// to the lowest index.
inline std::int32_t nearest(const Tree& tree, const Configuration& q, double heading_weight) {
  if (tree.nodes.empty()) throw std::invalid_argument("nearest: tree is empty");
  std::int32_t best = 0;
  double best_dsq = lifted_distance_sq(tree.nodes[0], q, heading_weight);
  for (std::int32_t i = 1; i < tree.size(); ++i) {
    const double dsq = lifted_distance_sq(tree.nodes[i], q, heading_weight);
    if (dsq < best_dsq) {
      best_dsq = dsq;
      best = i;
    }
  }
  return best;
}

/// Shrinking neighborhood radius: r(n) = min(gamma * (log n / n)^(1/3),
/// 2 * steer_step); the exponent matches the three-dimensional lifted space.
inline double near_radius(std::int32_t n, double gamma, double steer_step) {
  if (n <= 1) return 0.0;
  const double nn = static_cast<double>(n);
  return std::min(gamma * std::cbrt(std::log(nn) / nn), 2.0 * steer_step);
}

/// All nodes within near_radius(tree size) of q, plus the nearest node
/// regardless of radius. Indices ascend.
inline std::vector<std::int32_t> near(const Tree& tree, const Configuration& q,
                                      double heading_weight, double gamma,
                                      double steer_step) {
  const double r = near_radius(tree.size(), gamma, steer_step);
  const double rsq = r * r;
  std::vector<std::int32_t> out;
  for (std::int32_t i = 0; i < tree.size(); ++i)
    if (lifted_distance_sq(tree.nodes[i], q, heading_weight) <= rsq) out.push_back(i);
  const std::int32_t nearest_idx = nearest(tree, q, heading_weight);
  if (!std::binary_search(out.begin(), out.end(), nearest_idx)) {
    out.push_back(nearest_idx);
    std::sort(out.begin(), out.end());
  }
  return out;
}

struct SteerResult {
  Configuration q_new;
  DubinsPath edge;
};

/// The shortest Dubins path toward q_to, truncated at steer_step. q_new is
/// the truncation point and always lies on the full path.
inline SteerResult steer(const Configuration& q_from, const Configuration& q_to,
                         double turn_radius, double steer_step) {
  const DubinsPath full = shortest_path(q_from, q_to, turn_radius);
  if (full.total_length <= steer_step) return {q_to, full};
  DubinsPath edge = truncated(full, steer_step);
  return {point_at(full, steer_step), edge};
}

/// Collision/query context shared by the tree operators.
struct PlanContext {
  std::span<const EngagementZone> zones;
  Domain domain;
  double turn_radius = 0.1;
  double v = 1.0;
  double check_step = 0.005;
};

/// Lowest-cost collision-free parent for q_new among the candidates:
/// minimizes cost_to_come + edge duration, ties to the lowest index.
/// Candidates are tried in cost order so collision checks stop at the first
/// free edge. Returns nothing when every candidate edge is blocked.
inline std::optional<std::pair<std::int32_t, DubinsPath>> opt_parent(
    const Tree& tree, std::span<const std::int32_t> near_set, const Configuration& q_new,
    const PlanContext& ctx) {
  if (near_set.empty()) throw std::invalid_argument("opt_parent: empty candidate set");
  struct Candidate {
    double cost;
    std::int32_t index;
    DubinsPath edge;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(near_set.size());
  for (const std::int32_t i : near_set) {
    DubinsPath e = shortest_path(tree.nodes[i], q_new, ctx.turn_radius);
    candidates.push_back({tree.cost_to_come[i] + e.total_length / ctx.v, i, std::move(e)});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.cost != b.cost ? a.cost < b.cost : a.index < b.index;
  });
  for (auto& c : candidates)
    if (segment_free(c.edge, ctx.zones, ctx.domain, ctx.check_step))
      return std::make_pair(c.index, std::move(c.edge));
  return std::nullopt;
}

namespace detail {

inline void detach_from_parent(Tree& tree, std::int32_t node) {
  auto& siblings = tree.children[static_cast<std::size_t>(tree.parent[node])];
  siblings.erase(std::find(siblings.begin(), siblings.end(), node));
}

/// Recompute cost_to_come on the subtree below `root` after its cost changed.
inline void propagate_cost(Tree& tree, std::int32_t root, double v) {
  std::vector<std::int32_t> stack{root};
  while (!stack.empty()) {
    const std::int32_t node = stack.back();
    stack.pop_back();
    for (const std::int32_t child : tree.children[static_cast<std::size_t>(node)]) {
      tree.cost_to_come[child] =
          tree.cost_to_come[node] + tree.edge[child].total_length / v;
      stack.push_back(child);
    }
  }
}

}  // namespace detail

/// Reparent any near node through `new_node` when that strictly lowers its
/// cost-to-come and the new edge is collision-free; subtree costs update.
inline void rewire(Tree& tree, std::span<const std::int32_t> near_set, std::int32_t new_node,
                   const PlanContext& ctx) {
  for (const std::int32_t i : near_set) {
    if (i == new_node || tree.parent[i] < 0) continue;
    DubinsPath e = shortest_path(tree.nodes[new_node], tree.nodes[i], ctx.turn_radius);
    const double new_cost = tree.cost_to_come[new_node] + e.total_length / ctx.v;
    if (new_cost >= tree.cost_to_come[i]) continue;
    if (!segment_free(e, ctx.zones, ctx.domain, ctx.check_step)) continue;
    detail::detach_from_parent(tree, i);
    tree.parent[i] = new_node;
    tree.edge[i] = std::move(e);
    tree.cost_to_come[i] = new_cost;
    tree.children[static_cast<std::size_t>(new_node)].push_back(i);
    detail::propagate_cost(tree, i, ctx.v);
  }
}

namespace detail {

/// Uniform-cell spatial index over the lifted space used to keep nearest /
/// radius queries sublinear as the tree grows. Exact: results match a
/// linear scan, including lowest-index tie breaking. The heading dimension
/// wraps.
class GridIndex {
 public:
  GridIndex(const Domain& domain, double heading_weight, double cell_target = 0.05)
      : x0_(domain.xmin), y0_(domain.ymin), w_(heading_weight) {
    nx_ = dim_cells(domain.width(), cell_target);
    ny_ = dim_cells(domain.height(), cell_target);
    nz_ = dim_cells(w_ * kTwoPi, cell_target);
    cx_ = domain.width() / nx_;
    cy_ = domain.height() / ny_;
    cz_ = kTwoPi / nz_;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_ * nz_);
    min_cell_extent_ = std::min({cx_, cy_, w_ > 0.0 ? w_ * cz_ : cx_});
  }

  void insert(const Configuration& c, std::int32_t index) {
    cells_[cell_of(c)].push_back(Entry{c.x, c.y, c.psi, index});
  }

  std::int32_t nearest(const Configuration& q) const {
    std::int32_t best = -1;
    double best_dsq = std::numeric_limits<double>::infinity();
    const int qi = clamp_idx(static_cast<int>((q.x - x0_) / cx_), nx_);
    const int qj = clamp_idx(static_cast<int>((q.y - y0_) / cy_), ny_);
    const int qk = psi_cell(q.psi);
    const int max_ring = std::max({nx_, ny_, nz_});
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Any cell in this ring is at least (ring - 1) whole cells away.
      if (best >= 0) {
        const double lb = (ring - 1) * min_cell_extent_;
        if (lb > 0.0 && lb * lb > best_dsq) break;
      }
      visit_ring(qi, qj, qk, ring, [&](const std::vector<Entry>& cell) {
        for (const Entry& e : cell) {
          const double dsq = dist_sq(e, q);
          if (dsq < best_dsq || (dsq == best_dsq && e.index < best)) {
            best_dsq = dsq;
            best = e.index;
          }
        }
      });
    }
    return best;
  }

  /// Indices of all entries within radius r of q, ascending.
  void radius(const Configuration& q, double r, std::vector<std::int32_t>& out) const {
    out.clear();
    if (!(r >= 0.0)) return;
    const double rsq = r * r;
    const int ilo = clamp_idx(static_cast<int>((q.x - r - x0_) / cx_), nx_);
    const int ihi = clamp_idx(static_cast<int>((q.x + r - x0_) / cx_), nx_);
    const int jlo = clamp_idx(static_cast<int>((q.y - r - y0_) / cy_), ny_);
    const int jhi = clamp_idx(static_cast<int>((q.y + r - y0_) / cy_), ny_);
    int klo = 0, khi = nz_ - 1;
    if (w_ > 0.0 && r / w_ < kPi) {
      // Heading band +-r/w around q.psi, expressed in (possibly negative)
      // cell indices and wrapped when visited.
      klo = static_cast<int>(std::floor((q.psi - r / w_) / cz_));
      khi = static_cast<int>(std::floor((q.psi + r / w_) / cz_));
      if (khi - klo + 1 >= nz_) {
        klo = 0;
        khi = nz_ - 1;
      }
    }
    for (int i = ilo; i <= ihi; ++i)
      for (int j = jlo; j <= jhi; ++j)
        for (int k = klo; k <= khi; ++k) {
          const int kw = ((k % nz_) + nz_) % nz_;
          for (const Entry& e : cells_[flat(i, j, kw)])
            if (dist_sq(e, q) <= rsq) out.push_back(e.index);
        }
    std::sort(out.begin(), out.end());
  }

 private:
  struct Entry {
    double x, y, psi;
    std::int32_t index;
  };

  static int dim_cells(double extent, double target) {
    if (!(extent > 0.0)) return 1;
    return std::clamp(static_cast<int>(std::ceil(extent / target)), 1, 64);
  }
  static int clamp_idx(int i, int n) { return std::clamp(i, 0, n - 1); }

  int psi_cell(double psi) const {
    return clamp_idx(static_cast<int>(psi / cz_), nz_);
  }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny_ + j) * nz_ + k;
  }
  std::size_t cell_of(const Configuration& c) const {
    return flat(clamp_idx(static_cast<int>((c.x - x0_) / cx_), nx_),
                clamp_idx(static_cast<int>((c.y - y0_) / cy_), ny_), psi_cell(c.psi));
  }
  double dist_sq(const Entry& e, const Configuration& q) const {
    const double dx = e.x - q.x;
    const double dy = e.y - q.y;
    const double dpsi = w_ * wrap_pi(e.psi - q.psi);
    return dx * dx + dy * dy + dpsi * dpsi;
  }

  /// Apply fn to every cell whose Chebyshev cell distance from (qi, qj, qk)
  /// is exactly `ring`; the z dimension uses the wrapped cell distance and
  /// x/y clamp to the grid.
  template <typename Fn>
  void visit_ring(int qi, int qj, int qk, int ring, Fn&& fn) const {
    const int ilo = std::max(0, qi - ring), ihi = std::min(nx_ - 1, qi + ring);
    const int jlo = std::max(0, qj - ring), jhi = std::min(ny_ - 1, qj + ring);
    for (int i = ilo; i <= ihi; ++i)
      for (int j = jlo; j <= jhi; ++j) {
        const int ij_cheb = std::max(std::abs(i - qi), std::abs(j - qj));
        for (int k = 0; k < nz_; ++k) {
          const int dk = std::abs(k - qk);
          const int z_cheb = std::min(dk, nz_ - dk);
          if (std::max(ij_cheb, z_cheb) != ring) continue;
          fn(cells_[flat(i, j, k)]);
        }
      }
  }

  double x0_, y0_, w_;
  int nx_ = 1, ny_ = 1, nz_ = 1;
  double cx_ = 1.0, cy_ = 1.0, cz_ = kTwoPi;
  double min_cell_extent_ = 1.0;
  std::vector<std::vector<Entry>> cells_;
};

}  // namespace detail

/// Anytime sampling-based planner over the lifted configuration space.
///
/// Grows a tree rooted at the start by steering shortest Dubins paths toward
/// uniform free-space samples (goal-biased), connecting each new state to its
/// cheapest collision-free parent in a shrinking neighborhood and rewiring
/// that neighborhood through the new state when it lowers costs. Any node
/// within the goal tolerance is a solution; the search keeps refining until
/// the iteration or wall-clock budget runs out and reports the best one with
/// its improvement history.
///
/// Deterministic for a fixed seed under iteration-based termination;
/// wall-clock termination is inherently run-dependent.
inline PlanResult plan(const Scenario& scenario, const PlannerParams& params,
                       const PlanHooks& hooks = {}) {
  validate(params);
  validate(scenario.domain);
  validate(scenario.vehicle);
  for (const auto& z : scenario.zones) {
    validate(z);
    if (z.r_min != 0.0)
      throw std::invalid_argument("plan: engagement zones must have r_min = 0");
  }
  if (!config_free(scenario.start, scenario.zones, scenario.domain))
    throw std::invalid_argument("plan: start configuration is in collision");
  if (!config_free(scenario.goal, scenario.zones, scenario.domain))
    throw std::invalid_argument("plan: goal configuration is in collision");

  const double turn_radius = scenario.vehicle.turn_radius();
  const double w = params.heading_weight < 0.0 ? turn_radius : params.heading_weight;
  PlanContext ctx{scenario.zones, scenario.domain, turn_radius, scenario.vehicle.v,
                  params.check_step};

  Tree tree;
  tree.nodes.push_back(scenario.start);
  tree.parent.push_back(-1);
  tree.edge.emplace_back();
  tree.cost_to_come.push_back(0.0);
  tree.children.emplace_back();

  detail::GridIndex index(scenario.domain, w);
  index.insert(scenario.start, 0);

  RandomStream rng(params.rng_seed);
  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  const auto in_goal_region = [&](const Configuration& c) {
    return planar_distance(c, scenario.goal) <= params.goal_pos_tol &&
           std::fabs(wrap_pi(c.psi - scenario.goal.psi)) <= params.goal_ang_tol;
  };

  PlanResult result;
  result.budget_kind =
      std::isfinite(params.time_budget) ? BudgetKind::seconds : BudgetKind::iterations;

  std::vector<std::int32_t> goal_nodes;
  std::int32_t exact_goal_node = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  const auto record_progress = [&](std::uint64_t iter) {
    double c = std::numeric_limits<double>::infinity();
    for (const std::int32_t g : goal_nodes) c = std::min(c, tree.cost_to_come[g]);
    if (c < best_cost) {
      best_cost = c;
      if (result.cost_history.empty()) {
        result.first_solution_cost = c;
        result.first_solution_time = elapsed();
        result.first_solution_iteration = iter;
      }
      result.cost_history.push_back({iter, elapsed(), c});
    }
  };

  if (in_goal_region(scenario.start)) {
    goal_nodes.push_back(0);
    record_progress(0);
  }

  std::size_t next_snapshot = 0;
  const auto take_snapshots = [&](std::uint64_t iter) {
    while (next_snapshot < hooks.snapshot_iters.size() &&
           hooks.snapshot_iters[next_snapshot] == iter) {
      result.snapshots.push_back(
          {iter, !goal_nodes.empty(),
           goal_nodes.empty() ? std::numeric_limits<double>::quiet_NaN() : best_cost});
      ++next_snapshot;
    }
  };

  const auto insert_node = [&](const Configuration& q, std::int32_t parent_idx,
                               DubinsPath&& edge, double cost) {
    const std::int32_t idx = tree.size();
    tree.nodes.push_back(q);
    tree.parent.push_back(parent_idx);
    tree.edge.push_back(std::move(edge));
    tree.cost_to_come.push_back(cost);
    tree.children.emplace_back();
    tree.children[static_cast<std::size_t>(parent_idx)].push_back(idx);
    index.insert(q, idx);
    if (in_goal_region(q)) goal_nodes.push_back(idx);
    return idx;
  };

  // Goal-biased draws attempt a full (untruncated) connection from the
  // cheapest nearby node instead of one truncated steering hop. The lifted
  // metric only orders candidates; the connection itself is an exact Dubins
  // edge, so the step size never gates goal reachability. Failed attempts
  // consume the iteration like any rejected sample.
  std::vector<std::int32_t> near_set;
  const auto try_goal_connect = [&] {
    index.radius(scenario.goal,
                 std::max(near_radius(tree.size(), params.near_radius_gamma, params.steer_step),
                          params.steer_step),
                 near_set);
    // the root (a direct start->goal solution) and the metric-nearest node
    // are always worth trying
    for (const std::int32_t extra : {static_cast<std::int32_t>(0), index.nearest(scenario.goal)})
      if (!std::binary_search(near_set.begin(), near_set.end(), extra)) {
        near_set.push_back(extra);
        std::sort(near_set.begin(), near_set.end());
      }
    struct Candidate {
      double cost;
      std::int32_t index;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(near_set.size());
    for (const std::int32_t i : near_set) {
      if (i == exact_goal_node) continue;
      const double len = shortest_path(tree.nodes[i], scenario.goal, turn_radius).total_length;
      candidates.push_back({tree.cost_to_come[i] + len / ctx.v, i});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.cost != b.cost ? a.cost < b.cost : a.index < b.index;
    });
    for (const auto& c : candidates) {
      if (c.cost >= best_cost) break;  // sorted: nothing cheaper follows
      DubinsPath edge = shortest_path(tree.nodes[c.index], scenario.goal, turn_radius);
      if (!segment_free(edge, scenario.zones, scenario.domain, params.check_step)) continue;
      if (exact_goal_node < 0) {
        exact_goal_node = insert_node(scenario.goal, c.index, std::move(edge), c.cost);
      } else {
        // keep a single exact-goal node; improvements reparent it
        detail::detach_from_parent(tree, exact_goal_node);
        tree.parent[exact_goal_node] = c.index;
        tree.edge[static_cast<std::size_t>(exact_goal_node)] = std::move(edge);
        tree.cost_to_come[exact_goal_node] = c.cost;
        tree.children[static_cast<std::size_t>(c.index)].push_back(exact_goal_node);
        detail::propagate_cost(tree, exact_goal_node, ctx.v);
      }
      return;
    }
  };

  std::uint64_t iter = 0;
  while (iter < params.max_iterations && elapsed() < params.time_budget) {
    ++iter;
    const auto finish_iteration = [&] {
      record_progress(iter);
      if (hooks.on_iteration) hooks.on_iteration(iter, tree);
      take_snapshots(iter);
    };

    if (rng.bernoulli(params.goal_bias)) {
      try_goal_connect();
      finish_iteration();
      continue;
    }

    const Configuration q_rand = sample_free(scenario.zones, scenario.domain, rng);
    const std::int32_t idx_nearest = index.nearest(q_rand);
    auto [q_new, steer_edge] = steer(tree.nodes[idx_nearest], q_rand, turn_radius,
                                     params.steer_step);
    if (!segment_free(steer_edge, scenario.zones, scenario.domain, params.check_step)) {
      finish_iteration();
      continue;
    }

    index.radius(q_new, near_radius(tree.size(), params.near_radius_gamma, params.steer_step),
                 near_set);
    if (!std::binary_search(near_set.begin(), near_set.end(), idx_nearest)) {
      near_set.push_back(idx_nearest);
      std::sort(near_set.begin(), near_set.end());
    }

    auto parent = opt_parent(tree, near_set, q_new, ctx);
    if (!parent) {
      finish_iteration();
      continue;
    }
    const double new_cost =
        tree.cost_to_come[parent->first] + parent->second.total_length / ctx.v;
    const std::int32_t idx_new = insert_node(q_new, parent->first, std::move(parent->second),
                                             new_cost);
    rewire(tree, near_set, idx_new, ctx);
    finish_iteration();
  }

  result.iterations = iter;
  result.nodes_in_tree = static_cast<std::uint64_t>(tree.size());
  if (!goal_nodes.empty()) {
    result.status = PlanStatus::solved;
    result.cost = best_cost;
    std::int32_t best_node = goal_nodes.front();
    for (const std::int32_t g : goal_nodes)
      if (tree.cost_to_come[g] < tree.cost_to_come[best_node]) best_node = g;
    for (std::int32_t n = best_node; tree.parent[n] >= 0; n = tree.parent[n])
      result.path.push_back(tree.edge[n]);
    std::reverse(result.path.begin(), result.path.end());
  }
  return result;
}

/// Convenience: total transit time of a chained edge sequence.
inline double path_duration(const std::vector<DubinsPath>& path, const VehicleParams& vehicle) {
  double total = 0.0;
  for (const auto& e : path) total += e.total_length / vehicle.v;
  return total;
}

/// Runs the planner under a generous screening budget and reports whether
/// the scenario is solvable; used to filter benchmark pools.
inline bool screen_feasible(const Scenario& scenario, const PlannerParams& screening_params) {
  return plan(scenario, screening_params).status == PlanStatus::solved;
}

}  // namespace ezplan

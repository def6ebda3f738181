#include "ezplan/planner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ezplan/rng.hpp"
#include "ezplan/scenario.hpp"
#include "support.hpp"

namespace {

using ezplan::Configuration;
using ezplan::Domain;
using ezplan::EngagementZone;
using ezplan::PlannerParams;
using ezplan::PlanStatus;
using ezplan::Scenario;
using ezplan::Tree;

Tree random_tree(int n, ezplan::RandomStream& rng) {
  Tree tree;
  for (int i = 0; i < n; ++i) {
    tree.nodes.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                            rng.uniform(0.0, ezplan::kTwoPi));
    tree.parent.push_back(i == 0 ? -1 : 0);
    tree.edge.emplace_back();
    tree.cost_to_come.push_back(rng.uniform(0.0, 3.0));
    tree.children.emplace_back();
  }
  return tree;
}

TEST(SampleFree, ZeroZonesAcceptsInDomain) {
  ezplan::RandomStream rng(1);
  const Domain domain;
  const std::vector<EngagementZone> none;
  for (int i = 0; i < 1000; ++i) {
    const Configuration c = ezplan::sample_free(none, domain, rng);
    EXPECT_TRUE(domain.contains(c.x, c.y));
    EXPECT_GE(c.psi, 0.0);
    EXPECT_LT(c.psi, ezplan::kTwoPi);
  }
}

TEST(SampleFree, BlockedSpaceHitsRejectionCap) {
  // a sliver of domain on the barrier line: every heading is engaged
  ezplan::RandomStream rng(2);
  const Domain sliver{0.49995, 0.0, 0.50005, 1.0};
  std::vector<EngagementZone> wall;
  for (int i = 0; i <= 50; ++i) wall.push_back({0.5, 0.02 * i, 0.15, 0.0});
  EXPECT_THROW(ezplan::sample_free(wall, sliver, rng), std::runtime_error);
}

TEST(SampleFree, UniformPerCoordinate) {
  // Kolmogorov-Smirnov against the uniform CDF at alpha = 0.01
  ezplan::RandomStream rng(3);
  const Domain domain;
  const std::vector<EngagementZone> none;
  const int n = 100000;
  std::vector<double> xs, ys, psis;
  for (int i = 0; i < n; ++i) {
    const Configuration c = ezplan::sample_free(none, domain, rng);
    xs.push_back(c.x);
    ys.push_back(c.y);
    psis.push_back(c.psi / ezplan::kTwoPi);
  }
  const auto ks = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double lo = static_cast<double>(i) / v.size();
      const double hi = static_cast<double>(i + 1) / v.size();
      d = std::max({d, std::fabs(v[i] - lo), std::fabs(v[i] - hi)});
    }
    return d;
  };
  const double crit = 1.628 / std::sqrt(static_cast<double>(n));
  EXPECT_LT(ks(xs), crit);
  EXPECT_LT(ks(ys), crit);
  EXPECT_LT(ks(psis), crit);
}

TEST(Nearest, SingleNodeAndPlanarReduction) {
  ezplan::RandomStream rng(5);
  Tree tree = random_tree(1, rng);
  EXPECT_EQ(ezplan::nearest(tree, Configuration(0.9, 0.9, 3.0), 0.1), 0);

  // heading weight zero ignores psi entirely
  Tree two = random_tree(2, rng);
  two.nodes[0] = Configuration(0.0, 0.0, 0.0);
  two.nodes[1] = Configuration(0.1, 0.0, ezplan::kPi);
  EXPECT_EQ(ezplan::nearest(two, Configuration(0.1, 0.0, 0.0), 0.0), 1);
}

TEST(Nearest, GridIndexAgreesWithLinearScan) {
  ezplan::RandomStream rng(7);
  for (const double w : {0.1, 0.0, 0.5}) {
    Tree tree = random_tree(2000, rng);
    ezplan::detail::GridIndex index(Domain{}, w);
    for (std::int32_t i = 0; i < tree.size(); ++i) index.insert(tree.nodes[i], i);
    for (int trial = 0; trial < 2000; ++trial) {
      const Configuration q(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                            rng.uniform(0.0, ezplan::kTwoPi));
      EXPECT_EQ(index.nearest(q), ezplan::nearest(tree, q, w));
    }
  }
}

TEST(Nearest, TiesResolveToLowestIndex) {
  Tree tree;
  for (int i = 0; i < 4; ++i) {
    tree.nodes.emplace_back(0.25, 0.5, 0.0);  // duplicate configurations
    tree.parent.push_back(i == 0 ? -1 : 0);
    tree.edge.emplace_back();
    tree.cost_to_come.push_back(0.0);
    tree.children.emplace_back();
  }
  EXPECT_EQ(ezplan::nearest(tree, Configuration(0.3, 0.5, 0.1), 0.1), 0);
  ezplan::detail::GridIndex index(Domain{}, 0.1);
  for (std::int32_t i = 0; i < tree.size(); ++i) index.insert(tree.nodes[i], i);
  EXPECT_EQ(index.nearest(Configuration(0.3, 0.5, 0.1)), 0);
}

TEST(Near, RootOnlyAndShrinkingRadius) {
  ezplan::RandomStream rng(11);
  Tree tree = random_tree(1, rng);
  const auto set = ezplan::near(tree, Configuration(0.9, 0.9, 0.0), 0.1, 1.0, 0.2);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set[0], 0);

  EXPECT_LT(ezplan::near_radius(1000, 1.0, 0.2), ezplan::near_radius(10, 1.0, 0.2));
  EXPECT_LE(ezplan::near_radius(10, 1.0, 0.2), 2.0 * 0.2);
}

TEST(Near, MembershipAgreesWithLinearScanAndGrid) {
  ezplan::RandomStream rng(13);
  Tree tree = random_tree(500, rng);
  const double w = 0.1;
  ezplan::detail::GridIndex index(Domain{}, w);
  for (std::int32_t i = 0; i < tree.size(); ++i) index.insert(tree.nodes[i], i);

  std::vector<std::int32_t> from_grid;
  for (int trial = 0; trial < 500; ++trial) {
    const Configuration q(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                          rng.uniform(0.0, ezplan::kTwoPi));
    const double r = ezplan::near_radius(tree.size(), 1.0, 0.2);
    // linear membership scan
    std::vector<std::int32_t> expected;
    for (std::int32_t i = 0; i < tree.size(); ++i)
      if (ezplan::lifted_distance_sq(tree.nodes[i], q, w) <= r * r) expected.push_back(i);
    index.radius(q, r, from_grid);
    EXPECT_EQ(from_grid, expected);

    const auto with_nearest = ezplan::near(tree, q, w, 1.0, 0.2);
    // near() additionally guarantees the nearest node is present
    EXPECT_TRUE(std::binary_search(with_nearest.begin(), with_nearest.end(),
                                   ezplan::nearest(tree, q, w)));
  }
}

TEST(Steer, ReachesNearTargetExactly) {
  const Configuration from(0.0, 0.0, 0.0);
  const Configuration to(0.05, 0.01, 0.3);
  const auto res = ezplan::steer(from, to, 0.1, 0.2);
  EXPECT_EQ(res.q_new, to);
  EXPECT_LE(res.edge.total_length, 0.2);
}

TEST(Steer, TruncatesFarTargets) {
  const Configuration from(0.0, 0.0, 0.0);
  const Configuration to(0.9, 0.8, 2.0);
  const auto res = ezplan::steer(from, to, 0.1, 0.2);
  EXPECT_NEAR(res.edge.total_length, 0.2, 1e-9);

  // q_new lies on the original full path
  const auto full = ezplan::shortest_path(from, to, 0.1);
  const Configuration expect = ezplan::point_at(full, 0.2);
  EXPECT_EQ(res.q_new.x, expect.x);
  EXPECT_EQ(res.q_new.y, expect.y);
  EXPECT_EQ(res.q_new.psi, expect.psi);
}

TEST(OptParent, SingleCandidateAndExhaustiveAgreement) {
  ezplan::RandomStream rng(17);
  const ezplan::PlanContext ctx{{}, Domain{}, 0.1, 1.0, 0.005};

  Tree tree = random_tree(40, rng);
  for (std::int32_t i = 0; i < tree.size(); ++i) tree.cost_to_come[i] = rng.uniform(0.0, 2.0);

  const Configuration q(0.5, 0.5, 1.0);
  const std::vector<std::int32_t> single{3};
  const auto one = ezplan::opt_parent(tree, single, q, ctx);
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(one->first, 3);

  std::vector<std::int32_t> all(tree.size());
  for (std::int32_t i = 0; i < tree.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  const auto best = ezplan::opt_parent(tree, all, q, ctx);
  ASSERT_TRUE(best.has_value());
  // exhaustive oracle
  double best_cost = std::numeric_limits<double>::infinity();
  std::int32_t best_idx = -1;
  for (std::int32_t i = 0; i < tree.size(); ++i) {
    const auto e = ezplan::shortest_path(tree.nodes[i], q, ctx.turn_radius);
    const double c = tree.cost_to_come[i] + e.total_length / ctx.v;
    if (c < best_cost) {
      best_cost = c;
      best_idx = i;
    }
  }
  EXPECT_EQ(best->first, best_idx);
  EXPECT_NEAR(tree.cost_to_come[best->first] + best->second.total_length / ctx.v, best_cost,
              1e-12);
}

TEST(OptParent, AllBlockedDiscards) {
  // candidates on the far side of the barrier: every edge must cross it
  const Scenario wall = testsupport::wall_scenario();
  const ezplan::PlanContext ctx{wall.zones, wall.domain, 0.1, 1.0, 0.005};
  Tree tree;
  tree.nodes.emplace_back(0.1, 0.5, 0.0);
  tree.parent.push_back(-1);
  tree.edge.emplace_back();
  tree.cost_to_come.push_back(0.0);
  tree.children.emplace_back();
  const std::vector<std::int32_t> cand{0};
  const auto res = ezplan::opt_parent(tree, cand, Configuration(0.9, 0.5, 0.0), ctx);
  EXPECT_FALSE(res.has_value());
}

TEST(Rewire, NoImprovementLeavesTreeUnchanged) {
  const ezplan::PlanContext ctx{{}, Domain{}, 0.1, 1.0, 0.005};
  Tree tree;
  const auto add = [&](const Configuration& c, std::int32_t parent) {
    tree.nodes.push_back(c);
    tree.parent.push_back(parent);
    if (parent >= 0) {
      tree.edge.push_back(ezplan::shortest_path(tree.nodes[parent], c, ctx.turn_radius));
      tree.cost_to_come.push_back(tree.cost_to_come[parent] +
                                  tree.edge.back().total_length / ctx.v);
      tree.children[static_cast<std::size_t>(parent)].push_back(tree.size());
    } else {
      tree.edge.emplace_back();
      tree.cost_to_come.push_back(0.0);
    }
    tree.children.emplace_back();
    return tree.size() - 1;
  };
  add(Configuration(0.0, 0.0, 0.0), -1);
  const auto n1 = add(Configuration(0.2, 0.0, 0.0), 0);
  const auto n2 = add(Configuration(0.4, 0.0, 0.0), n1);
  const auto before_parents = tree.parent;
  const auto before_costs = tree.cost_to_come;
  const std::vector<std::int32_t> near_set{n1};
  ezplan::rewire(tree, near_set, n2, ctx);  // going via the farther node cannot help
  EXPECT_EQ(tree.parent, before_parents);
  EXPECT_EQ(tree.cost_to_come, before_costs);
}

TEST(Rewire, ImprovementReparentsAndPropagates) {
  // Hand-built instance: node B hangs off a detour; the new node C offers a
  // straight shot. After rewiring, B's parent is C and its subtree cost
  // drops by the recomputed path sums.
  const ezplan::PlanContext ctx{{}, Domain{}, 0.1, 1.0, 0.005};
  Tree tree;
  tree.nodes.emplace_back(0.0, 0.0, 0.0);  // root
  tree.parent.push_back(-1);
  tree.edge.emplace_back();
  tree.cost_to_come.push_back(0.0);
  tree.children.emplace_back();

  // B at (0.6, 0, 0) attached to the root via an artificial high cost edge
  tree.nodes.emplace_back(0.6, 0.0, 0.0);
  tree.parent.push_back(0);
  tree.edge.push_back(ezplan::shortest_path(tree.nodes[0], tree.nodes[1], ctx.turn_radius));
  tree.cost_to_come.push_back(2.0);  // pretend the stored route was poor
  tree.children.emplace_back();
  tree.children[0].push_back(1);

  // child of B
  tree.nodes.emplace_back(0.8, 0.0, 0.0);
  tree.parent.push_back(1);
  tree.edge.push_back(ezplan::shortest_path(tree.nodes[1], tree.nodes[2], ctx.turn_radius));
  tree.cost_to_come.push_back(2.0 + tree.edge.back().total_length / ctx.v);
  tree.children.emplace_back();
  tree.children[1].push_back(2);

  // new node C at (0.4, 0, 0) with cost 0.4 from the root
  tree.nodes.emplace_back(0.4, 0.0, 0.0);
  tree.parent.push_back(0);
  tree.edge.push_back(ezplan::shortest_path(tree.nodes[0], tree.nodes[3], ctx.turn_radius));
  tree.cost_to_come.push_back(0.4);
  tree.children.emplace_back();
  tree.children[0].push_back(3);

  const std::vector<std::int32_t> near_set{1};
  ezplan::rewire(tree, near_set, 3, ctx);

  EXPECT_EQ(tree.parent[1], 3);
  EXPECT_NEAR(tree.cost_to_come[1], 0.6, 1e-9);  // 0.4 + 0.2 straight
  EXPECT_NEAR(tree.cost_to_come[2], 0.8, 1e-9);  // subtree update
  ASSERT_EQ(tree.children[0].size(), 1u);        // B left the root's children
  EXPECT_EQ(tree.children[0][0], 3);
  EXPECT_EQ(tree.children[3].size(), 1u);
  EXPECT_EQ(tree.children[3][0], 1);
}

TEST(Plan, EmptyDomainConvergesTowardDubinsOptimum) {
  Scenario s;
  s.vehicle = ezplan::VehicleParams{1.0, 10.0};
  s.start = Configuration(0.0, 0.0, 0.0);
  s.goal = Configuration(1.0, 1.0, 0.0);

  PlannerParams params;
  params.max_iterations = 4000;
  params.rng_seed = 9;

  const auto res = ezplan::plan(s, params);
  ASSERT_EQ(res.status, PlanStatus::solved);
  const double optimum =
      ezplan::shortest_path(s.start, s.goal, s.vehicle.turn_radius()).total_length;
  EXPECT_GE(res.cost + params.goal_pos_tol, optimum / s.vehicle.v);
  EXPECT_LE(res.cost, 1.25 * optimum / s.vehicle.v);
  EXPECT_GE(res.cost, std::sqrt(2.0) - params.goal_pos_tol);

  // anytime history is non-increasing
  for (std::size_t i = 1; i < res.cost_history.size(); ++i)
    EXPECT_LT(res.cost_history[i].cost, res.cost_history[i - 1].cost);
  EXPECT_EQ(res.cost_history.front().cost, res.first_solution_cost);
  EXPECT_EQ(res.cost, res.cost_history.back().cost);
}

TEST(Plan, BlockedWallIsInfeasible) {
  const Scenario wall = testsupport::wall_scenario();
  PlannerParams params;
  params.max_iterations = 1500;
  params.rng_seed = 4;
  const auto res = ezplan::plan(wall, params);
  EXPECT_EQ(res.status, PlanStatus::infeasible_budget_exhausted);
  EXPECT_TRUE(res.path.empty());
  EXPECT_EQ(res.iterations, 1500u);
}

TEST(Plan, DeterministicForSeedAndIterations) {
  const Scenario s = ezplan::generate_scenario(8, 21);
  PlannerParams params;
  params.max_iterations = 2500;
  params.rng_seed = 77;
  const auto a = ezplan::plan(s, params);
  const auto b = ezplan::plan(s, params);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.nodes_in_tree, b.nodes_in_tree);
  ASSERT_EQ(a.cost_history.size(), b.cost_history.size());
  for (std::size_t i = 0; i < a.cost_history.size(); ++i) {
    EXPECT_EQ(a.cost_history[i].iteration, b.cost_history[i].iteration);
    EXPECT_EQ(a.cost_history[i].cost, b.cost_history[i].cost);
  }
  ASSERT_EQ(a.path.size(), b.path.size());
  for (std::size_t i = 0; i < a.path.size(); ++i)
    EXPECT_EQ(a.path[i].total_length, b.path[i].total_length);
}

TEST(Plan, TreeAuditHoldsThroughoutSearch) {
  const Scenario s = ezplan::generate_scenario(8, 33);
  PlannerParams params;
  params.max_iterations = 400;
  params.rng_seed = 5;

  std::string error;
  int audited = 0;
  ezplan::PlanHooks hooks;
  hooks.on_iteration = [&](std::uint64_t iter, const Tree& tree) {
    // auditing every pass is quadratic; sample it
    if (iter % 40 == 0 && error.empty()) {
      ++audited;
      testsupport::audit_tree(tree, s, params.check_step, &error);
    }
  };
  ezplan::plan(s, params, hooks);
  EXPECT_EQ(error, "");
  EXPECT_GE(audited, 10);
}

TEST(Plan, EdgesAreDirected) {
  // every stored edge starts at its parent node's configuration
  const Scenario s = ezplan::generate_scenario(4, 2);
  PlannerParams params;
  params.max_iterations = 300;
  params.rng_seed = 6;
  ezplan::PlanHooks hooks;
  const Tree* last = nullptr;
  Tree snapshot;
  hooks.on_iteration = [&](std::uint64_t, const Tree& tree) { snapshot = tree; };
  ezplan::plan(s, params, hooks);
  (void)last;
  for (std::int32_t i = 1; i < snapshot.size(); ++i) {
    const auto& parent_cfg = snapshot.nodes[static_cast<std::size_t>(snapshot.parent[i])];
    EXPECT_EQ(snapshot.edge[static_cast<std::size_t>(i)].start, parent_cfg);
  }
}

TEST(Plan, RejectsCollidingEndpoints) {
  Scenario s;
  s.vehicle = ezplan::VehicleParams{1.0, 10.0};
  s.zones.push_back({0.05, 0.05, 0.15, 0.0});
  s.start = Configuration(0.0, 0.0, ezplan::kPi / 4.0);  // heading straight at the zone
  s.goal = Configuration(1.0, 1.0, 0.0);
  PlannerParams params;
  EXPECT_THROW(ezplan::plan(s, params), std::invalid_argument);
}

TEST(Plan, StartInGoalRegionSolvesImmediately) {
  Scenario s;
  s.vehicle = ezplan::VehicleParams{1.0, 10.0};
  s.start = Configuration(0.5, 0.5, 0.0);
  s.goal = Configuration(0.5, 0.5, 0.0);
  PlannerParams params;
  params.max_iterations = 10;
  const auto res = ezplan::plan(s, params);
  EXPECT_EQ(res.status, PlanStatus::solved);
  EXPECT_EQ(res.cost, 0.0);
  EXPECT_TRUE(res.path.empty());
}

TEST(ScreenFeasible, AcceptsOpenRejectsBlocked) {
  PlannerParams screening;
  screening.max_iterations = 3000;
  screening.rng_seed = 12;

  const Scenario open = ezplan::generate_scenario(0, 1);
  EXPECT_TRUE(ezplan::screen_feasible(open, screening));

  const Scenario wall = testsupport::wall_scenario();
  EXPECT_FALSE(ezplan::screen_feasible(wall, screening));

  // idempotent for iteration budgets
  EXPECT_TRUE(ezplan::screen_feasible(open, screening));
}

}  // namespace

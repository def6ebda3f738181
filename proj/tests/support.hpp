// Shared test fixtures and checks for the planner suites.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ezplan/ez_geometry.hpp"
#include "ezplan/planner.hpp"
#include "ezplan/scenario.hpp"

namespace testsupport {

/// A scenario whose zones form a gapless vertical barrier across the middle
/// of the domain: on the barrier line every heading is engaged by one of the
/// closely spaced zones, so no continuous path can cross and the instance is
/// provably infeasible while both endpoints stay free.
inline ezplan::Scenario wall_scenario() {
  ezplan::Scenario s;
  s.vehicle = ezplan::VehicleParams{1.0, 10.0};
  s.start = ezplan::Configuration(0.0, 0.0, 0.0);
  s.goal = ezplan::Configuration(1.0, 1.0, 0.0);
  for (int i = 0; i <= 50; ++i)
    s.zones.push_back(ezplan::EngagementZone{0.5, 0.02 * i, 0.15, 0.0});
  s.seed = 0;
  return s;
}

/// Structural audit of a planner tree: one root, acyclic and fully
/// connected, parent cost recursion, edge endpoints anchored to their
/// nodes, and collision-free edges.
inline void audit_tree(const ezplan::Tree& tree, const ezplan::Scenario& scenario,
                       double check_step, std::string* error) {
  const auto fail = [&](const std::string& msg) {
    if (error->empty()) *error = msg;
  };
  if (tree.nodes.empty()) return fail("empty tree");
  if (tree.parent[0] != -1) return fail("node 0 is not the root");

  const double v = scenario.vehicle.v;
  std::vector<int> depth_seen(tree.nodes.size(), 0);
  std::vector<std::int32_t> stack{0};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const std::int32_t n = stack.back();
    stack.pop_back();
    if (depth_seen[static_cast<std::size_t>(n)]++) return fail("cycle through node " + std::to_string(n));
    ++visited;
    for (const std::int32_t c : tree.children[static_cast<std::size_t>(n)]) stack.push_back(c);
  }
  if (visited != tree.nodes.size()) return fail("tree is not fully connected from the root");

  if (tree.cost_to_come[0] != 0.0) return fail("root cost is not zero");
  for (std::int32_t i = 1; i < tree.size(); ++i) {
    const std::int32_t p = tree.parent[i];
    if (p < 0 || p >= tree.size()) return fail("bad parent index at node " + std::to_string(i));
    const auto& e = tree.edge[static_cast<std::size_t>(i)];
    const double expect = tree.cost_to_come[p] + e.total_length / v;
    if (std::fabs(tree.cost_to_come[i] - expect) > 1e-9)
      return fail("cost recursion violated at node " + std::to_string(i));
    const auto& pc = tree.nodes[static_cast<std::size_t>(p)];
    if (e.start.x != pc.x || e.start.y != pc.y || e.start.psi != pc.psi)
      return fail("edge start is not the parent configuration at node " + std::to_string(i));
    const ezplan::Configuration end = ezplan::endpoint(e);
    const auto& nc = tree.nodes[static_cast<std::size_t>(i)];
    if (std::hypot(end.x - nc.x, end.y - nc.y) > 1e-6 ||
        std::fabs(ezplan::wrap_pi(end.psi - nc.psi)) > 1e-6)
      return fail("edge endpoint does not reach node " + std::to_string(i));
    if (!ezplan::segment_free(e, scenario.zones, scenario.domain, check_step))
      return fail("stored edge is in collision at node " + std::to_string(i));
  }
}

}  // namespace testsupport

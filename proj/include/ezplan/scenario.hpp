#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ezplan/dubins.hpp"
#include "ezplan/ez_geometry.hpp"
#include "ezplan/rng.hpp"

namespace ezplan {

/// A complete planning problem instance: operating region, vehicle,
/// engagement zones, endpoint configurations, and the seed it was
/// generated from.
struct Scenario {
  Domain domain;
  VehicleParams vehicle;
  std::vector<EngagementZone> zones;
  Configuration start{0.0, 0.0, 0.0};
  Configuration goal{1.0, 1.0, 0.0};
  std::uint64_t seed = 0;
};

/// Throws with a named diagnostic if any scenario invariant is broken:
/// valid domain and vehicle, zone centers inside the domain, zone range
/// ordering, and collision-free endpoints.
inline void validate(const Scenario& s) {
  validate(s.domain);
  validate(s.vehicle);
  for (std::size_t i = 0; i < s.zones.size(); ++i) {
    validate(s.zones[i]);
    if (!s.domain.contains(s.zones[i].x, s.zones[i].y))
      throw std::invalid_argument("Scenario: zones[" + std::to_string(i) +
                                  "] center outside the domain");
  }
  if (!config_free(s.start, s.zones, s.domain))
    throw std::invalid_argument("Scenario: start configuration is not free");
  if (!config_free(s.goal, s.zones, s.domain))
    throw std::invalid_argument("Scenario: goal configuration is not free");
}

/// Knobs for randomized scenario generation. Defaults are the standard
/// corner-to-corner setup on the unit square: v = 1, turn radius 0.1,
/// homogeneous zone range 0.15.
struct ScenarioParams {
  Domain domain;
  double v = 1.0;
  double turn_radius = 0.1;  // u_max is derived as v / turn_radius
  double r_max = 0.15;
  Configuration start{0.0, 0.0, 0.0};
  Configuration goal{1.0, 1.0, 0.0};
  int max_resamples = 1000000;
};

/// Randomized zone placement: ceil(N/2) centers uniform over the domain and
/// floor(N/2) from an isotropic Gaussian at the domain center with standard
/// deviation one fifth of the domain extent, redrawn until inside the
/// domain. A zone that engages the start or goal at its fixed heading is
/// resampled, so generated scenarios always have free endpoints (feasibility
/// of the full problem is a separate screening step).
inline Scenario generate_scenario(int n_zones, std::uint64_t seed,
                                  const ScenarioParams& params = {}) {
  if (n_zones < 0) throw std::invalid_argument("generate_scenario: n_zones must be >= 0");
  validate(params.domain);

  Scenario s;
  s.domain = params.domain;
  s.vehicle = VehicleParams{params.v, params.v / params.turn_radius};
  s.start = params.start;
  s.goal = params.goal;
  s.seed = seed;
  s.zones.reserve(static_cast<std::size_t>(n_zones));

  RandomStream rng(seed);
  const int n_uniform = (n_zones + 1) / 2;
  const double sx = params.domain.width() / 5.0;
  const double sy = params.domain.height() / 5.0;

  int resamples = 0;
  const auto engulfs_endpoint = [&](const EngagementZone& ez) {
    return in_engagement(s.start, ez) || in_engagement(s.goal, ez);
  };
  const auto bump_resamples = [&] {
    if (++resamples > params.max_resamples)
      throw std::runtime_error("generate_scenario: resampling cap exceeded");
  };

  for (int i = 0; i < n_zones; ++i) {
    EngagementZone ez{0.0, 0.0, params.r_max, 0.0};
    for (;;) {
      if (i < n_uniform) {
        ez.x = rng.uniform(params.domain.xmin, params.domain.xmax);
        ez.y = rng.uniform(params.domain.ymin, params.domain.ymax);
      } else {
        ez.x = rng.normal(params.domain.center_x(), sx);
        ez.y = rng.normal(params.domain.center_y(), sy);
        if (!params.domain.contains(ez.x, ez.y)) {
          bump_resamples();
          continue;
        }
      }
      if (!engulfs_endpoint(ez)) break;
      bump_resamples();
    }
    s.zones.push_back(ez);
  }
  validate(s);
  return s;
}

}  // namespace ezplan

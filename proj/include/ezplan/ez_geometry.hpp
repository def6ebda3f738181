#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ezplan/angles.hpp"
#include "ezplan/dubins.hpp"

namespace ezplan {

/// A cardioid engagement zone centered at (x, y). The outer boundary scales
/// with the aircraft's relative bearing; r_max bounds it from above. Zones
/// used for planning have r_min = 0.
struct EngagementZone {
  double x = 0.0;
  double y = 0.0;
  double r_max = 0.15;
  double r_min = 0.0;
};

inline void validate(const EngagementZone& ez) {
  if (!(ez.r_min >= 0.0) || !(ez.r_min <= ez.r_max))
    throw std::invalid_argument("EngagementZone: requires 0 <= r_min <= r_max");
}

/// Axis-aligned rectangular operating region, closed on its boundary.
/// Containment allows a 1e-9 slack: endpoint states on the boundary (the
/// corner-to-corner setup puts both there) reconstruct from closed-form
/// path math with last-ulp drift and must not be rejected for it.
struct Domain {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;

  static constexpr double kBoundarySlack = 1e-9;

  bool contains(double x, double y) const {
    return x >= xmin - kBoundarySlack && x <= xmax + kBoundarySlack &&
           y >= ymin - kBoundarySlack && y <= ymax + kBoundarySlack;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double center_x() const { return 0.5 * (xmin + xmax); }
  double center_y() const { return 0.5 * (ymin + ymax); }
};

inline void validate(const Domain& d) {
  if (!(d.xmax > d.xmin) || !(d.ymax > d.ymin))
    throw std::invalid_argument("Domain: rectangle must be non-empty");
}

/// Line-of-sight angle from the zone center to the position, in [0, 2*pi).
/// Quadrant-resolved; undefined exactly at the center (atan2(0,0) yields 0,
/// and that position is classified engaged anyway).
inline double line_of_sight(double x, double y, const EngagementZone& ez) {
  return wrap_two_pi(std::atan2(y - ez.y, x - ez.x));
}

/// Relative bearing xi = psi - lambda - pi, normalized to (-pi, pi].
/// Zero means the aircraft is heading directly at the zone center.
inline double relative_bearing(const Configuration& c, const EngagementZone& ez) {
  return wrap_pi(c.psi - line_of_sight(c.x, c.y, ez) - kPi);
}

/// Cardioid boundary radius at polar angle theta for line-of-sight lambda
/// and relative bearing xi (general r_min/r_max form).
inline double cardioid_radius(double theta, double lambda, double xi,
                              const EngagementZone& ez) {
  const double range = 0.5 * (std::cos(xi) + 1.0) * (ez.r_max - ez.r_min) + ez.r_min;
  return range * 0.5 * (1.0 + std::sin(kPi / 2.0 - lambda + theta));
}

/// Worst-case (maximum range) boundary of a zero-r_min zone as a function of
/// relative bearing: rho_max = (r_max / 2)(cos xi + 1). This is the cardioid
/// radius at theta = lambda, the only polar angle that can intersect the
/// aircraft.
inline double max_range(double xi, const EngagementZone& ez) {
  if (ez.r_min != 0.0)
    throw std::invalid_argument("max_range: requires a zone with r_min = 0");
  return 0.5 * ez.r_max * (std::cos(xi) + 1.0);
}

/// Fixed-heading cross-section of the lifted zone obstacle:
/// rho = (r_max / 2)(1 - cos(psi - lambda)). Equals max_range under the
/// substitution xi = psi - lambda - pi.
inline double obstacle_cross_section(double lambda, double psi, const EngagementZone& ez) {
  if (ez.r_min != 0.0)
    throw std::invalid_argument("obstacle_cross_section: requires a zone with r_min = 0");
  return 0.5 * ez.r_max * (1.0 - std::cos(psi - lambda));
}

/// Collision predicate in the lifted (x, y, psi) space: the configuration is
/// engaged iff its planar distance from the zone center is <= the worst-case
/// range at its relative bearing. Boundary contact counts as engaged; a
/// configuration exactly at the center is engaged for any heading.
inline bool in_engagement(const Configuration& c, const EngagementZone& ez) {
  const double dx = c.x - ez.x;
  const double dy = c.y - ez.y;
  const double dsq = dx * dx + dy * dy;
  if (dsq > ez.r_max * ez.r_max) return false;  // rho_max never exceeds r_max
  const double lambda = wrap_two_pi(std::atan2(dy, dx));
  const double xi = wrap_pi(c.psi - lambda - kPi);
  return std::sqrt(dsq) <= max_range(xi, ez);
}

/// Free iff inside the (closed) domain and engaged by no zone.
inline bool config_free(const Configuration& c, std::span<const EngagementZone> zones,
                        const Domain& domain) {
  if (!domain.contains(c.x, c.y)) return false;
  for (const auto& ez : zones)
    if (in_engagement(c, ez)) return false;
  return true;
}

inline bool config_free(const Configuration& c, const std::vector<EngagementZone>& zones,
                        const Domain& domain) {
  return config_free(c, std::span<const EngagementZone>(zones), domain);
}

/// True iff every sample of the path at arc lengths {0, check_step, ...,
/// total_length} is config_free. The endpoint is always included. Sampled,
/// not exact: a sufficiently small step relative to zone size is the
/// caller's responsibility.
inline bool segment_free(const DubinsPath& path, std::span<const EngagementZone> zones,
                         const Domain& domain, double check_step) {
  if (!(check_step > 0.0))
    throw std::invalid_argument("segment_free: check_step must be positive");
  for (std::size_t i = 0; static_cast<double>(i) * check_step < path.total_length; ++i) {
    if (!config_free(point_at(path, static_cast<double>(i) * check_step), zones, domain))
      return false;
  }
  return config_free(endpoint(path), zones, domain);
}

inline bool segment_free(const DubinsPath& path, const std::vector<EngagementZone>& zones,
                         const Domain& domain, double check_step) {
  return segment_free(path, std::span<const EngagementZone>(zones), domain, check_step);
}

}  // namespace ezplan

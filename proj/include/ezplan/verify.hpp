#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ezplan/angles.hpp"
#include "ezplan/dubins.hpp"
#include "ezplan/planner.hpp"
#include "ezplan/scenario.hpp"

namespace ezplan {

/// Outcome of replaying a plan against the original dynamic-zone problem
/// statement. Overall pass iff all four flags hold.
struct VerificationReport {
  bool dynamics_ok = false;
  double max_position_defect = std::numeric_limits<double>::quiet_NaN();  // LU
  bool boundary_ok = false;
  bool domain_ok = false;
  bool ez_ok = false;
  double min_ez_slack = std::numeric_limits<double>::quiet_NaN();  // LU; min over time of d - rho_max
  double time_step = 0.0;  // TU

  bool pass() const { return dynamics_ok && boundary_ok && domain_ok && ez_ok; }
};

namespace detail {

/// Slack of the dynamic engagement constraint at one state: d - rho_max(xi).
/// Non-positive slack means the constraint is violated (boundary contact
/// included). This deliberately re-derives the quantity from the bearing
/// formulas instead of calling the lifted-space collision predicate, but it
/// mirrors that predicate's arithmetic so the two views can be compared
/// exactly.
inline double engagement_slack(double x, double y, double psi, const EngagementZone& ez) {
  const double dx = x - ez.x;
  const double dy = y - ez.y;
  const double dsq = dx * dx + dy * dy;
  const double lambda = wrap_two_pi(std::atan2(dy, dx));
  const double xi = wrap_pi(psi - lambda - kPi);
  const double rho_max = 0.5 * ez.r_max * (std::cos(xi) + 1.0);
  return std::sqrt(dsq) - rho_max;
}

inline bool engagement_violated(double x, double y, double psi, const EngagementZone& ez) {
  return engagement_slack(x, y, psi, ez) <= 0.0;
}

/// One classical fourth-order Runge-Kutta step of the vehicle kinematics
/// x' = v cos(psi), y' = v sin(psi), psi' = u with constant turn rate u.
inline void rk4_step(double v, double u, double h, double& x, double& y, double& psi) {
  const auto f = [v, u](double p, double& dx, double& dy) {
    dx = v * std::cos(p);
    dy = v * std::sin(p);
  };
  double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
  f(psi, k1x, k1y);
  f(psi + 0.5 * h * u, k2x, k2y);
  f(psi + 0.5 * h * u, k3x, k3y);
  f(psi + h * u, k4x, k4y);
  x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  psi += h * u;
}

}  // namespace detail

/// Replays a solved plan against the original problem formulation, not the
/// planner's collision path: reconstructs the piecewise-constant turn-rate
/// schedule, forward-integrates the kinematics with fixed-step RK4, and at
/// every step checks domain containment and the dynamic engagement
/// constraint of each zone evaluated directly from the integrated state.
/// Endpoint boundary conditions are checked at (0.01 LU, 0.05 rad); the
/// integrated trajectory must stay within 1e-6 LU of the plan's closed form
/// and the commanded turn rate within the vehicle bound.
///
/// state_tol is the containment/engagement verdict tolerance. The planner
/// certifies collision freedom only at its sampled resolution (check_step,
/// default 0.005 LU) and the integrator visits states between those samples,
/// so excursions smaller than that resolution are attributed to sampling,
/// not flagged as violations; the signed slack is still reported exactly.
inline VerificationReport verify_plan(const PlanResult& plan_result, const Scenario& scenario,
                                      double time_step = 0.001, double state_tol = 0.005) {
  if (plan_result.status != PlanStatus::solved)
    throw std::invalid_argument("verify_plan: plan is not solved");
  if (!(time_step > 0.0))
    throw std::invalid_argument("verify_plan: time_step must be positive");
  if (!(state_tol >= 0.0))
    throw std::invalid_argument("verify_plan: state_tol must be non-negative");

  constexpr double kEndpointPosTol = 0.01;  // LU
  constexpr double kEndpointAngTol = 0.05;  // rad
  constexpr double kDynamicsTol = 1e-6;     // LU

  const double v = scenario.vehicle.v;
  const double u_bound = scenario.vehicle.u_max * (1.0 + 1e-9);

  VerificationReport report;
  report.time_step = time_step;
  report.max_position_defect = 0.0;
  report.min_ez_slack = std::numeric_limits<double>::infinity();

  double x = scenario.start.x, y = scenario.start.y, psi = scenario.start.psi;
  bool domain_ok = true;
  bool ez_ok = true;
  bool controls_ok = true;

  const auto check_state = [&] {
    if (x < scenario.domain.xmin - state_tol || x > scenario.domain.xmax + state_tol ||
        y < scenario.domain.ymin - state_tol || y > scenario.domain.ymax + state_tol)
      domain_ok = false;
    for (const auto& ez : scenario.zones) {
      const double slack = detail::engagement_slack(x, y, psi, ez);
      report.min_ez_slack = std::min(report.min_ez_slack, slack);
      if (slack <= -state_tol) ez_ok = false;
    }
  };
  check_state();

  for (const auto& edge : plan_result.path) {
    const ControlSchedule schedule = control_profile(edge, scenario.vehicle);
    double s_edge = 0.0;  // arc length within this edge
    for (const auto& interval : schedule.intervals) {
      if (std::fabs(interval.u) > u_bound) controls_ok = false;
      if (interval.duration <= 0.0) continue;
      const int n_steps = std::max(1, static_cast<int>(std::ceil(interval.duration / time_step)));
      const double h = interval.duration / n_steps;
      for (int k = 0; k < n_steps; ++k) {
        detail::rk4_step(v, interval.u, h, x, y, psi);
        s_edge += v * h;
        const Configuration ref = point_at(edge, std::min(s_edge, edge.total_length));
        report.max_position_defect =
            std::max(report.max_position_defect, std::hypot(x - ref.x, y - ref.y));
        check_state();
      }
    }
  }

  report.dynamics_ok = controls_ok && report.max_position_defect <= kDynamicsTol;
  report.domain_ok = domain_ok;
  report.ez_ok = ez_ok;
  report.boundary_ok =
      std::hypot(x - scenario.goal.x, y - scenario.goal.y) <= kEndpointPosTol &&
      std::fabs(wrap_pi(psi - scenario.goal.psi)) <= kEndpointAngTol;
  if (scenario.zones.empty()) report.min_ez_slack = std::numeric_limits<double>::quiet_NaN();
  return report;
}

/// One dynamic-zone snapshot: the aircraft state at time t plus, for each
/// zone, the closed cardioid boundary its instantaneous line-of-sight and
/// relative bearing produce.
struct ZonePolyline {
  int zone_id = 0;
  std::vector<std::array<double, 3>> points;  // (theta, x, y)
};

struct Snapshot {
  double t = 0.0;
  Configuration aircraft;
  std::vector<ZonePolyline> zones;
};

/// Configuration along a chained edge sequence at arc length s.
inline Configuration config_along(const std::vector<DubinsPath>& path, const Configuration& start,
                                  double s) {
  Configuration c = start;
  for (const auto& edge : path) {
    if (s <= edge.total_length) return point_at(edge, s);
    s -= edge.total_length;
    c = endpoint(edge);
  }
  return c;
}

inline Snapshot snapshot(const PlanResult& plan_result, const Scenario& scenario, double t,
                         double resolution_deg = 1.0) {
  if (plan_result.status != PlanStatus::solved)
    throw std::invalid_argument("snapshot: plan is not solved");
  if (!(resolution_deg > 0.0))
    throw std::invalid_argument("snapshot: resolution must be positive");
  const double duration = path_duration(plan_result.path, scenario.vehicle);
  if (t < 0.0 || t > duration + 1e-12)
    throw std::out_of_range("snapshot: t outside [0, plan duration]");

  Snapshot snap;
  snap.t = t;
  snap.aircraft = config_along(plan_result.path, scenario.start,
                               std::min(scenario.vehicle.v * t,
                                        scenario.vehicle.v * duration));

  const int n_points = std::max(3, static_cast<int>(std::lround(360.0 / resolution_deg)));
  snap.zones.reserve(scenario.zones.size());
  for (std::size_t i = 0; i < scenario.zones.size(); ++i) {
    const auto& ez = scenario.zones[i];
    const double lambda = line_of_sight(snap.aircraft.x, snap.aircraft.y, ez);
    const double xi = relative_bearing(snap.aircraft, ez);
    ZonePolyline poly;
    poly.zone_id = static_cast<int>(i);
    poly.points.reserve(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k) {
      const double theta = kTwoPi * k / n_points;
      const double rho = cardioid_radius(theta, lambda, xi, ez);
      poly.points.push_back({theta, ez.x + rho * std::cos(theta), ez.y + rho * std::sin(theta)});
    }
    snap.zones.push_back(std::move(poly));
  }
  return snap;
}

}  // namespace ezplan

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ezplan/angles.hpp"

namespace ezplan {

/// An oriented planar state (x, y, psi). The heading is stored normalized
/// to [0, 2*pi); interior path math accumulates headings unnormalized and
/// normalizes on return.
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  Configuration() = default;
  Configuration(double x_, double y_, double psi_) : x(x_), y(y_), psi(wrap_two_pi(psi_)) {}

  bool operator==(const Configuration&) const = default;
};

inline double planar_distance(const Configuration& a, const Configuration& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Constant-speed, turn-rate-limited vehicle. The minimum turn radius is
/// derived, R = v / u_max.
struct VehicleParams {
  double v = 1.0;      // LU/TU
  double u_max = 10.0; // rad/TU

  double turn_radius() const { return v / u_max; }
};

inline void validate(const VehicleParams& p) {
  if (!(p.v > 0.0) || !(p.u_max > 0.0))
    throw std::invalid_argument("VehicleParams: v and u_max must be positive");
}

enum class DubinsWord : std::uint8_t { LSL, RSR, LSR, RSL, RLR, LRL };

inline const char* to_string(DubinsWord w) {
  switch (w) {
    case DubinsWord::LSL: return "LSL";
    case DubinsWord::RSR: return "RSR";
    case DubinsWord::LSR: return "LSR";
    case DubinsWord::RSL: return "RSL";
    case DubinsWord::RLR: return "RLR";
    case DubinsWord::LRL: return "LRL";
  }
  return "?";
}

inline std::optional<DubinsWord> dubins_word_from_string(const std::string& s) {
  for (auto w : {DubinsWord::LSL, DubinsWord::RSR, DubinsWord::LSR, DubinsWord::RSL,
                 DubinsWord::RLR, DubinsWord::LRL})
    if (s == to_string(w)) return w;
  return std::nullopt;
}

/// Segment kind at position i (0..2) of a word: 'L', 'R' or 'S'.
inline char segment_kind(DubinsWord w, int i) { return to_string(w)[i]; }

/// A three-segment curvature-bounded path. Turn segments store their arc
/// angle in radians, straight segments their length in LU. Degenerate
/// near-zero segments are retained with zero measure so the word structure
/// stays stable.
struct DubinsPath {
  DubinsWord word = DubinsWord::LSL;
  std::array<double, 3> params{0.0, 0.0, 0.0};
  Configuration start;
  double turn_radius = 1.0;
  double total_length = 0.0;
};

/// Length in LU of segment i.
inline double segment_length(const DubinsPath& p, int i) {
  return segment_kind(p.word, i) == 'S' ? p.params[i] : p.params[i] * p.turn_radius;
}

namespace detail {

/// Advance a state along one segment. `measure` is the arc angle for turns
/// and the length for straights. psi is left unnormalized.
inline void advance_segment(char kind, double measure, double turn_radius, double& x,
                            double& y, double& psi) {
  switch (kind) {
    case 'S':
      x += measure * std::cos(psi);
      y += measure * std::sin(psi);
      break;
    case 'L': {
      const double np = psi + measure;
      x += turn_radius * (std::sin(np) - std::sin(psi));
      y += turn_radius * (std::cos(psi) - std::cos(np));
      psi = np;
      break;
    }
    case 'R': {
      const double np = psi - measure;
      x += turn_radius * (std::sin(psi) - std::sin(np));
      y += turn_radius * (std::cos(np) - std::cos(psi));
      psi = np;
      break;
    }
    default:
      throw std::logic_error("advance_segment: bad kind");
  }
}

// Closed-form word solutions in normalized units (chord length d in turn
// radii, alpha/beta the start/goal headings relative to the chord). Returns
// (t, p, q): first/last entries are arc angles; the middle entry is the
// normalized straight length for CSC words and an arc angle for CCC words.
struct NormalizedInputs {
  double d, alpha, beta;
  double sa, sb, ca, cb, cab;
};

inline std::optional<std::array<double, 3>> word_lsl(const NormalizedInputs& n) {
  const double psq = 2.0 + n.d * n.d - 2.0 * n.cab + 2.0 * n.d * (n.sa - n.sb);
  if (psq < 0.0) return std::nullopt;
  const double tmp = std::atan2(n.cb - n.ca, n.d + n.sa - n.sb);
  return std::array{wrap_two_pi(-n.alpha + tmp), std::sqrt(psq), wrap_two_pi(n.beta - tmp)};
}

inline std::optional<std::array<double, 3>> word_rsr(const NormalizedInputs& n) {
  const double psq = 2.0 + n.d * n.d - 2.0 * n.cab + 2.0 * n.d * (n.sb - n.sa);
  if (psq < 0.0) return std::nullopt;
  const double tmp = std::atan2(n.ca - n.cb, n.d - n.sa + n.sb);
  return std::array{wrap_two_pi(n.alpha - tmp), std::sqrt(psq), wrap_two_pi(-n.beta + tmp)};
}

inline std::optional<std::array<double, 3>> word_lsr(const NormalizedInputs& n) {
  const double psq = -2.0 + n.d * n.d + 2.0 * n.cab + 2.0 * n.d * (n.sa + n.sb);
  if (psq < 0.0) return std::nullopt;
  const double p = std::sqrt(psq);
  const double tmp = std::atan2(-n.ca - n.cb, n.d + n.sa + n.sb) - std::atan2(-2.0, p);
  return std::array{wrap_two_pi(-n.alpha + tmp), p, wrap_two_pi(-wrap_two_pi(n.beta) + tmp)};
}

inline std::optional<std::array<double, 3>> word_rsl(const NormalizedInputs& n) {
  const double psq = -2.0 + n.d * n.d + 2.0 * n.cab - 2.0 * n.d * (n.sa + n.sb);
  if (psq < 0.0) return std::nullopt;
  const double p = std::sqrt(psq);
  const double tmp = std::atan2(n.ca + n.cb, n.d - n.sa - n.sb) - std::atan2(2.0, p);
  return std::array{wrap_two_pi(n.alpha - tmp), p, wrap_two_pi(n.beta - tmp)};
}

inline std::optional<std::array<double, 3>> word_rlr(const NormalizedInputs& n) {
  const double tmp = (6.0 - n.d * n.d + 2.0 * n.cab + 2.0 * n.d * (n.sa - n.sb)) / 8.0;
  if (std::fabs(tmp) > 1.0) return std::nullopt;
  const double p = wrap_two_pi(kTwoPi - std::acos(tmp));
  const double phi = std::atan2(n.ca - n.cb, n.d - n.sa + n.sb);
  const double t = wrap_two_pi(n.alpha - phi + wrap_two_pi(p / 2.0));
  const double q = wrap_two_pi(n.alpha - n.beta - t + wrap_two_pi(p));
  return std::array{t, p, q};
}

inline std::optional<std::array<double, 3>> word_lrl(const NormalizedInputs& n) {
  const double tmp = (6.0 - n.d * n.d + 2.0 * n.cab + 2.0 * n.d * (n.sb - n.sa)) / 8.0;
  if (std::fabs(tmp) > 1.0) return std::nullopt;
  const double p = wrap_two_pi(kTwoPi - std::acos(tmp));
  const double phi = std::atan2(n.ca - n.cb, n.d + n.sa - n.sb);
  const double t = wrap_two_pi(-n.alpha - phi + p / 2.0);
  const double q = wrap_two_pi(wrap_two_pi(n.beta) - n.alpha - t + wrap_two_pi(p));
  return std::array{t, p, q};
}

inline std::optional<std::array<double, 3>> solve_word(DubinsWord w,
                                                       const NormalizedInputs& n) {
  switch (w) {
    case DubinsWord::LSL: return word_lsl(n);
    case DubinsWord::RSR: return word_rsr(n);
    case DubinsWord::LSR: return word_lsr(n);
    case DubinsWord::RSL: return word_rsl(n);
    case DubinsWord::RLR: return word_rlr(n);
    case DubinsWord::LRL: return word_lrl(n);
  }
  return std::nullopt;
}

}  // namespace detail

/// Minimum-length curvature-bounded path between two oriented states.
/// All six words are evaluated; infeasible ones are skipped, and ties are
/// broken by the fixed order LSL, RSR, LSR, RSL, RLR, LRL so output is
/// deterministic. A path always exists.
inline DubinsPath shortest_path(const Configuration& start, const Configuration& goal,
                                double turn_radius) {
  if (!(turn_radius > 0.0))
    throw std::invalid_argument("shortest_path: turn_radius must be positive");

  DubinsPath path;
  path.start = start;
  path.turn_radius = turn_radius;

  if (start == goal) return path;  // zero-length identity path

  const double dx = goal.x - start.x;
  const double dy = goal.y - start.y;
  const double chord = std::atan2(dy, dx);

  detail::NormalizedInputs n;
  n.d = std::hypot(dx, dy) / turn_radius;
  n.alpha = wrap_two_pi(start.psi - chord);
  n.beta = wrap_two_pi(goal.psi - chord);
  n.sa = std::sin(n.alpha);
  n.sb = std::sin(n.beta);
  n.ca = std::cos(n.alpha);
  n.cb = std::cos(n.beta);
  n.cab = std::cos(n.alpha - n.beta);

  double best = std::numeric_limits<double>::infinity();
  for (auto w : {DubinsWord::LSL, DubinsWord::RSR, DubinsWord::LSR, DubinsWord::RSL,
                 DubinsWord::RLR, DubinsWord::LRL}) {
    const auto sol = detail::solve_word(w, n);
    if (!sol) continue;
    const double normalized_total = (*sol)[0] + (*sol)[1] + (*sol)[2];
    if (normalized_total < best) {
      best = normalized_total;
      path.word = w;
      path.params = *sol;
      // middle entry of a CSC word is a normalized straight length
      if (segment_kind(w, 1) == 'S') path.params[1] *= turn_radius;
    }
  }
  path.total_length = segment_length(path, 0) + segment_length(path, 1) + segment_length(path, 2);
  return path;
}

/// Configuration at arc length s along the path, 0 <= s <= total_length.
/// Heading changes at rate +-1/turn_radius on turns and is constant on
/// straights.
inline Configuration point_at(const DubinsPath& path, double s) {
  constexpr double kSlack = 1e-9;
  if (s < -kSlack || s > path.total_length + kSlack)
    throw std::out_of_range("point_at: arc length outside [0, total_length]");
  s = std::clamp(s, 0.0, path.total_length);

  double x = path.start.x, y = path.start.y, psi = path.start.psi;
  for (int i = 0; i < 3; ++i) {
    const char kind = segment_kind(path.word, i);
    const double len = segment_length(path, i);
    const double take = std::min(s, len);
    const double measure = kind == 'S' ? take : take / path.turn_radius;
    detail::advance_segment(kind, measure, path.turn_radius, x, y, psi);
    s -= take;
    if (s <= 0.0) break;
  }
  return Configuration(x, y, psi);
}

inline Configuration endpoint(const DubinsPath& path) {
  return point_at(path, path.total_length);
}

/// Prefix of the path with arc length min(s, total_length).
inline DubinsPath truncated(const DubinsPath& path, double s) {
  s = std::clamp(s, 0.0, path.total_length);
  DubinsPath out = path;
  double remaining = s;
  for (int i = 0; i < 3; ++i) {
    const double len = segment_length(path, i);
    const double take = std::min(remaining, len);
    out.params[i] = segment_kind(path.word, i) == 'S' ? take : take / path.turn_radius;
    remaining -= take;
  }
  out.total_length = segment_length(out, 0) + segment_length(out, 1) + segment_length(out, 2);
  return out;
}

/// Samples at arc lengths {0, step, 2*step, ..., total_length}; the final
/// sample is exactly the endpoint and consecutive samples are at most one
/// step apart.
inline std::vector<Configuration> sample_path(const DubinsPath& path, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("sample_path: step must be positive");
  std::vector<Configuration> samples;
  samples.reserve(static_cast<std::size_t>(path.total_length / step) + 2);
  for (std::size_t i = 0; static_cast<double>(i) * step < path.total_length; ++i)
    samples.push_back(point_at(path, static_cast<double>(i) * step));
  samples.push_back(endpoint(path));
  return samples;
}

/// Piecewise-constant turn-rate schedule realizing a path: turns map to
/// u = +-v/turn_radius (+-u_max when the path was planned at the vehicle's
/// minimum radius), straights to u = 0. Zero-duration intervals of
/// degenerate segments are retained.
struct ControlSchedule {
  struct Interval {
    double u = 0.0;        // rad/TU
    double duration = 0.0; // TU
  };
  std::array<Interval, 3> intervals;
  double total_duration = 0.0; // TU; equals total_length / v
};

inline ControlSchedule control_profile(const DubinsPath& path, const VehicleParams& vehicle) {
  validate(vehicle);
  ControlSchedule s;
  const double turn_rate = vehicle.v / path.turn_radius;
  for (int i = 0; i < 3; ++i) {
    const char kind = segment_kind(path.word, i);
    s.intervals[i].u = kind == 'L' ? turn_rate : kind == 'R' ? -turn_rate : 0.0;
    s.intervals[i].duration = segment_length(path, i) / vehicle.v;
  }
  s.total_duration = path.total_length / vehicle.v;
  return s;
}

}  // namespace ezplan

#pragma once

#include <vector>

#include "lanexit/geometry.hpp"

namespace lanexit {

/// Entry and exit points of a lane-exit maneuver with the orientations of the
/// two lanes.
struct LaneGeometry {
  Vec2 p_i;
  Vec2 p_f;
  double theta_i;
  double theta_f;
};

/// Intersection of the line through p_i along theta_i with the line through
/// p_f along theta_f. Throws Error(kNoIntersection) for parallel lanes.
Vec2 intermediate_control_point(const LaneGeometry& geom);

/// Quadratic Bezier lane-exit path
///   B(tau) = (1-tau)^2 p_i + 2 tau (1-tau) p_int + tau^2 p_f.
///
/// Construction tabulates cumulative arc length at 1024 knots so that
/// arc-length parameterisation is cheap during simulation. Instances are
/// immutable.
class LaneExitPath {
 public:
  static constexpr int kTableKnots = 1024;

  LaneExitPath(Vec2 p_i, Vec2 p_int, Vec2 p_f);
  static LaneExitPath from_geometry(const LaneGeometry& geom);

  Vec2 p_i() const { return p_i_; }
  Vec2 p_int() const { return p_int_; }
  Vec2 p_f() const { return p_f_; }

  /// Throws Error(kDomain) for tau outside [0,1].
  Vec2 evaluate(double tau) const;
  Vec2 derivative(double tau) const;
  /// Angle of the tangent vector; Error(kUndefinedHeading) where it vanishes.
  double heading(double tau) const;

  double arc_length() const { return arc_length_; }
  /// Arc length from 0 to tau.
  double arc_length_at(double tau) const;
  /// Throws Error(kInvalidArgument) unless speed > 0.
  double traversal_time(double speed) const;
  /// Inverse of arc_length_at. Throws Error(kDomain) outside [0, arc_length].
  double arc_length_to_tau(double s) const;

  /// Control-point hull, counterclockwise; two vertices when collinear.
  const Polygon& convex_hull() const { return hull_; }

 private:
  double speed_at(double tau) const { return norm(derivative(tau)); }

  Vec2 p_i_;
  Vec2 p_int_;
  Vec2 p_f_;
  Polygon hull_;
  std::vector<double> cumulative_;  // arc length at tau = k / (kTableKnots - 1)
  double arc_length_ = 0.0;
};

/// Samples (tau, point) pairs for plotting; `count` >= 2.
std::vector<std::pair<double, Vec2>> sample_path(const LaneExitPath& path, int count);

}  // namespace lanexit

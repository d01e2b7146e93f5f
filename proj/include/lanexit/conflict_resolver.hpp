#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanexit/depth_uncertainty.hpp"
#include "lanexit/geometry.hpp"

namespace lanexit {

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

struct VehicleDims {
  double length = 3.8;
  double width = 1.8;
};

/// Rectangle occupied by the neighbor given the depth bounds, inflated by the
/// vehicle footprint. Corners are counterclockwise; edges are aligned with the
/// sensor heading.
struct ObstacleRegion {
  std::array<Vec2, 4> corners;

  Polygon polygon() const { return {corners.begin(), corners.end()}; }
  ObstacleRegion translated(Vec2 offset) const;
};

/// Region spanning depth [x_lower - l/2, x_upper + l/2] and lateral
/// [y_m - w/2, y_m + w/2] in the sensor frame, mapped to the inertial frame.
ObstacleRegion obstacle_region(const Pose& sensor, double x_lower, double x_upper, double y_m,
                               const VehicleDims& dims);
/// Uses 0 for an absent lower bound.
ObstacleRegion obstacle_region(const Pose& sensor, const DepthEstimate& estimate, double y_m,
                               const VehicleDims& dims);

/// Centerline of the neighbor's lane with its direction of travel.
///
/// Positions along the lane are expressed in the upstream coordinate: the
/// signed distance from `point` measured against the direction of travel, so
/// that it decreases as the neighbor advances. With this convention the
/// neighbor has passed the maneuver area once x_N < x_p1 - d_s and is still
/// approaching while x_N > x_p2 + d_s.
struct NeighborLane {
  Vec2 point;
  double heading = 0.0;

  Vec2 travel_direction() const { return unit_vector(heading); }
  double upstream(Vec2 p) const { return -dot(p - point, travel_direction()); }
  /// Signed distance from the centerline, positive to the left of travel.
  double lateral(Vec2 p) const { return cross(travel_direction(), p - point); }
  Vec2 at_upstream(double s) const { return point - s * travel_direction(); }
};

struct CenterlineCrossings {
  Vec2 x_p1;  // on segment p_i -> p_f
  Vec2 x_p2;  // on segment p_int -> p_f
};

/// Throws Error(kNoIntersection) when the centerline misses either segment.
CenterlineCrossings centerline_crossings(Vec2 p_i, Vec2 p_int, Vec2 p_f, const NeighborLane& lane);

bool regions_intersect(const ObstacleRegion& region, std::span<const Vec2> hull);

struct ConflictInputs {
  Polygon hull;
  Vec2 x_p1;
  Vec2 x_p2;
  NeighborLane lane;
  double d_s = 3.8;  // minimum center-to-center separation
  double v_e = 7.0;  // ego speed while executing the path
  double t_c = 0.0;  // path traversal time
  std::optional<double> v_upper;

  /// Throws Error(kInvalidArgument) unless d_s > 0, t_c > 0 and v_e > 0.
  void validate() const;
};

enum class Verdict { kProceed, kWait };

const char* to_string(Verdict v);

struct Decision {
  int d_v1 = -1;
  int d_v2 = -1;
  Verdict verdict = Verdict::kWait;
  double evaluated_at = 0.0;
};

/// Decision variables for one neighbor at time `t`.
///
/// d_v1 certifies that the neighbor has already crossed: the region is clear
/// of the hull and x_N < x_p1 - d_s. d_v2 certifies that it cannot arrive in
/// time: clear now with x_N > x_p2 + d_s, and still clear after the predicted
/// advance (v_upper + v_e) * t_c. Without a v_upper, d_v2 is -1.
Decision evaluate_decision(const ConflictInputs& inputs, double x_n, const ObstacleRegion& region,
                           double t);

struct NeighborObservation {
  std::string id;
  double x_n = 0.0;  // upstream coordinate
  ObstacleRegion region;
  std::optional<double> v_upper;
};

struct DecisionEvent {
  double t;
  std::string neighbor_id;  // empty when no neighbor is observed
  Decision decision;
  std::optional<double> x_n;
  std::optional<double> v_upper;
};

/// Wait-at-P_i state machine. Each evaluate() call applies the decision rule
/// to every observed neighbor; the ego may proceed only when all of them are
/// certified. The first Proceed commits and later calls are no-ops.
class WaitLoop {
 public:
  WaitLoop(ConflictInputs inputs, double t_start, std::optional<double> timeout);

  Verdict evaluate(double t, std::span<const NeighborObservation> observations);

  bool committed() const { return commit_time_.has_value(); }
  std::optional<double> commit_time() const { return commit_time_; }
  /// True once the loop has been waiting for longer than the timeout.
  bool timed_out(double t) const;
  int wait_ticks() const { return wait_ticks_; }
  double t_start() const { return t_start_; }
  const std::vector<DecisionEvent>& events() const { return events_; }
  const ConflictInputs& inputs() const { return inputs_; }

 private:
  ConflictInputs inputs_;
  double t_start_;
  std::optional<double> timeout_;
  std::optional<double> commit_time_;
  int wait_ticks_ = 0;
  std::vector<DecisionEvent> events_;
};

struct WaitLoopOptions {
  double tick = 0.01;
  std::optional<double> timeout = 60.0;
};

struct WaitLoopResult {
  bool committed = false;
  std::optional<double> commit_time;
  int wait_ticks = 0;
  std::vector<DecisionEvent> events;
  std::string deadlock_report;  // set on timeout
};

/// Drives a WaitLoop from `t_start`, calling `observe(t)` once per tick until
/// the first Proceed or the timeout.
WaitLoopResult run_wait_loop(
    const ConflictInputs& inputs, double t_start, const WaitLoopOptions& options,
    const std::function<std::vector<NeighborObservation>(double)>& observe);

}  // namespace lanexit

#include "lanexit/conflict_resolver.hpp"

#include <cmath>
#include <utility>

#include <fmt/core.h>

#include "lanexit/error.hpp"

namespace lanexit {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kSegmentSlack = 1e-9;

}  // namespace

ObstacleRegion ObstacleRegion::translated(Vec2 offset) const {
  ObstacleRegion out = *this;
  for (Vec2& c : out.corners) c += offset;
  return out;
}

ObstacleRegion obstacle_region(const Pose& sensor, double x_lower, double x_upper, double y_m,
                               const VehicleDims& dims) {
  const double near = x_lower - 0.5 * dims.length;
  const double far = x_upper + 0.5 * dims.length;
  const double right = y_m - 0.5 * dims.width;
  const double left = y_m + 0.5 * dims.width;
  const auto to_inertial = [&](double x, double y) {
    return sensor.position + rotate({x, y}, sensor.heading);
  };
  return ObstacleRegion{{to_inertial(near, right), to_inertial(far, right), to_inertial(far, left),
                         to_inertial(near, left)}};
}

ObstacleRegion obstacle_region(const Pose& sensor, const DepthEstimate& estimate, double y_m,
                               const VehicleDims& dims) {
  return obstacle_region(sensor, estimate.pessimistic_lower(), estimate.upper, y_m, dims);
}

CenterlineCrossings centerline_crossings(Vec2 p_i, Vec2 p_int, Vec2 p_f, const NeighborLane& lane) {
  const Vec2 dir = lane.travel_direction();
  const auto cross_segment = [&](Vec2 a, Vec2 b, const char* name) {
    const double s = segment_line_parameter(a, b, lane.point, dir);
    if (std::isnan(s) || s < -kSegmentSlack || s > 1.0 + kSegmentSlack) {
      throw Error(ErrorCode::kNoIntersection,
                  fmt::format("neighbor-lane centerline does not cross segment {}", name));
    }
    if (s >= 1.0) return b;
    if (s <= 0.0) return a;
    return a + s * (b - a);
  };
  return CenterlineCrossings{cross_segment(p_i, p_f, "P_i-P_f"),
                             cross_segment(p_int, p_f, "P_int-P_f")};
}

bool regions_intersect(const ObstacleRegion& region, std::span<const Vec2> hull) {
  return convex_intersect(region.corners, hull, kBoundaryTol);
}

const char* to_string(Verdict v) { return v == Verdict::kProceed ? "proceed" : "wait"; }

void ConflictInputs::validate() const {
  if (!(d_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("d_s must be > 0 (got {})", d_s));
  }
  if (!(t_c > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("t_c must be > 0 (got {})", t_c));
  }
  if (!(v_e > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("v_e must be > 0 (got {})", v_e));
  }
}

Decision evaluate_decision(const ConflictInputs& in, double x_n, const ObstacleRegion& region,
                           double t) {
  const double xp1 = in.lane.upstream(in.x_p1);
  const double xp2 = in.lane.upstream(in.x_p2);
  const bool clear_now = !regions_intersect(region, in.hull);

  Decision d;
  d.evaluated_at = t;
  d.d_v1 = (clear_now && x_n < xp1 - in.d_s) ? 1 : -1;

  if (in.v_upper && clear_now && x_n > xp2 + in.d_s) {
    const double advance = (*in.v_upper + in.v_e) * in.t_c;
    const double x_pred = x_n - advance;
    const ObstacleRegion future = region.translated(advance * in.lane.travel_direction());
    const bool clear_later = !regions_intersect(future, in.hull);
    d.d_v2 = (clear_later && x_pred > xp2 + in.d_s) ? 1 : -1;
  }
  d.verdict = (d.d_v1 == 1 || d.d_v2 == 1) ? Verdict::kProceed : Verdict::kWait;
  return d;
}

WaitLoop::WaitLoop(ConflictInputs inputs, double t_start, std::optional<double> timeout)
    : inputs_(std::move(inputs)), t_start_(t_start), timeout_(timeout) {
  inputs_.validate();
}

bool WaitLoop::timed_out(double t) const {
  return !committed() && timeout_ && t - t_start_ > *timeout_;
}

Verdict WaitLoop::evaluate(double t, std::span<const NeighborObservation> observations) {
  if (committed()) return Verdict::kProceed;
  bool all_clear = true;
  if (observations.empty()) {
    Decision d{1, 1, Verdict::kProceed, t};
    events_.push_back({t, {}, d, std::nullopt, std::nullopt});
  }
  for (const NeighborObservation& obs : observations) {
    ConflictInputs per = inputs_;
    per.v_upper = obs.v_upper;
    const Decision d = evaluate_decision(per, obs.x_n, obs.region, t);
    events_.push_back({t, obs.id, d, obs.x_n, obs.v_upper});
    if (d.verdict == Verdict::kWait) all_clear = false;
  }
  if (all_clear) {
    commit_time_ = t;
    return Verdict::kProceed;
  }
  ++wait_ticks_;
  return Verdict::kWait;
}

WaitLoopResult run_wait_loop(
    const ConflictInputs& inputs, double t_start, const WaitLoopOptions& options,
    const std::function<std::vector<NeighborObservation>(double)>& observe) {
  if (!(options.tick > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "wait-loop tick must be > 0");
  }
  WaitLoop loop(inputs, t_start, options.timeout);
  WaitLoopResult result;
  for (long n = 0;; ++n) {
    const double t = t_start + static_cast<double>(n) * options.tick;
    const auto obs = observe(t);
    if (loop.evaluate(t, obs) == Verdict::kProceed) break;
    if (loop.timed_out(t + options.tick)) {
      result.deadlock_report = fmt::format(
          "ego waited {} s at P_i ({} ticks) without a proceed verdict",
          t + options.tick - t_start, loop.wait_ticks());
      break;
    }
  }
  result.committed = loop.committed();
  result.commit_time = loop.commit_time();
  result.wait_ticks = loop.wait_ticks();
  result.events = loop.events();
  return result;
}

}  // namespace lanexit

#pragma once

#include <memory>
#include <variant>

#include "lanexit/geometry.hpp"
#include "lanexit/path_planner.hpp"

namespace lanexit {

struct LaneFollow {};
struct Waiting {};
struct ExecutingPath {
  std::shared_ptr<const LaneExitPath> path;
  double progress_s = 0.0;
};

using EgoMode = std::variant<LaneFollow, Waiting, ExecutingPath>;

const char* mode_name(const EgoMode& mode);

/// Point-mass ego: position, heading, forward speed and maneuver mode.
struct EgoState {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  EgoMode mode = LaneFollow{};
};

/// Advances the ego by dt.
///  - LaneFollow: straight line along the heading at the current speed.
///  - Waiting: unchanged.
///  - ExecutingPath: arc-length progress by speed*dt; position and heading
///    come from the curve. Reaching the end switches to LaneFollow on the
///    exit lane and spends the remaining distance there.
EgoState step_ego(const EgoState& state, double dt);

/// Places the ego at arc length `progress_s` along `path`.
EgoState ego_on_path(std::shared_ptr<const LaneExitPath> path, double progress_s, double speed);

}  // namespace lanexit

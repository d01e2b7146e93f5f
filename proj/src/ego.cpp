#include "lanexit/ego.hpp"

#include <fmt/core.h>

#include "lanexit/error.hpp"

namespace lanexit {

const char* mode_name(const EgoMode& mode) {
  if (std::holds_alternative<LaneFollow>(mode)) return "lane_follow";
  if (std::holds_alternative<Waiting>(mode)) return "waiting";
  return "executing_path";
}

EgoState ego_on_path(std::shared_ptr<const LaneExitPath> path, double progress_s, double speed) {
  const double tau = path->arc_length_to_tau(progress_s);
  EgoState s;
  s.position = path->evaluate(tau);
  s.heading = path->heading(tau);
  s.speed = speed;
  s.mode = ExecutingPath{std::move(path), progress_s};
  return s;
}

EgoState step_ego(const EgoState& state, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("dt must be > 0 (got {})", dt));
  }
  if (std::holds_alternative<Waiting>(state.mode)) return state;

  if (std::holds_alternative<LaneFollow>(state.mode)) {
    EgoState next = state;
    next.position += (state.speed * dt) * unit_vector(state.heading);
    return next;
  }

  const auto& exec = std::get<ExecutingPath>(state.mode);
  const LaneExitPath& path = *exec.path;
  const double progress = exec.progress_s + state.speed * dt;
  if (progress < path.arc_length()) {
    return ego_on_path(exec.path, progress, state.speed);
  }
  EgoState next;
  next.heading = path.heading(1.0);
  next.speed = state.speed;
  next.mode = LaneFollow{};
  next.position = path.p_f() + (progress - path.arc_length()) * unit_vector(next.heading);
  return next;
}

}  // namespace lanexit

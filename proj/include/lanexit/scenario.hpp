#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lanexit/closing_speed.hpp"
#include "lanexit/conflict_resolver.hpp"
#include "lanexit/depth_uncertainty.hpp"
#include "lanexit/measurement.hpp"
#include "lanexit/path_planner.hpp"
#include "lanexit/tracks.hpp"

namespace lanexit {

struct IntersectionConfig {
  LaneGeometry geometry;
  NeighborLane neighbor_lane;
};

struct ScenarioConfig {
  DepthErrorModel model{0.002797, -0.004249, 0.007311, 0.9};
  double epsilon = 0.2;
  double d_s = 3.8;
  double v_e = 7.0;
  VehicleDims dims;
  double tick = 0.01;
  double camera_rate_hz = 20.0;
  double camera_max_range = 150.0;
  bool rear_camera = true;
  bool noise = true;
  std::uint64_t seed = 1;
  double wait_timeout = 60.0;
  double start_distance = 20.0;  // ego start, measured back from the first P_i
  double lane_half_width = 1.75;
  std::vector<IntersectionConfig> intersections;
  std::vector<NeighborTrack> tracks;

  /// Throws Error(kValidation) naming the offending field.
  void validate() const;
};

struct EgoRecord {
  double t;
  Vec2 position;
  double heading;
  double speed;
  const char* mode;
  int intersection;  // index of the intersection being approached or executed
  double progress_s;
};

struct NeighborRecord {
  double t;
  std::string id;
  Vec2 position;
};

struct MeasurementRecord {
  double t;
  std::string id;
  std::string camera;
  MeasurementFrame frame;
  DepthEstimate estimate;
  std::optional<ClosingSpeedEstimate> closing_speed;  // set at sampling instants
};

struct DecisionRecord {
  int intersection;
  DecisionEvent event;
};

struct DistanceRecord {
  double t;
  std::string id;
  double distance;
};

struct IntersectionOutcome {
  double arrival_time = 0.0;
  std::optional<double> proceed_time;
  std::optional<double> completion_time;
  int wait_ticks = 0;
  double traversal_time = 0.0;
  /// Decision that committed the maneuver, per neighbor.
  std::vector<DecisionEvent> committing_events;

  double wait_time() const { return proceed_time ? *proceed_time - arrival_time : 0.0; }
};

struct ScenarioTrace {
  bool complete = false;
  std::string deadlock_report;
  double end_time = 0.0;
  std::vector<EgoRecord> ego;
  std::vector<NeighborRecord> neighbors;
  std::vector<MeasurementRecord> measurements;
  std::vector<DecisionRecord> decisions;
  std::vector<DistanceRecord> distances;
  std::vector<IntersectionOutcome> intersections;
  double min_separation = std::numeric_limits<double>::infinity();
  double min_separation_t = 0.0;
  std::string min_separation_id;
  std::size_t sample_count = 0;
  std::size_t tick_count = 0;
};

/// Index of the intersection whose neighbor-lane corridor contains every
/// sample of the track; nullopt if none does.
std::optional<std::size_t> assign_lane(const ScenarioConfig& config, const NeighborTrack& track);

/// Runs the lane approach, wait/decide and maneuver cycle for every
/// intersection in order. Deterministic for a given config and seed.
ScenarioTrace run_scenario(const ScenarioConfig& config);

/// Writes ego.csv, neighbors.csv, measurements.csv, decisions.csv,
/// distances.csv, path_K.csv per intersection and summary.txt into `dir`
/// (created if missing).
void write_trace(const ScenarioTrace& trace, const ScenarioConfig& config,
                 const std::filesystem::path& dir);

std::string format_summary(const ScenarioTrace& trace, const ScenarioConfig& config);

}  // namespace lanexit

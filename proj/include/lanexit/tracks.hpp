#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lanexit/conflict_resolver.hpp"
#include "lanexit/geometry.hpp"

namespace lanexit {

struct TrackSample {
  double t;
  Vec2 position;
};

/// Replayed neighbor trajectory, linearly interpolated between samples.
class NeighborTrack {
 public:
  /// Throws Error(kInvalidArgument) on empty input or non-increasing times.
  NeighborTrack(std::string id, std::vector<TrackSample> samples);

  const std::string& id() const { return id_; }
  const std::vector<TrackSample>& samples() const { return samples_; }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

  /// Position at time t; nullopt outside [t_begin, t_end].
  std::optional<Vec2> position_at(double t) const;
  /// Largest segment speed overlapping [t0, t1].
  double max_speed(double t0, double t1) const;

 private:
  std::string id_;
  std::vector<TrackSample> samples_;
};

/// Maps raw dataset coordinates into scenario coordinates:
///   p' = scale * R(rotation) * p + offset
struct AffineTransform {
  double scale = 1.0;
  double rotation = 0.0;
  Vec2 offset;

  Vec2 apply(Vec2 p) const { return scale * rotate(p, rotation) + offset; }
};

struct TrackFileOptions {
  double frame_rate_hz = 10.0;
  std::int64_t first_frame = 0;  // frame mapped to t = 0
  AffineTransform transform;
};

/// Reads the `vehicle_id,frame,local_x_m,local_y_m` layout, one track per
/// vehicle id in order of first appearance. Frames of each vehicle must
/// strictly increase. Errors carry line numbers.
std::vector<NeighborTrack> parse_tracks(std::istream& in, const TrackFileOptions& options);
std::vector<NeighborTrack> load_tracks(const std::string& path, const TrackFileOptions& options);

/// Lane follower with piecewise-constant speed. speeds[i] applies from
/// switch_times[i-1] (or t_start) until switch_times[i] (or the end).
struct SyntheticTrackSpec {
  std::string id;
  NeighborLane lane;
  double start_upstream = 0.0;  // upstream coordinate at t_start
  double lateral_offset = 0.0;
  std::vector<double> speeds;
  std::vector<double> switch_times;
  double t_start = 0.0;
  double duration = 30.0;
  double sample_rate_hz = 10.0;
};

NeighborTrack generate_track(const SyntheticTrackSpec& spec);

}  // namespace lanexit

#include "lanexit/tracks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <utility>

#include <fmt/core.h>

#include "lanexit/csv.hpp"
#include "lanexit/error.hpp"

namespace lanexit {

NeighborTrack::NeighborTrack(std::string id, std::vector<TrackSample> samples)
    : id_(std::move(id)), samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("track '{}' has no samples", id_));
  }
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("track '{}': sample times must strictly increase", id_));
    }
  }
}

std::optional<Vec2> NeighborTrack::position_at(double t) const {
  if (t < t_begin() || t > t_end()) return std::nullopt;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double v, const TrackSample& s) { return v < s.t; });
  if (it == samples_.end()) return samples_.back().position;
  const TrackSample& b = *it;
  const TrackSample& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.position + w * (b.position - a.position);
}

double NeighborTrack::max_speed(double t0, double t1) const {
  double out = 0.0;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const TrackSample& a = samples_[i - 1];
    const TrackSample& b = samples_[i];
    if (b.t < t0 || a.t > t1) continue;
    out = std::max(out, distance(a.position, b.position) / (b.t - a.t));
  }
  return out;
}

std::vector<NeighborTrack> parse_tracks(std::istream& in, const TrackFileOptions& options) {
  if (!(options.frame_rate_hz > 0.0)) {
    throw Error(ErrorCode::kValidation, "frame_rate_hz must be > 0");
  }
  static constexpr std::string_view kHeader[] = {"vehicle_id", "frame", "local_x_m", "local_y_m"};

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<std::int64_t, Vec2>>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (!have_header) {
      if (fields.size() != 4) {
        throw Error(ErrorCode::kParse,
                    fmt::format("line {}: expected header 'vehicle_id,frame,local_x_m,local_y_m'",
                                line_no));
      }
      for (std::size_t i = 0; i < 4; ++i) {
        if (fields[i] != kHeader[i]) {
          throw Error(ErrorCode::kParse,
                      fmt::format("line {}: unknown column '{}' (expected '{}')", line_no,
                                  fields[i], kHeader[i]));
        }
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::kParse,
                  fmt::format("line {}: expected 4 fields, got {}", line_no, fields.size()));
    }
    if (fields[0].empty()) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: empty vehicle_id", line_no));
    }
    const auto frame = csv::parse_int(fields[1]);
    const auto x = csv::parse_double(fields[2]);
    const auto y = csv::parse_double(fields[3]);
    if (!frame) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: malformed frame '{}'", line_no, fields[1]));
    }
    if (!x || !y) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: malformed coordinate", line_no));
    }
    const std::string id(fields[0]);
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    auto& list = it->second;
    if (!list.empty()) {
      if (*frame == list.back().first) {
        throw Error(ErrorCode::kParse,
                    fmt::format("line {}: duplicated frame {} for vehicle '{}'", line_no, *frame, id));
      }
      if (*frame < list.back().first) {
        throw Error(ErrorCode::kParse,
                    fmt::format("line {}: frame {} for vehicle '{}' is not increasing", line_no,
                                *frame, id));
      }
    }
    list.emplace_back(*frame, options.transform.apply({*x, *y}));
  }

  std::vector<NeighborTrack> tracks;
  tracks.reserve(order.size());
  for (const std::string& id : order) {
    std::vector<TrackSample> samples;
    for (const auto& [frame, p] : rows[id]) {
      samples.push_back(
          {static_cast<double>(frame - options.first_frame) / options.frame_rate_hz, p});
    }
    tracks.emplace_back(id, std::move(samples));
  }
  return tracks;
}

std::vector<NeighborTrack> load_tracks(const std::string& path, const TrackFileOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, fmt::format("cannot open '{}'", path));
  return parse_tracks(in, options);
}

NeighborTrack generate_track(const SyntheticTrackSpec& spec) {
  if (spec.speeds.empty() || spec.switch_times.size() + 1 != spec.speeds.size()) {
    throw Error(ErrorCode::kValidation,
                fmt::format("track '{}': need one more speed than switch times", spec.id));
  }
  for (double v : spec.speeds) {
    if (!(v >= 0.0)) {
      throw Error(ErrorCode::kValidation, fmt::format("track '{}': speeds must be >= 0", spec.id));
    }
  }
  if (!(spec.duration > 0.0) || !(spec.sample_rate_hz > 0.0)) {
    throw Error(ErrorCode::kValidation,
                fmt::format("track '{}': duration and sample rate must be > 0", spec.id));
  }
  for (std::size_t i = 0; i < spec.switch_times.size(); ++i) {
    const double prev = i == 0 ? spec.t_start : spec.switch_times[i - 1];
    if (!(spec.switch_times[i] > prev)) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("track '{}': switch times must increase after t_start", spec.id));
    }
  }

  // Distance travelled since t_start, integrating the piecewise-constant speed.
  const auto travelled = [&](double t) {
    double s = 0.0;
    double from = spec.t_start;
    for (std::size_t i = 0; i < spec.speeds.size(); ++i) {
      const double until = i < spec.switch_times.size() ? spec.switch_times[i] : t;
      const double to = std::min(until, t);
      if (to > from) s += spec.speeds[i] * (to - from);
      from = std::max(from, until);
      if (from >= t) break;
    }
    return s;
  };

  const auto count = static_cast<long>(std::floor(spec.duration * spec.sample_rate_hz + 1e-9));
  std::vector<TrackSample> samples;
  samples.reserve(count + 1);
  const Vec2 lateral = rotate(spec.lane.travel_direction(), 0.5 * std::numbers::pi);
  for (long i = 0; i <= count; ++i) {
    const double t = spec.t_start + static_cast<double>(i) / spec.sample_rate_hz;
    const double s = spec.start_upstream - travelled(t);
    samples.push_back({t, spec.lane.at_upstream(s) + spec.lateral_offset * lateral});
  }
  return NeighborTrack(spec.id, std::move(samples));
}

}  // namespace lanexit

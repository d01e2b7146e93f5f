#include "lanexit/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "lanexit/csv.hpp"
#include "lanexit/error.hpp"

namespace lanexit {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::kValidation, fmt::format("{}: {}", field, message));
}

// Section names like "intersection.1" contain the path separator, so
// sections are looked up by iterating the root rather than by path.
std::map<std::string, const pt::ptree*> sections_of(const pt::ptree& root) {
  std::map<std::string, const pt::ptree*> out;
  for (const auto& [name, node] : root) {
    if (node.empty() && !node.data().empty()) {
      throw Error(ErrorCode::kParse, fmt::format("key '{}' outside of any section", name));
    }
    out.emplace(name, &node);
  }
  return out;
}

class Section {
 public:
  Section(std::string name, const pt::ptree* node) : name_(std::move(name)), node_(node) {}

  bool has(const std::string& key) const {
    return node_ && node_->find(key) != node_->not_found();
  }

  std::string text(const std::string& key) const {
    return std::string(csv::trim(node_->find(key)->second.data()));
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse(key, text(key));
  }

  double required(const std::string& key) const {
    if (!has(key)) invalid(field(key), "missing");
    return parse(key, text(key));
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const std::string raw = text(key);
    if (raw.empty()) return out;
    for (std::string_view part : csv::split(raw)) out.push_back(parse(key, csv::trim(part)));
    return out;
  }

  Vec2 point(const std::string& key) const {
    if (!has(key)) invalid(field(key), "missing");
    const auto v = list(key);
    if (v.size() != 2) invalid(field(key), "expected \"x, y\"");
    return {v[0], v[1]};
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = text(key);
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    invalid(field(key), fmt::format("expected a boolean (got '{}')", v));
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }
  const std::string& name() const { return name_; }

  void reject_unknown(std::initializer_list<const char*> known) const {
    if (!node_) return;
    for (const auto& [key, child] : *node_) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) invalid(field(key), "unknown key");
    }
  }

 private:
  double parse(const std::string& key, std::string_view raw) const {
    const auto v = csv::parse_double(raw);
    if (!v) invalid(field(key), fmt::format("expected a number (got '{}')", raw));
    return *v;
  }

  std::string name_;
  const pt::ptree* node_;
};

pt::ptree read_tree(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kParse, fmt::format("line {}: {}", e.line(), e.message()));
  }
  return root;
}

DepthErrorModel model_from(const Section& s) {
  s.reject_unknown({"beta1", "beta2", "beta3", "r_squared"});
  const double b1 = s.number("beta1", 0.002797);
  const double b2 = s.number("beta2", -0.004249);
  const double b3 = s.number("beta3", 0.007311);
  const double r2 = s.number("r_squared", 0.9);
  try {
    return DepthErrorModel(b1, b2, b3, r2);
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, fmt::format("model: {}", e.what()));
  }
}

Section section_or_empty(const std::map<std::string, const pt::ptree*>& all,
                         const std::string& name) {
  const auto it = all.find(name);
  return Section(name, it == all.end() ? nullptr : it->second);
}

bool numbered(const std::string& name, const std::string& prefix, std::string* suffix) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return false;
  *suffix = name.substr(prefix.size());
  return true;
}

}  // namespace

DepthErrorModel parse_model_section(std::istream& in) {
  const pt::ptree root = read_tree(in);
  const auto all = sections_of(root);
  return model_from(section_or_empty(all, "model"));
}

DepthErrorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, fmt::format("cannot open config '{}'", path));
  return parse_model_section(in);
}

ScenarioConfig parse_config(std::istream& in, const std::string& base_dir) {
  const pt::ptree root = read_tree(in);
  const auto all = sections_of(root);
  ScenarioConfig cfg;
  cfg.model = model_from(section_or_empty(all, "model"));

  const Section planner = section_or_empty(all, "planner");
  planner.reject_unknown({"epsilon", "safety_distance", "ego_speed", "vehicle_length",
                          "vehicle_width"});
  cfg.epsilon = planner.number("epsilon", cfg.epsilon);
  cfg.d_s = planner.number("safety_distance", cfg.d_s);
  cfg.v_e = planner.number("ego_speed", cfg.v_e);
  cfg.dims.length = planner.number("vehicle_length", cfg.dims.length);
  cfg.dims.width = planner.number("vehicle_width", cfg.dims.width);

  const Section sim = section_or_empty(all, "sim");
  sim.reject_unknown({"tick", "camera_rate_hz", "camera_max_range", "rear_camera", "noise",
                      "seed", "wait_timeout", "start_distance", "lane_half_width"});
  cfg.tick = sim.number("tick", cfg.tick);
  cfg.camera_rate_hz = sim.number("camera_rate_hz", cfg.camera_rate_hz);
  cfg.camera_max_range = sim.number("camera_max_range", cfg.camera_max_range);
  cfg.rear_camera = sim.flag("rear_camera", cfg.rear_camera);
  cfg.noise = sim.flag("noise", cfg.noise);
  if (sim.has("seed")) {
    const auto seed = csv::parse_int(sim.text("seed"));
    if (!seed || *seed < 0) invalid(sim.field("seed"), "expected a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }
  cfg.wait_timeout = sim.number("wait_timeout", cfg.wait_timeout);
  cfg.start_distance = sim.number("start_distance", cfg.start_distance);
  cfg.lane_half_width = sim.number("lane_half_width", cfg.lane_half_width);

  std::map<int, IntersectionConfig> intersections;
  std::map<std::string, const pt::ptree*> track_sections;
  for (const auto& [name, node] : all) {
    std::string suffix;
    if (numbered(name, "intersection.", &suffix)) {
      const auto index = csv::parse_int(suffix);
      if (!index || *index < 1) invalid(name, "intersection sections are numbered from 1");
      const Section s(name, node);
      s.reject_unknown({"p_i", "p_f", "theta_i", "theta_f", "neighbor_lane_point",
                        "neighbor_lane_heading"});
      IntersectionConfig ic;
      ic.geometry.p_i = s.point("p_i");
      ic.geometry.p_f = s.point("p_f");
      ic.geometry.theta_i = s.required("theta_i");
      ic.geometry.theta_f = s.required("theta_f");
      ic.neighbor_lane.point = s.point("neighbor_lane_point");
      ic.neighbor_lane.heading = s.required("neighbor_lane_heading");
      intersections.emplace(static_cast<int>(*index), ic);
    } else if (numbered(name, "track.", &suffix)) {
      track_sections.emplace(suffix, node);
    } else if (name != "model" && name != "planner" && name != "sim" && name != "tracks") {
      invalid(name, "unknown section");
    }
  }
  int expected = 1;
  for (const auto& [index, ic] : intersections) {
    if (index != expected++) {
      invalid(fmt::format("intersection.{}", expected - 1), "intersections must be numbered 1..N");
    }
    cfg.intersections.push_back(ic);
  }

  const Section tracks = section_or_empty(all, "tracks");
  tracks.reject_unknown({"source", "file", "frame_rate_hz", "first_frame", "transform_scale",
                         "transform_rotation", "transform_offset"});
  const std::string source = tracks.has("source") ? tracks.text("source") : "synthetic";
  if (source == "file") {
    if (!tracks.has("file")) invalid(tracks.field("file"), "missing");
    TrackFileOptions opts;
    opts.frame_rate_hz = tracks.number("frame_rate_hz", opts.frame_rate_hz);
    if (!(opts.frame_rate_hz > 0.0)) invalid(tracks.field("frame_rate_hz"), "must be > 0");
    if (tracks.has("first_frame")) {
      const auto f = csv::parse_int(tracks.text("first_frame"));
      if (!f) invalid(tracks.field("first_frame"), "expected an integer");
      opts.first_frame = *f;
    }
    opts.transform.scale = tracks.number("transform_scale", 1.0);
    opts.transform.rotation = tracks.number("transform_rotation", 0.0);
    if (tracks.has("transform_offset")) opts.transform.offset = tracks.point("transform_offset");
    std::filesystem::path file = tracks.text("file");
    if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
    cfg.tracks = load_tracks(file.string(), opts);
    if (!track_sections.empty()) {
      invalid("tracks.source", "[track.*] sections require source = synthetic");
    }
  } else if (source == "synthetic") {
    for (const auto& [id, node] : track_sections) {
      const Section s("track." + id, node);
      s.reject_unknown({"intersection", "start", "lateral_offset", "speeds", "switch_times",
                        "t_start", "duration", "sample_rate_hz"});
      const double lane_index = s.required("intersection");
      if (lane_index != std::floor(lane_index) || lane_index < 1 ||
          lane_index > static_cast<double>(cfg.intersections.size())) {
        invalid(s.field("intersection"), "must name a configured intersection");
      }
      SyntheticTrackSpec spec;
      spec.id = id;
      spec.lane = cfg.intersections[static_cast<std::size_t>(lane_index) - 1].neighbor_lane;
      spec.start_upstream = s.required("start");
      spec.lateral_offset = s.number("lateral_offset", 0.0);
      spec.speeds = s.list("speeds");
      spec.switch_times = s.list("switch_times");
      spec.t_start = s.number("t_start", 0.0);
      spec.duration = s.number("duration", spec.duration);
      spec.sample_rate_hz = s.number("sample_rate_hz", spec.sample_rate_hz);
      try {
        cfg.tracks.push_back(generate_track(spec));
      } catch (const Error& e) {
        invalid(s.name(), e.what());
      }
    }
  } else {
    invalid(tracks.field("source"), fmt::format("expected 'synthetic' or 'file' (got '{}')", source));
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, fmt::format("cannot open config '{}'", path));
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(in, parent.empty() ? "." : parent.string());
}

}  // namespace lanexit

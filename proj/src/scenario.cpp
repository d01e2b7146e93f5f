#include "lanexit/scenario.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include <fmt/core.h>

#include "lanexit/csv.hpp"
#include "lanexit/ego.hpp"
#include "lanexit/error.hpp"
#include "lanexit/measurement.hpp"

namespace lanexit {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::kValidation, fmt::format("{}: {}", field, message));
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(field, fmt::format("must be > 0 (got {})", v));
}

struct Observation {
  Pose sensor;
  DepthEstimate estimate;
  double y_m;
};

struct NeighborState {
  const NeighborTrack* track;
  std::size_t lane;
  StreamSampler sampler;
  std::optional<Observation> latest;
};

}  // namespace

void ScenarioConfig::validate() const {
  require_positive(epsilon, "planner.epsilon");
  require_positive(d_s, "planner.safety_distance");
  require_positive(v_e, "planner.ego_speed");
  require_positive(dims.length, "planner.vehicle_length");
  require_positive(dims.width, "planner.vehicle_width");
  require_positive(tick, "sim.tick");
  require_positive(camera_rate_hz, "sim.camera_rate_hz");
  require_positive(camera_max_range, "sim.camera_max_range");
  require_positive(wait_timeout, "sim.wait_timeout");
  require_positive(lane_half_width, "sim.lane_half_width");
  if (!(start_distance >= 0.0)) {
    invalid("sim.start_distance", fmt::format("must be >= 0 (got {})", start_distance));
  }
  if (intersections.empty()) invalid("intersection", "at least one intersection is required");

  for (std::size_t k = 0; k < intersections.size(); ++k) {
    const auto& ic = intersections[k];
    const std::string section = fmt::format("intersection.{}", k + 1);
    try {
      const Vec2 p_int = intermediate_control_point(ic.geometry);
      centerline_crossings(ic.geometry.p_i, p_int, ic.geometry.p_f, ic.neighbor_lane);
    } catch (const Error& e) {
      invalid(section, e.what());
    }
    if (k + 1 < intersections.size()) {
      const auto& next = intersections[k + 1].geometry;
      const Vec2 exit_dir = unit_vector(ic.geometry.theta_f);
      const Vec2 gap = next.p_i - ic.geometry.p_f;
      if (std::abs(cross(exit_dir, gap)) > 1e-6 || dot(exit_dir, gap) < 0.0) {
        invalid(fmt::format("intersection.{}.p_i", k + 2),
                "must lie ahead on the exit lane of the previous intersection");
      }
      if (std::abs(wrap_angle(next.theta_i - ic.geometry.theta_f)) > 1e-9) {
        invalid(fmt::format("intersection.{}.theta_i", k + 2),
                "must equal the previous intersection's theta_f");
      }
    }
  }
  for (const NeighborTrack& track : tracks) {
    if (!assign_lane(*this, track)) {
      invalid(fmt::format("track.{}", track.id()),
              "positions leave every neighbor-lane corridor");
    }
  }
}

std::optional<std::size_t> assign_lane(const ScenarioConfig& config, const NeighborTrack& track) {
  for (std::size_t k = 0; k < config.intersections.size(); ++k) {
    const NeighborLane& lane = config.intersections[k].neighbor_lane;
    bool inside = true;
    for (const TrackSample& s : track.samples()) {
      if (std::abs(lane.lateral(s.position)) > config.lane_half_width) {
        inside = false;
        break;
      }
    }
    if (inside) return k;
  }
  return std::nullopt;
}

ScenarioTrace run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t count = cfg.intersections.size();

  std::vector<std::shared_ptr<const LaneExitPath>> paths;
  std::vector<ConflictInputs> gates;
  for (const auto& ic : cfg.intersections) {
    auto path = std::make_shared<const LaneExitPath>(LaneExitPath::from_geometry(ic.geometry));
    const auto crossings = centerline_crossings(path->p_i(), path->p_int(), path->p_f(),
                                                ic.neighbor_lane);
    ConflictInputs gate;
    gate.hull = path->convex_hull();
    gate.x_p1 = crossings.x_p1;
    gate.x_p2 = crossings.x_p2;
    gate.lane = ic.neighbor_lane;
    gate.d_s = cfg.d_s;
    gate.v_e = cfg.v_e;
    gate.t_c = path->traversal_time(cfg.v_e);
    paths.push_back(std::move(path));
    gates.push_back(std::move(gate));
  }

  const CameraMount front{"front", 0.0, cfg.camera_max_range, 0.5 * std::numbers::pi};
  const CameraMount rear{"rear", std::numbers::pi, cfg.camera_max_range, 0.5 * std::numbers::pi};
  UniformNoise noise(cfg.seed);
  const SamplingPlan plan(cfg.epsilon, cfg.model);

  std::vector<NeighborState> neighbors;
  neighbors.reserve(cfg.tracks.size());
  for (const NeighborTrack& track : cfg.tracks) {
    neighbors.push_back({&track, *assign_lane(cfg, track), StreamSampler(plan), std::nullopt});
  }

  ScenarioTrace trace;
  trace.intersections.resize(count);

  const LaneGeometry& first = cfg.intersections.front().geometry;
  EgoState ego;
  ego.heading = first.theta_i;
  ego.position = first.p_i - cfg.start_distance * unit_vector(first.theta_i);
  ego.speed = cfg.v_e;
  ego.mode = LaneFollow{};

  std::size_t current = 0;
  std::optional<WaitLoop> wait;
  const double frame_period = 1.0 / cfg.camera_rate_hz;
  long next_frame = 0;

  const auto record_world = [&](double t) {
    for (const NeighborState& n : neighbors) {
      const auto p = n.track->position_at(t);
      if (!p) continue;
      trace.neighbors.push_back({t, n.track->id(), *p});
      const double d = distance(ego.position, *p);
      trace.distances.push_back({t, n.track->id(), d});
      if (d < trace.min_separation) {
        trace.min_separation = d;
        trace.min_separation_t = t;
        trace.min_separation_id = n.track->id();
      }
    }
  };

  const auto record_ego = [&](double t) {
    double progress = 0.0;
    if (const auto* exec = std::get_if<ExecutingPath>(&ego.mode)) progress = exec->progress_s;
    trace.ego.push_back({t, ego.position, ego.heading, ego.speed, mode_name(ego.mode),
                         static_cast<int>(std::min(current, count - 1)) + 1, progress});
  };

  const auto take_frame = [&](double t) {
    const Pose pose{ego.position, ego.heading};
    const bool sampling = !std::holds_alternative<ExecutingPath>(ego.mode);
    for (NeighborState& n : neighbors) {
      n.latest.reset();
      const auto p = n.track->position_at(t);
      if (!p) continue;
      const CameraMount* mount = &front;
      auto frame = synthesize_measurement(cfg.model, pose, front, *p, t, cfg.noise ? &noise : nullptr);
      if (!frame && cfg.rear_camera) {
        mount = &rear;
        frame = synthesize_measurement(cfg.model, pose, rear, *p, t, cfg.noise ? &noise : nullptr);
      }
      if (!frame) continue;
      const DepthEstimate est = estimate_from_measurement(cfg.model, frame->x_m);
      MeasurementRecord rec{t, n.track->id(), mount->name, *frame, est, std::nullopt};
      if (sampling && mount == &front) {
        rec.closing_speed = n.sampler.push(t, frame->x_m);
        if (rec.closing_speed) ++trace.sample_count;
      }
      trace.measurements.push_back(std::move(rec));
      n.latest = Observation{sensor_pose(pose, *mount), est, frame->y_m};
    }
  };

  const auto observe = [&](std::size_t lane) {
    std::vector<NeighborObservation> out;
    for (const NeighborState& n : neighbors) {
      if (n.lane != lane || !n.latest) continue;
      const Observation& o = *n.latest;
      const Vec2 p = measured_position(o.sensor, o.estimate.computed, o.y_m);
      NeighborObservation obs;
      obs.id = n.track->id();
      obs.x_n = cfg.intersections[lane].neighbor_lane.upstream(p);
      obs.region = obstacle_region(o.sensor, o.estimate, o.y_m, cfg.dims);
      if (const auto& cs = n.sampler.latest()) obs.v_upper = cs->v_upper;
      out.push_back(std::move(obs));
    }
    return out;
  };

  const auto reset_samplers = [&] {
    for (NeighborState& n : neighbors) n.sampler.reset();
  };

  const auto finish_wait = [&](const WaitLoop& loop) {
    IntersectionOutcome& out = trace.intersections[current];
    for (const DecisionEvent& e : loop.events()) {
      trace.decisions.push_back({static_cast<int>(current) + 1, e});
      if (loop.commit_time() && e.t == *loop.commit_time()) out.committing_events.push_back(e);
    }
    out.wait_ticks = loop.wait_ticks();
    out.proceed_time = loop.commit_time();
  };

  const auto start_path = [&](double leftover) {
    ego = ego_on_path(paths[current], 0.0, cfg.v_e);
    if (leftover > 0.0) ego = step_ego(ego, leftover);
  };

  for (long step = 0;; ++step) {
    const double t = static_cast<double>(step) * cfg.tick;
    trace.tick_count = static_cast<std::size_t>(step) + 1;
    record_world(t);
    if (t + 1e-9 >= static_cast<double>(next_frame) * frame_period) {
      take_frame(t);
      ++next_frame;
    }

    if (wait) {
      const auto obs = observe(current);
      if (wait->evaluate(t, obs) == Verdict::kProceed) {
        finish_wait(*wait);
        wait.reset();
        start_path(0.0);
      } else if (wait->timed_out(t)) {
        finish_wait(*wait);
        trace.complete = false;
        trace.end_time = t;
        trace.deadlock_report = fmt::format(
            "timeout at intersection {}: waited {} s at P_i without a proceed verdict",
            current + 1, t - wait->t_start());
        record_ego(t);
        return trace;
      }
    }
    record_ego(t);

    if (std::holds_alternative<LaneFollow>(ego.mode) && current < count) {
      const Vec2 p_i = paths[current]->p_i();
      const double remaining = dot(p_i - ego.position, unit_vector(ego.heading));
      if (remaining <= ego.speed * cfg.tick + 1e-12) {
        const double t_arrive = t + std::max(remaining, 0.0) / ego.speed;
        IntersectionOutcome& out = trace.intersections[current];
        out.arrival_time = t_arrive;
        out.traversal_time = gates[current].t_c;
        ego.position = p_i;
        WaitLoop loop(gates[current], t_arrive, cfg.wait_timeout);
        if (loop.evaluate(t_arrive, observe(current)) == Verdict::kProceed) {
          finish_wait(loop);
          start_path(t + cfg.tick - t_arrive);
        } else {
          ego.mode = Waiting{};
          ego.speed = 0.0;
          reset_samplers();
          wait.emplace(std::move(loop));
        }
        continue;
      }
    }

    if (const auto* exec = std::get_if<ExecutingPath>(&ego.mode)) {
      const double before = exec->progress_s;
      const double length = exec->path->arc_length();
      ego = step_ego(ego, cfg.tick);
      if (std::holds_alternative<LaneFollow>(ego.mode)) {
        trace.intersections[current].completion_time = t + (length - before) / cfg.v_e;
        reset_samplers();
        ++current;
        if (current == count) {
          const double t_end = t + cfg.tick;
          trace.tick_count = static_cast<std::size_t>(step) + 2;
          record_world(t_end);
          record_ego(t_end);
          trace.complete = true;
          trace.end_time = t_end;
          return trace;
        }
      }
      continue;
    }
    ego = step_ego(ego, cfg.tick);
  }
}

namespace {

std::string fmt_num(double v) { return csv::format_number(v); }

}  // namespace

std::string format_summary(const ScenarioTrace& trace, const ScenarioConfig& config) {
  std::ostringstream out;
  out << "status = " << (trace.complete ? "complete" : "timeout") << '\n';
  out << "seed = " << config.seed << '\n';
  out << "end_time_s = " << fmt_num(trace.end_time) << '\n';
  out << "ticks = " << trace.tick_count << '\n';
  double total_wait = 0.0;
  for (std::size_t k = 0; k < trace.intersections.size(); ++k) {
    const IntersectionOutcome& o = trace.intersections[k];
    const std::string p = fmt::format("intersection.{}.", k + 1);
    out << p << "arrival_time_s = " << fmt_num(o.arrival_time) << '\n';
    out << p << "proceed_time_s = " << csv::format_optional(o.proceed_time) << '\n';
    out << p << "completion_time_s = " << csv::format_optional(o.completion_time) << '\n';
    out << p << "wait_time_s = " << fmt_num(o.wait_time()) << '\n';
    out << p << "wait_ticks = " << o.wait_ticks << '\n';
    out << p << "traversal_time_s = " << fmt_num(o.traversal_time) << '\n';
    total_wait += o.wait_time();
  }
  out << "total_wait_time_s = " << fmt_num(total_wait) << '\n';
  if (std::isfinite(trace.min_separation)) {
    out << "min_separation_m = " << fmt_num(trace.min_separation) << '\n';
    out << "min_separation_t_s = " << fmt_num(trace.min_separation_t) << '\n';
    out << "min_separation_neighbor = " << trace.min_separation_id << '\n';
  } else {
    out << "min_separation_m = \n";
  }
  out << "safety_distance_m = " << fmt_num(config.d_s) << '\n';
  out << "sample_count = " << trace.sample_count << '\n';
  out << "decision_count = " << trace.decisions.size() << '\n';
  if (!trace.deadlock_report.empty()) out << "deadlock = " << trace.deadlock_report << '\n';
  return out.str();
}

void write_trace(const ScenarioTrace& trace, const ScenarioConfig& config,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidArgument, fmt::format("cannot write {}", (dir / name).string()));
    return f;
  };

  {
    auto f = open("ego.csv");
    f << "t_s,x_m,y_m,heading_rad,speed_mps,mode,intersection,progress_m\n";
    for (const EgoRecord& r : trace.ego) {
      f << fmt_num(r.t) << ',' << fmt_num(r.position.x) << ',' << fmt_num(r.position.y) << ','
        << fmt_num(r.heading) << ',' << fmt_num(r.speed) << ',' << r.mode << ','
        << r.intersection << ',' << fmt_num(r.progress_s) << '\n';
    }
  }
  {
    auto f = open("neighbors.csv");
    f << "t_s,neighbor_id,x_m,y_m\n";
    for (const NeighborRecord& r : trace.neighbors) {
      f << fmt_num(r.t) << ',' << r.id << ',' << fmt_num(r.position.x) << ','
        << fmt_num(r.position.y) << '\n';
    }
  }
  {
    auto f = open("measurements.csv");
    f << "t_s,neighbor_id,camera,x_meas_m,y_meas_m,computed_m,lower_m,upper_m,"
         "v_nom_mps,v_upper_mps,v_lower_mps,gamma_u\n";
    for (const MeasurementRecord& r : trace.measurements) {
      f << fmt_num(r.t) << ',' << r.id << ',' << r.camera << ',' << fmt_num(r.frame.x_m) << ','
        << fmt_num(r.frame.y_m) << ',' << fmt_num(r.estimate.computed) << ','
        << csv::format_optional(r.estimate.lower) << ',' << fmt_num(r.estimate.upper) << ',';
      if (r.closing_speed) {
        const auto& c = *r.closing_speed;
        f << fmt_num(c.v_nom) << ',' << fmt_num(c.v_upper) << ',' << fmt_num(c.v_lower) << ','
          << fmt_num(c.gamma_upper());
      } else {
        f << ",,,";
      }
      f << '\n';
    }
  }
  {
    auto f = open("decisions.csv");
    f << "t,d_v1,d_v2,verdict,x_N,v_upper,intersection,neighbor_id\n";
    for (const DecisionRecord& r : trace.decisions) {
      const DecisionEvent& e = r.event;
      f << fmt_num(e.t) << ',' << e.decision.d_v1 << ',' << e.decision.d_v2 << ','
        << to_string(e.decision.verdict) << ',' << csv::format_optional(e.x_n) << ','
        << csv::format_optional(e.v_upper) << ',' << r.intersection << ',' << e.neighbor_id
        << '\n';
    }
  }
  {
    auto f = open("distances.csv");
    f << "t_s,neighbor_id,distance_m\n";
    for (const DistanceRecord& r : trace.distances) {
      f << fmt_num(r.t) << ',' << r.id << ',' << fmt_num(r.distance) << '\n';
    }
  }
  for (std::size_t k = 0; k < config.intersections.size(); ++k) {
    const auto path = LaneExitPath::from_geometry(config.intersections[k].geometry);
    const std::string name = fmt::format("path_{}.csv", k + 1);
    auto f = open(name.c_str());
    f << "tau,x_m,y_m\n";
    for (const auto& [tau, p] : sample_path(path, 101)) {
      f << fmt_num(tau) << ',' << fmt_num(p.x) << ',' << fmt_num(p.y) << '\n';
    }
  }
  {
    auto f = open("summary.txt");
    f << format_summary(trace, config);
  }
}

}  // namespace lanexit

#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "lanexit/conflict_resolver.hpp"
#include "lanexit/depth_uncertainty.hpp"
#include "lanexit/geometry.hpp"

namespace lanexit {

/// Stereo unit rigidly mounted on the ego. yaw = 0 looks along the ego
/// heading, yaw = pi looks backwards.
struct CameraMount {
  std::string name = "front";
  double yaw = 0.0;
  double max_range = 150.0;
  double half_fov = 0.5 * std::numbers::pi;
};

struct MeasurementFrame {
  double t;
  double x_m;  // measured depth
  double y_m;  // lateral offset, noise free
};

/// Seeded source of uniform draws in [-1, 1]. The mapping from generator
/// output to doubles is fixed here so traces do not depend on the standard
/// library's distribution implementation.
class UniformNoise {
 public:
  explicit UniformNoise(std::uint64_t seed) : engine_(seed) {}

  double symmetric() {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

/// Sensor pose in the inertial frame for an ego pose and mount.
inline Pose sensor_pose(const Pose& ego, const CameraMount& mount) {
  return {ego.position, ego.heading + mount.yaw};
}

/// Measurement of a neighbor at `neighbor` seen from `ego` through `mount`.
/// The true depth x is mapped through the error model and perturbed by a
/// uniform draw in [-U_f f(x), +U_f f(x)] (none when `noise` is null).
/// Returns nullopt when the neighbor lies behind the sensor, outside its
/// field of view or range, or when the perturbed depth falls below beta3.
std::optional<MeasurementFrame> synthesize_measurement(const DepthErrorModel& model,
                                                       const Pose& ego, const CameraMount& mount,
                                                       Vec2 neighbor, double t,
                                                       UniformNoise* noise);

/// Inertial position implied by a computed depth and lateral offset.
inline Vec2 measured_position(const Pose& sensor, double depth, double y_m) {
  return sensor.position + rotate({depth, y_m}, sensor.heading);
}

}  // namespace lanexit

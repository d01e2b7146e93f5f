#include "lanexit/measurement.hpp"

#include <cmath>

namespace lanexit {

std::optional<MeasurementFrame> synthesize_measurement(const DepthErrorModel& model,
                                                       const Pose& ego, const CameraMount& mount,
                                                       Vec2 neighbor, double t,
                                                       UniformNoise* noise) {
  const Pose sensor = sensor_pose(ego, mount);
  const Vec2 rel = rotate(neighbor - sensor.position, -sensor.heading);
  if (rel.x < 0.0) return std::nullopt;
  if (norm(rel) > mount.max_range) return std::nullopt;
  if (std::abs(std::atan2(rel.y, rel.x)) > mount.half_fov) return std::nullopt;

  const double f = error_at(model, rel.x);
  const double eta = noise ? model.uncertainty_factor() * f * noise->symmetric() : 0.0;
  const double x_m = rel.x + f + eta;
  if (x_m < model.beta3()) return std::nullopt;
  return MeasurementFrame{t, x_m, rel.y};
}

}  // namespace lanexit

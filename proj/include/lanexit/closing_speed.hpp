#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lanexit/depth_uncertainty.hpp"

namespace lanexit {

/// Nominal closing speed between two depth samples and its bounds.
struct ClosingSpeedEstimate {
  double v_nom;
  double v_upper;
  double v_lower;
  DepthEstimate first;
  DepthEstimate second;
  double t1;
  double t2;
  double dt;
  double dx;  // second.computed - first.computed, negative when approaching

  /// Relative deviation of the upper bound from the nominal speed.
  double gamma_upper() const { return (v_upper - v_nom) / v_nom; }
};

/// Throws Error(kNotApproaching) unless t2 > t1 and the computed depth
/// decreases, Error(kOutOfDomain) when either estimate lacks a lower bound.
ClosingSpeedEstimate closing_speed(const DepthEstimate& first, double t1,
                                   const DepthEstimate& second, double t2);

class SamplingPlan {
 public:
  /// Throws Error(kInvalidArgument) unless epsilon > 0.
  SamplingPlan(double epsilon, DepthErrorModel model);

  double epsilon() const { return epsilon_; }
  const DepthErrorModel& model() const { return model_; }
  const BoundCoefficients& coefficients() const { return coeffs_; }

 private:
  double epsilon_;
  DepthErrorModel model_;
  BoundCoefficients coeffs_;
};

/// Depth x2 < x1 at which the next sample must be taken so that the upper
/// closing-speed bound deviates from the nominal speed by exactly epsilon:
///   (1 + epsilon) * (x1 - x2) = upper(x1) - lower(x2).
/// Throws Error(kOutOfDomain) when x1 has no lower bound and
/// Error(kInfeasible) when no such x2 exists.
double next_sample_depth(const SamplingPlan& plan, double x1);

struct DepthSample {
  double t;
  double measured;
};

/// Time-ordered depth measurements of one target.
class DepthStream {
 public:
  DepthStream() = default;
  /// Throws Error(kInvalidArgument) on non-increasing timestamps.
  explicit DepthStream(std::vector<DepthSample> samples);

  const std::vector<DepthSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<DepthSample> samples_;
};

/// Parses the `t_s,x_m_m` CSV layout. Errors carry line numbers.
DepthStream parse_depth_stream(std::istream& in);
DepthStream load_depth_stream(const std::string& path);

/// Incremental form of the adaptive sampling rule. The first measurement with
/// a valid lower bound becomes the anchor; each time the computed depth drops
/// to or below the target derived from the anchor an estimate is emitted and
/// the sample becomes the new anchor.
class StreamSampler {
 public:
  explicit StreamSampler(SamplingPlan plan);

  /// Feeds one frame. Returns a new estimate when a sampling instant occurs.
  std::optional<ClosingSpeedEstimate> push(double t, double measured);

  /// Forgets the anchor and current estimate.
  void reset();

  const std::optional<ClosingSpeedEstimate>& latest() const { return latest_; }
  const std::vector<DepthSample>& sampling_instants() const { return instants_; }
  std::optional<double> target() const { return target_; }
  /// True once the target falls outside the bound domain; no further
  /// estimates are produced until reset().
  bool exhausted() const { return exhausted_; }
  const SamplingPlan& plan() const { return plan_; }

 private:
  void set_anchor(double t, const DepthEstimate& est);

  SamplingPlan plan_;
  std::optional<DepthEstimate> anchor_;
  double anchor_t_ = 0.0;
  std::optional<double> target_;
  std::optional<double> last_t_;
  bool exhausted_ = false;
  std::optional<ClosingSpeedEstimate> latest_;
  std::vector<DepthSample> instants_;
};

std::vector<ClosingSpeedEstimate> sample_stream(const SamplingPlan& plan,
                                                const DepthStream& stream);

}  // namespace lanexit

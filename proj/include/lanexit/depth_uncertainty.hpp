#pragma once

#include <optional>

namespace lanexit {

/// Quadratic stereo depth error model f(x) = beta1*x^2 + beta2*x + beta3 with
/// the coefficient of determination of the fit. Validated on construction.
class DepthErrorModel {
 public:
  /// Throws Error(kInvalidModel) unless beta1 > 0, beta3 > 0,
  /// r_squared in (0,1) and f(x) > 0 for every x >= 0.
  DepthErrorModel(double beta1, double beta2, double beta3, double r_squared);

  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double beta3() const { return beta3_; }
  double r_squared() const { return r_squared_; }
  double uncertainty_factor() const { return 1.0 - r_squared_; }

 private:
  double beta1_;
  double beta2_;
  double beta3_;
  double r_squared_;
};

/// Constants of the closed-form depth bounds
///   upper = c0u + sqrt(c1u + c2u*x + c3u*x^2)
///   lower = c0l + sqrt(c1l + c2l*x + c3l*x^2),  x >= lower_domain_start
struct BoundCoefficients {
  double c0u, c1u, c2u, c3u;
  double c0l, c1l, c2l, c3l;
  double lower_domain_start;
};

struct DepthBounds {
  std::optional<double> lower;  // absent below lower_domain_start
  double upper;
};

struct DepthEstimate {
  double measured;
  double computed;
  std::optional<double> lower;
  double upper;

  /// Lower bound, or 0 when absent.
  double pessimistic_lower() const { return lower.value_or(0.0); }
};

/// f(x). Throws Error(kDomain) for negative x.
double error_at(const DepthErrorModel& model, double x);

/// Non-negative root x of x + f(x) = x_m. Throws
/// Error(kMeasurementBelowOffset) when x_m < beta3.
double solve_depth(const DepthErrorModel& model, double measured);

BoundCoefficients bound_coefficients(const DepthErrorModel& model);

/// Bounds on the computed depth `x` given the model's uncertainty factor.
DepthBounds depth_bounds(const DepthErrorModel& model, double x);
DepthBounds depth_bounds(const DepthErrorModel& model,
                         const BoundCoefficients& coeffs, double x);

DepthEstimate estimate_from_measurement(const DepthErrorModel& model, double measured);

}  // namespace lanexit

#include "lanexit/depth_uncertainty.hpp"

#include <cmath>
#include <string>

#include <fmt/core.h>

#include "lanexit/error.hpp"

namespace lanexit {

namespace {

// Radicand values in (-kRadicandSlack, 0) come from rounding at a domain
// boundary and are clamped to zero.
constexpr double kRadicandSlack = 1e-12;

// Non-negative root of a*x^2 + b*x + c = 0 with a > 0 and c <= 0, evaluated
// without cancellation.
double nonnegative_root(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  const double root = std::sqrt(std::max(disc, 0.0));
  if (b > 0.0) return (-2.0 * c) / (b + root);
  return (-b + root) / (2.0 * a);
}

// c0 + sqrt(radicand) where radicand - c0^2 == excess >= 0. When c0 < 0 the
// direct sum cancels, so the conjugate form is used.
double bound_value(double c0, double radicand, double excess) {
  if (radicand < 0.0) {
    if (radicand < -kRadicandSlack) {
      throw Error(ErrorCode::kInternal,
                  fmt::format("negative bound radicand {}", radicand));
    }
    radicand = 0.0;
  }
  const double root = std::sqrt(radicand);
  if (c0 < 0.0) {
    const double denom = root - c0;
    return denom > 0.0 ? excess / denom : 0.0;
  }
  return c0 + root;
}

}  // namespace

DepthErrorModel::DepthErrorModel(double beta1, double beta2, double beta3, double r_squared)
    : beta1_(beta1), beta2_(beta2), beta3_(beta3), r_squared_(r_squared) {
  if (!std::isfinite(beta1) || !(beta1 > 0.0)) {
    throw Error(ErrorCode::kInvalidModel, fmt::format("beta1 must be > 0 (got {})", beta1));
  }
  if (!std::isfinite(beta2)) {
    throw Error(ErrorCode::kInvalidModel, "beta2 must be finite");
  }
  if (!std::isfinite(beta3) || !(beta3 > 0.0)) {
    throw Error(ErrorCode::kInvalidModel, fmt::format("beta3 must be > 0 (got {})", beta3));
  }
  if (!(r_squared > 0.0 && r_squared < 1.0)) {
    throw Error(ErrorCode::kInvalidModel,
                fmt::format("r_squared must lie in (0,1) (got {})", r_squared));
  }
  // Measured depth exceeds computed depth everywhere: f has no root on x >= 0.
  const double vertex = -beta2 / (2.0 * beta1);
  if (vertex > 0.0 && beta1 * vertex * vertex + beta2 * vertex + beta3 <= 0.0) {
    throw Error(ErrorCode::kInvalidModel,
                "error polynomial must stay positive for x >= 0");
  }
}

double error_at(const DepthErrorModel& model, double x) {
  if (!(x >= 0.0)) {
    throw Error(ErrorCode::kDomain, fmt::format("depth must be >= 0 (got {})", x));
  }
  return (model.beta1() * x + model.beta2()) * x + model.beta3();
}

double solve_depth(const DepthErrorModel& model, double measured) {
  if (!(measured >= model.beta3())) {
    throw Error(ErrorCode::kMeasurementBelowOffset,
                fmt::format("measured depth {} is below beta3 = {}", measured,
                            model.beta3()));
  }
  return nonnegative_root(model.beta1(), model.beta2() + 1.0, model.beta3() - measured);
}

BoundCoefficients bound_coefficients(const DepthErrorModel& model) {
  const double b1 = model.beta1();
  const double b2 = model.beta2();
  const double b3 = model.beta3();
  const double u = model.uncertainty_factor();

  BoundCoefficients c{};
  c.c0u = -(b2 + 1.0 - b2 * u) / (2.0 * b1 * (1.0 - u));
  c.c1u = c.c0u * c.c0u + b3 * u / (b1 * (1.0 - u));
  c.c2u = (b2 + 1.0) / (b1 * (1.0 - u));
  c.c3u = 1.0 / (1.0 - u);

  c.c0l = -(b2 + 1.0 + b2 * u) / (2.0 * b1 * (1.0 + u));
  c.c1l = c.c0l * c.c0l - b3 * u / (b1 * (1.0 + u));
  c.c2l = (b2 + 1.0) / (b1 * (1.0 + u));
  c.c3l = 1.0 / (1.0 + u);

  // Computed depth at which x_m = beta3 * (1 + U_f): root of
  // beta1*x^2 + (beta2 + 1)*x - beta3*U_f = 0.
  c.lower_domain_start = nonnegative_root(b1, b2 + 1.0, -b3 * u);
  return c;
}

DepthBounds depth_bounds(const DepthErrorModel& model, const BoundCoefficients& c, double x) {
  if (!(x >= 0.0)) {
    throw Error(ErrorCode::kDomain, fmt::format("depth must be >= 0 (got {})", x));
  }
  const double b1 = model.beta1();
  const double b3 = model.beta3();
  const double u = model.uncertainty_factor();

  DepthBounds out{};
  const double excess_u = b3 * u / (b1 * (1.0 - u)) + (c.c2u + c.c3u * x) * x;
  out.upper = bound_value(c.c0u, c.c1u + (c.c2u + c.c3u * x) * x, excess_u);

  if (x >= c.lower_domain_start) {
    double excess_l = -b3 * u / (b1 * (1.0 + u)) + (c.c2l + c.c3l * x) * x;
    if (excess_l < 0.0) {
      if (excess_l < -kRadicandSlack) {
        throw Error(ErrorCode::kInternal,
                    fmt::format("negative lower-bound radicand excess {}", excess_l));
      }
      excess_l = 0.0;
    }
    out.lower = bound_value(c.c0l, c.c1l + (c.c2l + c.c3l * x) * x, excess_l);
  }
  return out;
}

DepthBounds depth_bounds(const DepthErrorModel& model, double x) {
  return depth_bounds(model, bound_coefficients(model), x);
}

DepthEstimate estimate_from_measurement(const DepthErrorModel& model, double measured) {
  const double x = solve_depth(model, measured);
  const DepthBounds b = depth_bounds(model, x);
  return DepthEstimate{measured, x, b.lower, b.upper};
}

}  // namespace lanexit

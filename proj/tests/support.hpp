#pragma once

#include <cmath>
#include <numbers>

#include "lanexit/depth_uncertainty.hpp"
#include "lanexit/path_planner.hpp"

namespace lanexit::testing {

// Calibrated stereo error model used throughout the evaluation.
inline DepthErrorModel reference_model() { return DepthErrorModel(0.002797, -0.004249, 0.007311, 0.9); }

inline LaneGeometry first_intersection() {
  return {{2.5, -2.7}, {11.65, 6.95}, 0.0, std::numbers::pi / 2};
}

inline LaneGeometry second_intersection() {
  return {{11.65, 20.2}, {2.98, 33.2}, std::numbers::pi / 2, std::atan2(5.0, -8.67)};
}

// Brute-force oracles, deliberately independent of the production code paths.

inline double poly(const DepthErrorModel& m, double x) {
  return m.beta1() * x * x + m.beta2() * x + m.beta3();
}

/// Root of g on [lo, hi] where g changes sign, by plain bisection.
template <typename G>
double bisect(G g, double lo, double hi, int iterations = 200) {
  double glo = g(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Computed depth whose measurement is x_m, by bisection on x + f(x) = x_m.
inline double depth_by_bisection(const DepthErrorModel& m, double x_m) {
  return bisect([&](double x) { return x + poly(m, x) - x_m; }, 0.0, x_m);
}

/// Upper bound for computed depth x: solves x_m - x_u = (1-U) f(x_u).
inline double upper_by_bisection(const DepthErrorModel& m, double x) {
  const double x_m = x + poly(m, x);
  const double u = 1.0 - m.r_squared();
  return bisect([&](double y) { return x_m - y - (1.0 - u) * poly(m, y); }, 0.0, x_m + 1.0);
}

/// Lower bound for computed depth x: solves x_m - x_l = (1+U) f(x_l).
inline double lower_by_bisection(const DepthErrorModel& m, double x) {
  const double x_m = x + poly(m, x);
  const double u = 1.0 - m.r_squared();
  return bisect([&](double y) { return x_m - y - (1.0 + u) * poly(m, y); }, 0.0, x_m);
}

}  // namespace lanexit::testing

#include "lanexit/path_planner.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "lanexit/error.hpp"

namespace lanexit {

namespace {

constexpr double kCollinearTol = 1e-9;  // m^2
constexpr double kTotalQuadratureTol = 1e-8;

// Lane direction with components below rounding noise snapped to zero so
// axis-aligned lanes intersect exactly.
Vec2 lane_direction(double theta) {
  Vec2 u = unit_vector(theta);
  if (std::abs(u.x) < 1e-15) u.x = 0.0;
  if (std::abs(u.y) < 1e-15) u.y = 0.0;
  return u;
}

template <typename F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

double segment_tol() { return kTotalQuadratureTol / (LaneExitPath::kTableKnots - 1); }

double knot_tau(int k) { return static_cast<double>(k) / (LaneExitPath::kTableKnots - 1); }

}  // namespace

Vec2 intermediate_control_point(const LaneGeometry& g) {
  const Vec2 ui = lane_direction(g.theta_i);
  const Vec2 uf = lane_direction(g.theta_f);
  const double denom = cross(ui, uf);
  if (std::abs(denom) < 1e-12) {
    throw Error(ErrorCode::kNoIntersection,
                fmt::format("lanes are parallel (theta_i={}, theta_f={})", g.theta_i,
                            g.theta_f));
  }
  const double s = cross(g.p_f - g.p_i, uf) / denom;
  return g.p_i + s * ui;
}

LaneExitPath::LaneExitPath(Vec2 p_i, Vec2 p_int, Vec2 p_f)
    : p_i_(p_i), p_int_(p_int), p_f_(p_f) {
  const double area2 = cross(p_int - p_i, p_f - p_i);
  if (std::abs(area2) <= kCollinearTol) {
    // Extreme pair among the three collinear points.
    const Vec2 pts[3] = {p_i, p_int, p_f};
    double best = -1.0;
    Vec2 a = p_i;
    Vec2 b = p_f;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const double d = distance(pts[i], pts[j]);
        if (d > best) {
          best = d;
          a = pts[i];
          b = pts[j];
        }
      }
    }
    hull_ = {a, b};
  } else if (area2 > 0.0) {
    hull_ = {p_i, p_int, p_f};
  } else {
    hull_ = {p_i, p_f, p_int};
  }

  cumulative_.resize(kTableKnots);
  cumulative_[0] = 0.0;
  const auto speed = [this](double t) { return speed_at(t); };
  for (int k = 1; k < kTableKnots; ++k) {
    cumulative_[k] =
        cumulative_[k - 1] + adaptive_simpson(speed, knot_tau(k - 1), knot_tau(k), segment_tol());
  }
  arc_length_ = cumulative_.back();
}

LaneExitPath LaneExitPath::from_geometry(const LaneGeometry& geom) {
  return LaneExitPath(geom.p_i, intermediate_control_point(geom), geom.p_f);
}

Vec2 LaneExitPath::evaluate(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kDomain, fmt::format("tau {} outside [0,1]", tau));
  }
  if (tau == 0.0) return p_i_;
  if (tau == 1.0) return p_f_;
  const double u = 1.0 - tau;
  return (u * u) * p_i_ + (2.0 * tau * u) * p_int_ + (tau * tau) * p_f_;
}

Vec2 LaneExitPath::derivative(double tau) const {
  return (-2.0 * (1.0 - tau)) * p_i_ + (2.0 * (1.0 - 2.0 * tau)) * p_int_ + (2.0 * tau) * p_f_;
}

double LaneExitPath::heading(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kDomain, fmt::format("tau {} outside [0,1]", tau));
  }
  const Vec2 d = derivative(tau);
  const double scale = std::max({norm(p_i_), norm(p_int_), norm(p_f_), 1.0});
  if (norm(d) <= 1e-12 * scale) {
    throw Error(ErrorCode::kUndefinedHeading,
                fmt::format("path tangent vanishes at tau={}", tau));
  }
  return std::atan2(d.y, d.x);
}

double LaneExitPath::arc_length_at(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kDomain, fmt::format("tau {} outside [0,1]", tau));
  }
  const int k = std::min(static_cast<int>(tau * (kTableKnots - 1)), kTableKnots - 2);
  const auto speed = [this](double t) { return speed_at(t); };
  return cumulative_[k] + adaptive_simpson(speed, knot_tau(k), tau, segment_tol());
}

double LaneExitPath::traversal_time(double speed) const {
  if (!(speed > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("traversal speed must be > 0 (got {})", speed));
  }
  return arc_length_ / speed;
}

double LaneExitPath::arc_length_to_tau(double s) const {
  if (!(s >= 0.0 && s <= arc_length_)) {
    throw Error(ErrorCode::kDomain,
                fmt::format("arc length {} outside [0, {}]", s, arc_length_));
  }
  if (s == 0.0) return 0.0;
  if (s == arc_length_) return 1.0;

  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const int k = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, kTableKnots - 2);
  double lo = knot_tau(k);
  double hi = knot_tau(k + 1);
  const double span = cumulative_[k + 1] - cumulative_[k];
  double tau = span > 0.0 ? lo + (hi - lo) * (s - cumulative_[k]) / span : lo;

  // Safeguarded Newton on g(tau) = arc_length_at(tau) - s within [lo, hi].
  const auto speed = [this](double t) { return speed_at(t); };
  for (int i = 0; i < 60; ++i) {
    const double g = cumulative_[k] + adaptive_simpson(speed, knot_tau(k), tau, segment_tol()) - s;
    if (std::abs(g) < 1e-12) break;
    if (g > 0.0) {
      hi = tau;
    } else {
      lo = tau;
    }
    const double v = speed_at(tau);
    double next = v > 0.0 ? tau - g / v : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == tau) break;
    tau = next;
  }
  return tau;
}

std::vector<std::pair<double, Vec2>> sample_path(const LaneExitPath& path, int count) {
  if (count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 2");
  }
  std::vector<std::pair<double, Vec2>> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double tau = i == count - 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    out.emplace_back(tau, path.evaluate(tau));
  }
  return out;
}

}  // namespace lanexit

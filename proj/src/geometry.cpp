#include "lanexit/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "lanexit/error.hpp"

namespace lanexit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kMeasurementBelowOffset: return "measurement-below-offset";
    case ErrorCode::kInvalidModel: return "invalid-model";
    case ErrorCode::kNotApproaching: return "not-approaching";
    case ErrorCode::kOutOfDomain: return "estimate-out-of-domain";
    case ErrorCode::kInfeasible: return "epsilon-infeasible-at-depth";
    case ErrorCode::kNoIntersection: return "no-intersection";
    case ErrorCode::kUndefinedHeading: return "undefined-heading";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

namespace {

struct Interval {
  double lo;
  double hi;
};

Interval project(std::span<const Vec2> poly, Vec2 axis) {
  Interval out{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  for (const Vec2& v : poly) {
    const double p = dot(v, axis);
    out.lo = std::min(out.lo, p);
    out.hi = std::max(out.hi, p);
  }
  return out;
}

// Edge normals of a convex polygon plus, for degenerate shapes, the segment
// direction so that collinear segments can still be separated.
void collect_axes(std::span<const Vec2> poly, std::vector<Vec2>& axes) {
  const std::size_t n = poly.size();
  if (n < 2) return;
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) {
    const Vec2 e = poly[(i + 1) % n] - poly[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    axes.push_back({-e.y / len, e.x / len});
    if (n == 2) axes.push_back({e.x / len, e.y / len});
  }
}

}  // namespace

bool convex_intersect(std::span<const Vec2> a, std::span<const Vec2> b, double tol) {
  if (a.empty() || b.empty()) return false;
  std::vector<Vec2> axes;
  collect_axes(a, axes);
  collect_axes(b, axes);
  if (axes.empty()) {
    // Two points.
    return distance(a.front(), b.front()) <= tol;
  }
  // A point against a polygon has no axes of its own; the polygon's normals
  // suffice only if it is not degenerate, so add the point-to-vertex direction.
  if (a.size() == 1 || b.size() == 1) {
    const Vec2 p = a.size() == 1 ? a.front() : b.front();
    const auto other = a.size() == 1 ? b : a;
    for (const Vec2& v : other) {
      const Vec2 d = v - p;
      const double len = norm(d);
      if (len > 0.0) axes.push_back({d.x / len, d.y / len});
    }
  }
  for (const Vec2& axis : axes) {
    const Interval pa = project(a, axis);
    const Interval pb = project(b, axis);
    if (pa.hi < pb.lo - tol || pb.hi < pa.lo - tol) return false;
  }
  return true;
}

bool convex_contains(std::span<const Vec2> poly, Vec2 p, double tol) {
  const Vec2 single[] = {p};
  if (poly.size() < 3) return convex_intersect(poly, single, tol);
  // Orientation-independent half-plane test with distance tolerance.
  double sign = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double c = cross(b - a, poly[(i + 2) % n] - a);
    if (c != 0.0) {
      sign = c > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  if (sign == 0.0) return convex_intersect(poly, single, tol);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 e = poly[(i + 1) % n] - a;
    const double len = norm(e);
    if (len == 0.0) continue;
    const double signed_dist = sign * cross(e, p - a) / len;
    if (signed_dist < -tol) return false;
  }
  return true;
}

double segment_line_parameter(Vec2 a, Vec2 b, Vec2 point, Vec2 dir) {
  const Vec2 ab = b - a;
  const double denom = cross(ab, dir);
  if (std::abs(denom) < 1e-15 * norm(ab) * norm(dir)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return cross(point - a, dir) / denom;
}

}  // namespace lanexit

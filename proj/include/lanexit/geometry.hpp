#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace lanexit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Unit vector at `angle` radians from the +x axis.
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Rotates `v` counterclockwise by `angle` (body frame -> inertial frame).
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Convex polygon as an ordered vertex list. One or two vertices describe a
/// degenerate point or segment.
using Polygon = std::vector<Vec2>;

/// Point-in-convex-polygon test; points within `tol` of the boundary count as
/// inside. Works for counterclockwise or clockwise ordering and for degenerate
/// segment/point polygons.
bool convex_contains(std::span<const Vec2> poly, Vec2 p, double tol = 1e-9);

/// Separating-axis test for two convex polygons. Shapes whose gap along every
/// candidate axis is at most `tol` are reported as intersecting, so touching
/// boundaries count as overlap.
bool convex_intersect(std::span<const Vec2> a, std::span<const Vec2> b,
                      double tol = 1e-9);

/// Parameter `s` along segment a->b where it meets the infinite line through
/// `point` with direction `dir`. NaN when the two are parallel.
double segment_line_parameter(Vec2 a, Vec2 b, Vec2 point, Vec2 dir);

}  // namespace lanexit

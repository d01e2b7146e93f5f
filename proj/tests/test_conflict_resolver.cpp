#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lanexit/conflict_resolver.hpp"
#include "lanexit/error.hpp"
#include "lanexit/path_planner.hpp"
#include "support.hpp"

using namespace lanexit;
using lanexit::testing::first_intersection;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

void expect_corners(const ObstacleRegion& r, double x0, double x1, double y0, double y1) {
  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  for (Vec2 c : r.corners) {
    lo_x = std::min(lo_x, c.x);
    hi_x = std::max(hi_x, c.x);
    lo_y = std::min(lo_y, c.y);
    hi_y = std::max(hi_y, c.y);
  }
  EXPECT_NEAR(lo_x, x0, 1e-12);
  EXPECT_NEAR(hi_x, x1, 1e-12);
  EXPECT_NEAR(lo_y, y0, 1e-12);
  EXPECT_NEAR(hi_y, y1, 1e-12);
}

// Westbound neighbor lane 4 m left of the ego lane at the first intersection.
NeighborLane west_lane() { return {{0.0, 1.3}, kPi}; }

ConflictInputs first_inputs(std::optional<double> v_upper) {
  const auto path = LaneExitPath::from_geometry(first_intersection());
  const auto cx = centerline_crossings(path.p_i(), path.p_int(), path.p_f(), west_lane());
  ConflictInputs in;
  in.hull = path.convex_hull();
  in.x_p1 = cx.x_p1;
  in.x_p2 = cx.x_p2;
  in.lane = west_lane();
  in.t_c = path.traversal_time(7.0);
  in.v_upper = v_upper;
  return in;
}

// Region of a neighbor centred on the lane at upstream coordinate s, with a
// +-0.3 m depth band, as seen by a sensor looking along +x.
ObstacleRegion region_at(double s) {
  return obstacle_region(Pose{{0.0, 1.3}, 0.0}, s - 0.3, s + 0.3, 0.0, VehicleDims{});
}

}  // namespace

TEST(ObstacleRegion, AxisAligned) {
  const auto r = obstacle_region(Pose{{0, 0}, 0.0}, 10.0, 10.0, 0.0, VehicleDims{3.8, 1.8});
  expect_corners(r, 8.1, 11.9, -0.9, 0.9);
}

TEST(ObstacleRegion, Rotated) {
  const auto r = obstacle_region(Pose{{0, 0}, kPi / 2}, 10.0, 10.0, 0.0, VehicleDims{3.8, 1.8});
  expect_corners(r, -0.9, 0.9, 8.1, 11.9);
}

TEST(ObstacleRegion, ExtentFollowsBand) {
  const auto r = obstacle_region(Pose{{1, 2}, 0.7}, 9.5, 10.6, -0.4, VehicleDims{3.8, 1.8});
  EXPECT_NEAR(distance(r.corners[0], r.corners[1]), 4.9, 1e-12);
  EXPECT_NEAR(distance(r.corners[1], r.corners[2]), 1.8, 1e-12);
  // edges parallel/perpendicular to the heading
  const Vec2 e = r.corners[1] - r.corners[0];
  EXPECT_NEAR(cross(unit_vector(0.7), e), 0.0, 1e-12);
}

TEST(ObstacleRegion, MissingLowerUsesZero) {
  const DepthEstimate est{0.0073, 0.0, std::nullopt, 0.002};
  const auto r = obstacle_region(Pose{{0, 0}, 0.0}, est, 0.0, VehicleDims{});
  expect_corners(r, -1.9, 1.902, -0.9, 0.9);
}

TEST(Crossings, HorizontalCenterline) {
  const auto path = LaneExitPath::from_geometry(first_intersection());
  const auto cx = centerline_crossings(path.p_i(), path.p_int(), path.p_f(), {{0, 3.0}, kPi});
  const double t = (3.0 + 2.7) / 9.65;
  EXPECT_NEAR(cx.x_p1.x, 2.5 + 9.15 * t, 1e-9);
  EXPECT_NEAR(cx.x_p1.y, 3.0, 1e-9);
  EXPECT_NEAR(cx.x_p2.x, 11.65, 1e-9);
  EXPECT_NEAR(cx.x_p2.y, 3.0, 1e-9);
}

TEST(Crossings, ThroughExitPoint) {
  const auto path = LaneExitPath::from_geometry(first_intersection());
  const auto cx = centerline_crossings(path.p_i(), path.p_int(), path.p_f(), {{0, 6.95}, 0.0});
  EXPECT_EQ(cx.x_p1, path.p_f());
  EXPECT_EQ(cx.x_p2, path.p_f());
}

TEST(Crossings, MissingSegmentsRejected) {
  const auto path = LaneExitPath::from_geometry(first_intersection());
  EXPECT_EQ(code_of([&] { centerline_crossings(path.p_i(), path.p_int(), path.p_f(), {{0, 20.0}, 0.0}); }),
            ErrorCode::kNoIntersection);
  // parallel to P_int -> P_f and offset from it
  EXPECT_EQ(code_of([&] { centerline_crossings(path.p_i(), path.p_int(), path.p_f(), {{30.0, 0}, kPi / 2}); }),
            ErrorCode::kNoIntersection);
}

TEST(RegionsIntersect, BasicCases) {
  const auto path = LaneExitPath::from_geometry(first_intersection());
  const auto& hull = path.convex_hull();
  EXPECT_FALSE(regions_intersect(obstacle_region(Pose{{50, 50}, 0.0}, 5, 6, 0, {}), hull));
  const Vec2 centroid = (1.0 / 3.0) * (hull[0] + hull[1] + hull[2]);
  EXPECT_TRUE(regions_intersect(obstacle_region(Pose{centroid, 0.0}, -0.5, 0.5, 0, {}), hull));
  // rectangle whose edge lies on the hull's bottom edge: touching counts
  const auto touching = obstacle_region(Pose{{5.0, -2.7}, 0.0}, 0.0, 0.0, -0.9, {});
  EXPECT_TRUE(regions_intersect(touching, hull));
}

TEST(RegionsIntersect, MonteCarloOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> depth(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int boundary_cases = 0;
  int positives = 0;
  constexpr int kPairs = 1000;
  constexpr int kGrid = 100;  // 10^4 samples per shape
  for (int n = 0; n < kPairs; ++n) {
    Polygon tri{{pos(rng), pos(rng)}, {pos(rng), pos(rng)}, {pos(rng), pos(rng)}};
    if (cross(tri[1] - tri[0], tri[2] - tri[0]) < 0) std::swap(tri[1], tri[2]);
    if (std::abs(cross(tri[1] - tri[0], tri[2] - tri[0])) < 1.0) continue;
    const double lo = depth(rng);
    const auto rect = obstacle_region(Pose{{pos(rng), pos(rng)}, ang(rng)}, lo, lo + depth(rng),
                                      0.0, VehicleDims{});
    const Polygon r = rect.polygon();

    const auto inside = [](const Polygon& poly, Vec2 p, double slack) {
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        if (cross(b - a, p - a) / norm(b - a) < -slack) return false;
      }
      return true;
    };
    bool hit = false;
    for (int i = 0; i <= kGrid && !hit; ++i) {
      for (int j = 0; j <= kGrid && !hit; ++j) {
        const double u = double(i) / kGrid, v = double(j) / kGrid;
        const Vec2 pr = r[0] + u * (r[1] - r[0]) + v * (r[3] - r[0]);
        if (inside(tri, pr, 0.0)) hit = true;
        if (u + v <= 1.0) {
          const Vec2 pt = tri[0] + u * (tri[1] - tri[0]) + v * (tri[2] - tri[0]);
          if (inside(r, pt, 0.0)) hit = true;
        }
      }
    }
    const bool sat = regions_intersect(rect, tri);
    positives += sat;
    if (hit) {
      ASSERT_TRUE(sat) << "pair " << n;
    } else if (sat) {
      // overlap thinner than the sampling grid: must vanish under a slack of
      // one grid cell on both shapes
      const double cell = 2.0 * std::max(norm(r[1] - r[0]), 20.0) / kGrid;
      bool near = false;
      for (Vec2 p : tri) near = near || inside(r, p, cell);
      for (Vec2 p : r) near = near || inside(tri, p, cell);
      for (int i = 0; i <= kGrid * 4 && !near; ++i) {
        const double u = double(i) / (kGrid * 4);
        for (std::size_t k = 0; k < 3 && !near; ++k) {
          near = inside(r, tri[k] + u * (tri[(k + 1) % 3] - tri[k]), cell);
        }
      }
      ASSERT_TRUE(near) << "pair " << n;
      ++boundary_cases;
    }
  }
  EXPECT_GT(positives, 50);
  EXPECT_LT(boundary_cases, kPairs / 50);
}

TEST(Decision, ReceedingNeighborProceeds) {
  const auto in = first_inputs(std::nullopt);
  const double xp1 = in.lane.upstream(in.x_p1);
  const double x_n = xp1 - in.d_s - 5.0;
  const auto d = evaluate_decision(in, x_n, region_at(x_n), 3.0);
  EXPECT_EQ(d.d_v1, 1);
  EXPECT_EQ(d.verdict, Verdict::kProceed);
  EXPECT_DOUBLE_EQ(d.evaluated_at, 3.0);
}

TEST(Decision, FarNeighborCertifiedByPrediction) {
  const double v_upper = 12.0;
  const auto in = first_inputs(v_upper);
  const double xp2 = in.lane.upstream(in.x_p2);
  const double x_n = xp2 + in.d_s + (v_upper + in.v_e) * in.t_c + 1.0;
  const auto d = evaluate_decision(in, x_n, region_at(x_n), 0.0);
  EXPECT_EQ(d.d_v1, -1);
  EXPECT_EQ(d.d_v2, 1);
  EXPECT_EQ(d.verdict, Verdict::kProceed);
  // one metre short of the margin the prediction lands inside it
  const double x_short = x_n - 2.0;
  EXPECT_EQ(evaluate_decision(in, x_short, region_at(x_short), 0.0).d_v2, -1);
}

TEST(Decision, OverlappingRegionWaits) {
  const auto in = first_inputs(30.0);
  const auto d = evaluate_decision(in, 8.0, region_at(8.0), 0.0);
  EXPECT_EQ(d.d_v1, -1);
  EXPECT_EQ(d.d_v2, -1);
  EXPECT_EQ(d.verdict, Verdict::kWait);
}

TEST(Decision, NoClosingSpeedMeansNoPrediction) {
  const auto in = first_inputs(std::nullopt);
  const auto d = evaluate_decision(in, 500.0, region_at(500.0), 0.0);
  EXPECT_EQ(d.d_v2, -1);
  EXPECT_EQ(d.verdict, Verdict::kWait);
}

TEST(Decision, PredictionIsMonotoneInSpeedBound) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> start(-20.0, 150.0);
  for (int n = 0; n < 300; ++n) {
    const double x_n = start(rng);
    bool certified_before = true;
    for (double v = 0.0; v <= 40.0; v += 0.25) {
      const auto d = evaluate_decision(first_inputs(v), x_n, region_at(x_n), 0.0);
      ASSERT_FALSE(d.d_v2 == 1 && !certified_before) << "x_n=" << x_n << " v=" << v;
      certified_before = d.d_v2 == 1;
      ASSERT_EQ(d.verdict == Verdict::kWait, d.d_v1 == -1 && d.d_v2 == -1);
    }
  }
}

TEST(Decision, Deterministic) {
  const auto in = first_inputs(9.0);
  const auto a = evaluate_decision(in, 60.0, region_at(60.0), 1.0);
  const auto b = evaluate_decision(in, 60.0, region_at(60.0), 1.0);
  EXPECT_EQ(a.d_v1, b.d_v1);
  EXPECT_EQ(a.d_v2, b.d_v2);
  EXPECT_EQ(a.verdict, b.verdict);
}

TEST(ConflictInputs, Validation) {
  auto in = first_inputs(1.0);
  in.d_s = 0.0;
  EXPECT_EQ(code_of([&] { in.validate(); }), ErrorCode::kInvalidArgument);
  in = first_inputs(1.0);
  in.t_c = 0.0;
  EXPECT_EQ(code_of([&] { WaitLoop(in, 0.0, 1.0); }), ErrorCode::kInvalidArgument);
}

TEST(WaitLoop, NeighborAlreadyPast) {
  const auto in = first_inputs(std::nullopt);
  const auto r = run_wait_loop(in, 2.0, {}, [](double) {
    return std::vector<NeighborObservation>{{"a", -10.0, region_at(-10.0), std::nullopt}};
  });
  EXPECT_TRUE(r.committed);
  EXPECT_EQ(r.wait_ticks, 0);
  EXPECT_DOUBLE_EQ(*r.commit_time, 2.0);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].neighbor_id, "a");
}

TEST(WaitLoop, NoNeighborsProceedImmediately) {
  const auto r = run_wait_loop(first_inputs(std::nullopt), 0.0, {},
                               [](double) { return std::vector<NeighborObservation>{}; });
  EXPECT_TRUE(r.committed);
  EXPECT_EQ(r.wait_ticks, 0);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].decision.d_v1, 1);
  EXPECT_EQ(r.events[0].decision.d_v2, 1);
}

TEST(WaitLoop, ParkedNeighborTimesOut) {
  WaitLoopOptions opts;
  opts.timeout = 2.0;
  const auto r = run_wait_loop(first_inputs(0.0), 0.0, opts, [](double) {
    return std::vector<NeighborObservation>{{"parked", 9.0, region_at(9.0), 0.0}};
  });
  EXPECT_FALSE(r.committed);
  EXPECT_FALSE(r.deadlock_report.empty());
  EXPECT_GE(r.wait_ticks, 200);
  for (const auto& e : r.events) EXPECT_EQ(e.decision.verdict, Verdict::kWait);
}

TEST(WaitLoop, WaitsForApproachingNeighbor) {
  const auto in = first_inputs(std::nullopt);
  const double xp1 = in.lane.upstream(in.x_p1);
  const auto position = [](double t) { return 30.0 - 8.0 * t; };
  const auto r = run_wait_loop(in, 0.0, {}, [&](double t) {
    const double x = position(t);
    // upper bound with 20% slack over the true 8 m/s
    return std::vector<NeighborObservation>{{"n", x, region_at(x), 9.6}};
  });
  ASSERT_TRUE(r.committed);
  EXPECT_GT(r.wait_ticks, 0);
  // proceeds once the neighbor has crossed, not while it is still coming
  EXPECT_LT(position(*r.commit_time), xp1 - in.d_s);
  EXPECT_GE(position(*r.commit_time - 0.01), xp1 - in.d_s - 1e-9);
  EXPECT_EQ(r.events.back().decision.d_v1, 1);
}

TEST(WaitLoop, CommitIsFinal) {
  WaitLoop loop(first_inputs(std::nullopt), 0.0, std::nullopt);
  const std::vector<NeighborObservation> past{{"n", -10.0, region_at(-10.0), std::nullopt}};
  const std::vector<NeighborObservation> blocking{{"n", 9.0, region_at(9.0), std::nullopt}};
  EXPECT_EQ(loop.evaluate(0.0, past), Verdict::kProceed);
  EXPECT_EQ(loop.evaluate(0.01, blocking), Verdict::kProceed);
  EXPECT_EQ(loop.events().size(), 1u);
  EXPECT_FALSE(loop.timed_out(1e9));
}

TEST(WaitLoop, EveryNeighborMustClear) {
  WaitLoop loop(first_inputs(std::nullopt), 0.0, 10.0);
  const std::vector<NeighborObservation> mixed{{"gone", -10.0, region_at(-10.0), std::nullopt},
                                               {"here", 9.0, region_at(9.0), std::nullopt}};
  EXPECT_EQ(loop.evaluate(0.0, mixed), Verdict::kWait);
  EXPECT_EQ(loop.events().size(), 2u);
  EXPECT_EQ(loop.wait_ticks(), 1);
}

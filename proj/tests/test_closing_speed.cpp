#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lanexit/closing_speed.hpp"
#include "lanexit/error.hpp"
#include "support.hpp"

using namespace lanexit;
using lanexit::testing::reference_model;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

DepthEstimate exact(double x) { return {x, x, x, x}; }

// (1+eps)(x1 - x2) = upper(x1) - lower(x2) solved by bisection, with both
// bounds themselves obtained by bisection on their defining identities.
double oracle_next_depth(const DepthErrorModel& m, double eps, double x1) {
  using lanexit::testing::lower_by_bisection;
  using lanexit::testing::upper_by_bisection;
  const double x1u = upper_by_bisection(m, x1);
  const double start = bound_coefficients(m).lower_domain_start;
  const auto g = [&](double x2) { return (1 + eps) * (x1 - x2) - (x1u - lower_by_bisection(m, x2)); };
  return lanexit::testing::bisect(g, start, x1);
}

// Upper-bound deviation from the bounds evaluated directly from the
// definitions: v = -(x2 - x1)/dt, v_u = -(x2_l - x1_u)/dt.
double gamma_from_definitions(const DepthErrorModel& m, double x1, double x2) {
  const double x1u = lanexit::testing::upper_by_bisection(m, x1);
  const double x2l = lanexit::testing::lower_by_bisection(m, x2);
  const double dt = 0.37;  // any interval; gamma is independent of it
  const double v = (x1 - x2) / dt;
  const double vu = (x1u - x2l) / dt;
  return (vu - v) / v;
}

}  // namespace

TEST(ClosingSpeed, CollapsesWithoutUncertainty) {
  const auto c = closing_speed(exact(50.0), 0.0, exact(45.0), 0.5);
  EXPECT_DOUBLE_EQ(c.v_nom, 10.0);
  EXPECT_DOUBLE_EQ(c.v_upper, 10.0);
  EXPECT_DOUBLE_EQ(c.v_lower, 10.0);
  EXPECT_DOUBLE_EQ(c.dx, -5.0);
  EXPECT_DOUBLE_EQ(c.dt, 0.5);
}

TEST(ClosingSpeed, BoundsFromEstimates) {
  const DepthEstimate a{0, 50.0, 49.0, 51.5};
  const DepthEstimate b{0, 45.0, 44.5, 45.25};
  const auto c = closing_speed(a, 1.0, b, 1.5);
  EXPECT_DOUBLE_EQ(c.v_nom, 10.0);
  EXPECT_DOUBLE_EQ(c.v_upper, (51.5 - 44.5) / 0.5);
  EXPECT_DOUBLE_EQ(c.v_lower, (49.0 - 45.25) / 0.5);
  EXPECT_LE(c.v_lower, c.v_nom);
  EXPECT_LE(c.v_nom, c.v_upper);
}

TEST(ClosingSpeed, EqualDepthIsNotApproaching) {
  EXPECT_EQ(code_of([] { closing_speed(exact(40.0), 0.0, exact(40.0), 1.0); }),
            ErrorCode::kNotApproaching);
  EXPECT_EQ(code_of([] { closing_speed(exact(40.0), 0.0, exact(41.0), 1.0); }),
            ErrorCode::kNotApproaching);
}

TEST(ClosingSpeed, NonIncreasingTimeRejected) {
  EXPECT_EQ(code_of([] { closing_speed(exact(40.0), 1.0, exact(39.0), 1.0); }),
            ErrorCode::kInvalidArgument);
}

TEST(ClosingSpeed, MissingLowerBoundIsOutOfDomain) {
  const DepthEstimate near{0.0073, 0.0, std::nullopt, 0.001};
  EXPECT_EQ(code_of([&] { closing_speed(exact(1.0), 0.0, near, 1.0); }), ErrorCode::kOutOfDomain);
}

TEST(SamplingPlan, RejectsNonPositiveEpsilon) {
  EXPECT_EQ(code_of([] { SamplingPlan(0.0, reference_model()); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { SamplingPlan(-0.1, reference_model()); }), ErrorCode::kInvalidArgument);
}

TEST(NextSampleDepth, EpsilonExactAtHundred) {
  const auto m = reference_model();
  const SamplingPlan plan(0.2, m);
  const double x2 = next_sample_depth(plan, 100.0);
  ASSERT_LT(x2, 100.0);
  EXPECT_NEAR(gamma_from_definitions(m, 100.0, x2), 0.2, 1e-6);

  const auto c = closing_speed(estimate_from_measurement(m, 100.0 + error_at(m, 100.0)), 0.0,
                               estimate_from_measurement(m, x2 + error_at(m, x2)), 1.0);
  EXPECT_NEAR(c.gamma_upper(), 0.2, 1e-6);
}

TEST(NextSampleDepth, MatchesBisectionOracle) {
  const auto m = reference_model();
  for (double eps : {0.05, 0.2, 0.5, 1.0}) {
    const SamplingPlan plan(eps, m);
    for (double x1 : {5.0, 20.0, 63.0, 100.0, 150.0}) {
      EXPECT_NEAR(next_sample_depth(plan, x1), oracle_next_depth(m, eps, x1), 1e-9)
          << "eps=" << eps << " x1=" << x1;
    }
  }
}

TEST(NextSampleDepth, LargeEpsilonSamplesFast) {
  const SamplingPlan plan(1e6, reference_model());
  const double x2 = next_sample_depth(plan, 100.0);
  EXPECT_LT(100.0 - x2, 0.05);
  EXPECT_GT(100.0 - x2, 0.0);
}

TEST(NextSampleDepth, SpacingShrinksWithDepth) {
  const SamplingPlan plan(0.2, reference_model());
  EXPECT_LT(50.0 - next_sample_depth(plan, 50.0), 100.0 - next_sample_depth(plan, 100.0));
}

TEST(NextSampleDepth, InfeasibleWhenTooClose) {
  // small epsilon near the sensor: the band needs more spacing than remains
  const SamplingPlan plan(0.01, reference_model());
  EXPECT_EQ(code_of([&] { next_sample_depth(plan, 0.05); }), ErrorCode::kInfeasible);
}

TEST(NextSampleDepth, BelowLowerDomainIsOutOfDomain) {
  const SamplingPlan plan(0.2, reference_model());
  EXPECT_EQ(code_of([&] { next_sample_depth(plan, 1e-4); }), ErrorCode::kOutOfDomain);
}

TEST(NextSampleDepth, ResidualSweep) {
  const auto m = reference_model();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> depth(5.0, 150.0);
  std::uniform_real_distribution<double> eps(0.05, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x1 = depth(rng);
    const SamplingPlan plan(eps(rng), m);
    const double x2 = next_sample_depth(plan, x1);
    const auto b1 = depth_bounds(m, x1);
    const auto b2 = depth_bounds(m, x2);
    ASSERT_TRUE(b2.lower.has_value());
    ASSERT_NEAR((1 + plan.epsilon()) * (x1 - x2), b1.upper - *b2.lower, 1e-9);
    ASSERT_LT(x2, x1);
  }
}

TEST(DepthStream, ParsesAndRejects) {
  std::istringstream good("t_s,x_m_m\n0,100\n0.05,99.5\n");
  EXPECT_EQ(parse_depth_stream(good).size(), 2u);

  std::istringstream back("t_s,x_m_m\n0,100\n0.05,99.5\n0.05,99\n");
  try {
    parse_depth_stream(back);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }

  std::istringstream header("time,depth\n0,100\n");
  EXPECT_EQ(code_of([&] { parse_depth_stream(header); }), ErrorCode::kParse);
  std::istringstream number("t_s,x_m_m\n0,1e\n");
  EXPECT_EQ(code_of([&] { parse_depth_stream(number); }), ErrorCode::kParse);
  std::istringstream empty("");
  EXPECT_EQ(code_of([&] { parse_depth_stream(empty); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { load_depth_stream(LANEXIT_FIXTURES "/does_not_exist.csv"); }),
            ErrorCode::kParse);
}

TEST(DepthStream, ConstructorRejectsNonIncreasingTime) {
  EXPECT_EQ(code_of([] { DepthStream({{0.0, 10.0}, {0.0, 9.0}}); }), ErrorCode::kInvalidArgument);
}

TEST(SampleStream, ConstantDepthGivesNoEstimates) {
  const auto stream = load_depth_stream(LANEXIT_FIXTURES "/constant_depth.csv");
  EXPECT_TRUE(sample_stream(SamplingPlan(0.2, reference_model()), stream).empty());
}

TEST(SampleStream, SingleFrameGivesNoEstimates) {
  const auto stream = load_depth_stream(LANEXIT_FIXTURES "/single_frame.csv");
  EXPECT_TRUE(sample_stream(SamplingPlan(0.2, reference_model()), stream).empty());
}

TEST(SampleStream, ConstantVelocityApproach) {
  const auto stream = load_depth_stream(LANEXIT_FIXTURES "/approach_10mps.csv");
  const auto est = sample_stream(SamplingPlan(0.2, reference_model()), stream);
  ASSERT_GE(est.size(), 5u);
  double prev_spacing = INFINITY;
  for (const auto& e : est) {
    EXPECT_NEAR(e.v_nom, 10.0, 1e-6);
    EXPECT_LE(e.v_upper, 12.0 + 1e-6);
    EXPECT_LE(e.gamma_upper(), 0.2 + 1e-6);
    EXPECT_LE(e.v_lower, e.v_nom);
    EXPECT_GE(e.v_upper, e.v_nom);
    // marker spacing shrinks as the target closes in
    EXPECT_LE(-e.dx, prev_spacing + 0.5 + 1e-9);  // one frame of slack (10 m/s * 0.05 s)
    prev_spacing = -e.dx;
  }
  EXPECT_LT(-est.back().dx, -est.front().dx);
}

TEST(StreamSampler, SamplesAtFirstCrossing) {
  const auto m = reference_model();
  const SamplingPlan plan(0.2, m);
  StreamSampler s(plan);
  const double x1 = 80.0;
  EXPECT_FALSE(s.push(0.0, x1 + error_at(m, x1)).has_value());
  const double target = next_sample_depth(plan, x1);
  ASSERT_TRUE(s.target().has_value());
  EXPECT_NEAR(*s.target(), target, 1e-12);
  // just above the target: no sample; at/below: sample
  const double above = target + 1e-3;
  EXPECT_FALSE(s.push(1.0, above + error_at(m, above)).has_value());
  const double below = target - 0.2;
  const auto c = s.push(2.0, below + error_at(m, below));
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->first.computed, x1, 1e-9);
  EXPECT_NEAR(c->second.computed, below, 1e-9);
  EXPECT_DOUBLE_EQ(c->dt, 2.0);
  EXPECT_TRUE(s.latest().has_value());
  EXPECT_EQ(s.sampling_instants().size(), 2u);

  s.reset();
  EXPECT_FALSE(s.latest().has_value());
  EXPECT_FALSE(s.target().has_value());
}

TEST(StreamSampler, SkipsUntilLowerBoundAvailable) {
  const auto m = reference_model();
  StreamSampler s(SamplingPlan(0.2, m));
  EXPECT_FALSE(s.push(0.0, m.beta3()).has_value());  // no lower bound yet
  EXPECT_FALSE(s.target().has_value());
  EXPECT_FALSE(s.push(0.1, 30.0).has_value());
  EXPECT_TRUE(s.target().has_value());
}

TEST(StreamSampler, ExhaustsWhenTargetInfeasible) {
  const auto m = reference_model();
  StreamSampler s(SamplingPlan(0.01, m));
  s.push(0.0, 0.05 + error_at(m, 0.05));
  EXPECT_TRUE(s.exhausted());
  EXPECT_FALSE(s.push(1.0, 0.01 + error_at(m, 0.01)).has_value());
}

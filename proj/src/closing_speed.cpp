#include "lanexit/closing_speed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <utility>

#include <fmt/core.h>

#include "lanexit/csv.hpp"
#include "lanexit/error.hpp"

namespace lanexit {

ClosingSpeedEstimate closing_speed(const DepthEstimate& first, double t1,
                                   const DepthEstimate& second, double t2) {
  if (!(t2 > t1)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("sample times must increase (t1={}, t2={})", t1, t2));
  }
  if (!(first.computed > second.computed)) {
    throw Error(ErrorCode::kNotApproaching,
                fmt::format("target not approaching (x1={}, x2={})", first.computed,
                            second.computed));
  }
  if (!first.lower || !second.lower) {
    throw Error(ErrorCode::kOutOfDomain, "depth estimate has no lower bound");
  }
  const double dt = t2 - t1;
  const double dx = second.computed - first.computed;
  ClosingSpeedEstimate e{};
  e.v_nom = -dx / dt;
  e.v_upper = -(*second.lower - first.upper) / dt;
  e.v_lower = -(second.upper - *first.lower) / dt;
  e.first = first;
  e.second = second;
  e.t1 = t1;
  e.t2 = t2;
  e.dt = dt;
  e.dx = dx;
  return e;
}

SamplingPlan::SamplingPlan(double epsilon, DepthErrorModel model)
    : epsilon_(epsilon), model_(model), coeffs_(bound_coefficients(model)) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("epsilon must be > 0 (got {})", epsilon));
  }
}

namespace {

// Residual of (1+eps)(x1 - x2) = upper(x1) - lower(x2), signed so that it is
// positive near x1 and decreases as x2 moves away from x1.
struct Residual {
  const SamplingPlan& plan;
  double x1;
  double x1_upper;

  double operator()(double x2) const {
    const DepthBounds b = depth_bounds(plan.model(), plan.coefficients(), x2);
    return x1_upper - b.lower.value_or(0.0) - (1.0 + plan.epsilon()) * (x1 - x2);
  }

  double derivative(double x2) const {
    const BoundCoefficients& c = plan.coefficients();
    const double radicand = c.c1l + (c.c2l + c.c3l * x2) * x2;
    const double dlower = radicand > 0.0 ? (c.c2l + 2.0 * c.c3l * x2) / (2.0 * std::sqrt(radicand)) : 0.0;
    return (1.0 + plan.epsilon()) - dlower;
  }
};

double bisect(const Residual& f, double lo, double hi) {
  // f(lo) <= 0 < f(hi)
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace

double next_sample_depth(const SamplingPlan& plan, double x1) {
  const BoundCoefficients& c = plan.coefficients();
  const double start = c.lower_domain_start;
  if (!(x1 >= start)) {
    throw Error(ErrorCode::kOutOfDomain,
                fmt::format("depth {} is below the lower-bound domain start {}", x1, start));
  }
  const double k = 1.0 + plan.epsilon();
  const double x1_upper = depth_bounds(plan.model(), c, x1).upper;
  const Residual f{plan, x1, x1_upper};

  if (f(start) > 0.0) {
    throw Error(ErrorCode::kInfeasible,
                fmt::format("no sampling depth below {} meets epsilon {}", x1,
                            plan.epsilon()));
  }

  // Isolate the radical: sqrt(R(x2)) = m + k*x2, then square.
  const double m = x1_upper - k * x1 - c.c0l;
  const double qa = c.c3l - k * k;
  const double qb = c.c2l - 2.0 * m * k;
  const double qc = c.c1l - m * m;
  const double disc = qb * qb - 4.0 * qa * qc;

  const double tol = 1e-11 * std::max(1.0, x1);
  std::optional<double> best;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = -0.5 * (qb + std::copysign(root, qb));
    double candidates[2] = {q / qa, q != 0.0 ? qc / q : q / qa};
    for (double x2 : candidates) {
      if (!std::isfinite(x2)) continue;
      // Polish against the unsquared equation.
      for (int i = 0; i < 4; ++i) {
        if (x2 < start || x2 > x1) break;
        const double d = f.derivative(x2);
        if (d == 0.0) break;
        const double next = x2 - f(x2) / d;
        if (next == x2) break;
        x2 = next;
      }
      if (x2 < start || x2 >= x1) continue;
      if (m + k * x2 < -tol) continue;  // spurious root of the squared form
      if (std::abs(f(x2)) > tol) continue;
      if (!best || x2 > *best) best = x2;
    }
  }
  if (best) return *best;
  return bisect(f, start, x1);
}

DepthStream::DepthStream(std::vector<DepthSample> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("timestamps must be strictly increasing (sample {} at t={})", i,
                              samples_[i].t));
    }
  }
}

DepthStream parse_depth_stream(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<DepthSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "t_s" || fields[1] != "x_m_m") {
        throw Error(ErrorCode::kParse,
                    fmt::format("line {}: expected header 't_s,x_m_m'", line_no));
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 2) {
      throw Error(ErrorCode::kParse,
                  fmt::format("line {}: expected 2 fields, got {}", line_no, fields.size()));
    }
    const auto t = csv::parse_double(fields[0]);
    const auto x = csv::parse_double(fields[1]);
    if (!t || !x) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: malformed number", line_no));
    }
    if (!samples.empty() && !(*t > samples.back().t)) {
      throw Error(ErrorCode::kParse,
                  fmt::format("line {}: timestamp {} does not increase", line_no, *t));
    }
    samples.push_back({*t, *x});
  }
  if (!have_header) {
    throw Error(ErrorCode::kParse, "missing header 't_s,x_m_m'");
  }
  return DepthStream(std::move(samples));
}

DepthStream load_depth_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, fmt::format("cannot open '{}'", path));
  return parse_depth_stream(in);
}

StreamSampler::StreamSampler(SamplingPlan plan) : plan_(std::move(plan)) {}

void StreamSampler::reset() {
  anchor_.reset();
  target_.reset();
  latest_.reset();
  exhausted_ = false;
}

void StreamSampler::set_anchor(double t, const DepthEstimate& est) {
  anchor_ = est;
  anchor_t_ = t;
  instants_.push_back({t, est.measured});
  try {
    target_ = next_sample_depth(plan_, est.computed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kOutOfDomain) throw;
    target_.reset();
    exhausted_ = true;
  }
}

std::optional<ClosingSpeedEstimate> StreamSampler::push(double t, double measured) {
  if (last_t_ && !(t > *last_t_)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("frame time {} does not increase", t));
  }
  last_t_ = t;
  if (exhausted_) return std::nullopt;

  const DepthEstimate est = estimate_from_measurement(plan_.model(), measured);
  if (!anchor_) {
    if (est.lower) set_anchor(t, est);
    return std::nullopt;
  }
  if (est.computed > *target_) return std::nullopt;
  if (!est.lower) {
    exhausted_ = true;
    return std::nullopt;
  }
  ClosingSpeedEstimate out = closing_speed(*anchor_, anchor_t_, est, t);
  latest_ = out;
  set_anchor(t, est);
  return out;
}

std::vector<ClosingSpeedEstimate> sample_stream(const SamplingPlan& plan,
                                                const DepthStream& stream) {
  StreamSampler sampler(plan);
  std::vector<ClosingSpeedEstimate> out;
  for (const DepthSample& s : stream.samples()) {
    if (auto e = sampler.push(s.t, s.measured)) out.push_back(*e);
  }
  return out;
}

}  // namespace lanexit

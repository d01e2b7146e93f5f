#include "lanexit/commands.hpp"

#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "lanexit/csv.hpp"
#include "lanexit/error.hpp"

namespace lanexit {

using csv::format_number;
using csv::format_optional;

void DepthRange::validate() const {
  if (!std::isfinite(from) || from < 0.0) {
    throw Error(ErrorCode::kValidation, fmt::format("from: must be >= 0 (got {})", from));
  }
  if (!std::isfinite(to) || to < from) {
    throw Error(ErrorCode::kValidation, fmt::format("to: must be >= from (got {})", to));
  }
  if (!std::isfinite(step) || !(step > 0.0)) {
    throw Error(ErrorCode::kValidation, fmt::format("step: must be > 0 (got {})", step));
  }
}

std::vector<double> DepthRange::grid() const {
  validate();
  // integer stepping avoids accumulated drift; the end point is kept when it
  // lands on the grid up to rounding
  const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(from + static_cast<double>(i) * step);
  return out;
}

void write_depth_profile(const DepthErrorModel& model, const DepthRange& range, std::ostream& out) {
  const auto xs = range.grid();
  const BoundCoefficients coeffs = bound_coefficients(model);
  out << "x_m,error_m,lower_m,upper_m,half_width_m\n";
  for (double x : xs) {
    const double f = error_at(model, x);
    const DepthBounds b = depth_bounds(model, coeffs, x);
    out << format_number(x) << ',' << format_number(f) << ',' << format_optional(b.lower) << ','
        << format_number(b.upper) << ',' << format_number(model.uncertainty_factor() * f) << '\n';
  }
}

void write_sampling_plan(const DepthErrorModel& model, const std::vector<double>& epsilons,
                         const DepthRange& range, std::ostream& out) {
  if (epsilons.empty()) throw Error(ErrorCode::kValidation, "epsilon: at least one value required");
  std::vector<SamplingPlan> plans;
  for (double eps : epsilons) {
    if (!std::isfinite(eps) || !(eps > 0.0)) {
      throw Error(ErrorCode::kValidation, fmt::format("epsilon: must be > 0 (got {})", eps));
    }
    plans.emplace_back(eps, model);
  }
  const auto xs = range.grid();
  out << "epsilon,x1_m,x2_m,abs_dx_m,status\n";
  for (const SamplingPlan& plan : plans) {
    for (double x1 : xs) {
      out << format_number(plan.epsilon()) << ',' << format_number(x1) << ',';
      try {
        const double x2 = next_sample_depth(plan, x1);
        out << format_number(x2) << ',' << format_number(x1 - x2) << ",ok\n";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kOutOfDomain) throw;
        out << ",," << to_string(e.code()) << '\n';
      }
    }
  }
}

void write_closing_speeds(const std::vector<ClosingSpeedEstimate>& estimates, std::ostream& out) {
  out << "t_s,x1_m,x2_m,abs_dx_m,v_nom_mps,v_upper_mps,v_lower_mps,gamma_u\n";
  for (const ClosingSpeedEstimate& e : estimates) {
    out << format_number(e.t2) << ',' << format_number(e.first.computed) << ','
        << format_number(e.second.computed) << ',' << format_number(std::abs(e.dx)) << ','
        << format_number(e.v_nom) << ',' << format_number(e.v_upper) << ','
        << format_number(e.v_lower) << ',' << format_number(e.gamma_upper()) << '\n';
  }
}

}  // namespace lanexit

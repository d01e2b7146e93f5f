#pragma once

#include <iosfwd>
#include <vector>

#include "lanexit/closing_speed.hpp"
#include "lanexit/depth_uncertainty.hpp"

namespace lanexit {

struct DepthRange {
  double from = 0.0;
  double to = 100.0;
  double step = 1.0;

  /// Throws Error(kValidation) unless 0 <= from <= to and step > 0.
  void validate() const;
  std::vector<double> grid() const;
};

/// Columns: x_m,error_m,lower_m,upper_m,half_width_m
void write_depth_profile(const DepthErrorModel& model, const DepthRange& range, std::ostream& out);

/// Columns: epsilon,x1_m,x2_m,abs_dx_m,status. Rows whose depth has no
/// admissible next sample keep empty x2/dx and a status other than "ok".
void write_sampling_plan(const DepthErrorModel& model, const std::vector<double>& epsilons,
                         const DepthRange& range, std::ostream& out);

/// Columns: t_s,x1_m,x2_m,abs_dx_m,v_nom_mps,v_upper_mps,v_lower_mps,gamma_u
void write_closing_speeds(const std::vector<ClosingSpeedEstimate>& estimates, std::ostream& out);

}  // namespace lanexit

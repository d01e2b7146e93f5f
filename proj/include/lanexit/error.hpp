#pragma once

#include <stdexcept>
#include <string>

namespace lanexit {

enum class ErrorCode {
  kDomain,                  // argument outside the mathematical domain
  kMeasurementBelowOffset,  // x_m < beta3
  kInvalidModel,
  kNotApproaching,
  kOutOfDomain,             // estimate has no lower depth bound
  kInfeasible,              // no sampling depth satisfies the requested epsilon
  kNoIntersection,
  kUndefinedHeading,
  kInvalidArgument,
  kParse,
  kValidation,
  kInternal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lanexit

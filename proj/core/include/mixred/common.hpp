#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixred {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MIXRED_DEFINE_ERROR(Name)     \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  };

MIXRED_DEFINE_ERROR(DimMismatch)
MIXRED_DEFINE_ERROR(SingularDiagonal)
MIXRED_DEFINE_ERROR(NoConvergence)
MIXRED_DEFINE_ERROR(ThresholdOutOfRange)
MIXRED_DEFINE_ERROR(NumericalBreakdown)
MIXRED_DEFINE_ERROR(NormUnderflow)
MIXRED_DEFINE_ERROR(RankDeficientSampling)
MIXRED_DEFINE_ERROR(InvalidRange)
MIXRED_DEFINE_ERROR(ExpansionKindMismatch)
MIXRED_DEFINE_ERROR(EmptyPointSet)
MIXRED_DEFINE_ERROR(CoincidentSourceTarget)
MIXRED_DEFINE_ERROR(QuadratureNotConverged)
MIXRED_DEFINE_ERROR(MaxDepthExceeded)

#undef MIXRED_DEFINE_ERROR

// Matrix is not symmetric positive definite; carries the offending pivot.
class NotSPD : public Error {
 public:
  NotSPD(const std::string& what, std::size_t pivot)
      : Error(what), pivot_index(pivot) {}
  std::size_t pivot_index;
};

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level parsed once from MIXRED_LOG (error, info, debug). Default: error.
LogLevel log_level();
bool log_enabled(LogLevel level);
// Writes "mixred <level>: <msg>" to stderr if the level is enabled.
void log_message(LogLevel level, const std::string& msg);

}  // namespace mixred

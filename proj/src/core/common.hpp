#pragma once

#include <stdexcept>
#include <string>

namespace rmp {

// Error taxonomy shared by the C++ core and the C API.  Codes are stable;
// new ones go at the end.
enum class Err {
  InvalidArgument = 1,
  NonSquare,
  ZeroProbability,
  NotInvertible,
  NotAllowable,
  SingularInvertible,
  UnsupportedDimension,
  ZeroVector,
  NegativeCoordinate,
  CollapsedImage,
  SpaceMismatch,
  NoConvergence,
  GapCollapse,
  IllConditionedFit,
  DegenerateVariance,
  RootOutsideWindow,
  OutsideWindow,
  NegativeWeight,
  AllWeightsRejected,
  WeightOverflow,
  ConfigInvalid,
  IoError,
  Internal,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& msg);
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] void fail(Err code, const std::string& msg);

inline void require(bool ok, Err code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace rmp

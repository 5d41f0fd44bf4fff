#include "common.hpp"

namespace rmp {

const char* err_name(Err e) {
  switch (e) {
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::NonSquare: return "NonSquare";
    case Err::ZeroProbability: return "ZeroProbability";
    case Err::NotInvertible: return "NotInvertible";
    case Err::NotAllowable: return "NotAllowable";
    case Err::SingularInvertible: return "SingularInvertible";
    case Err::UnsupportedDimension: return "UnsupportedDimension";
    case Err::ZeroVector: return "ZeroVector";
    case Err::NegativeCoordinate: return "NegativeCoordinate";
    case Err::CollapsedImage: return "CollapsedImage";
    case Err::SpaceMismatch: return "SpaceMismatch";
    case Err::NoConvergence: return "NoConvergence";
    case Err::GapCollapse: return "GapCollapse";
    case Err::IllConditionedFit: return "IllConditionedFit";
    case Err::DegenerateVariance: return "DegenerateVariance";
    case Err::RootOutsideWindow: return "RootOutsideWindow";
    case Err::OutsideWindow: return "OutsideWindow";
    case Err::NegativeWeight: return "NegativeWeight";
    case Err::AllWeightsRejected: return "AllWeightsRejected";
    case Err::WeightOverflow: return "WeightOverflow";
    case Err::ConfigInvalid: return "ConfigInvalid";
    case Err::IoError: return "IoError";
    case Err::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(Err code, const std::string& msg)
    : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace rmp

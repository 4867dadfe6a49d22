#include "pwca/error.hpp"

namespace pwca {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kDegeneratePlane: return "degenerate-plane";
    case ErrorCode::kVerticalPlane: return "vertical-plane";
    case ErrorCode::kInvalidStart: return "invalid-start";
    case ErrorCode::kUnderdetermined: return "underdetermined";
    case ErrorCode::kDegenerateModel: return "degenerate-model";
    case ErrorCode::kBandTooNarrow: return "band-too-narrow";
    case ErrorCode::kUnboundedBigM: return "unbounded-big-m";
    case ErrorCode::kNaming: return "naming";
    case ErrorCode::kExtrapolation: return "extrapolation";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kFormulation: return "formulation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

}  // namespace pwca

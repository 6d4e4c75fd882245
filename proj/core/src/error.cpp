#include "gsf/error.hpp"

namespace gsf {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularPoint: return "SingularPoint";
    case ErrorCode::kNotAdmissible: return "NotAdmissible";
    case ErrorCode::kInvalidScale: return "InvalidScale";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::kVariableOutOfRange: return "VariableOutOfRange";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNotGradient: return "NotGradient";
    case ErrorCode::kNotNormalizable: return "NotNormalizable";
    case ErrorCode::kQuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveState: return "NonPositiveState";
    case ErrorCode::kZeroDivision: return "ZeroDivision";
    case ErrorCode::kNodeSingularity: return "NodeSingularity";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNoGroundState: return "NoGroundState";
    case ErrorCode::kUnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::kPreconditionFailed: return "PreconditionFailed";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace gsf

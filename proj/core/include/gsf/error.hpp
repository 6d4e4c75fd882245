#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsf {

enum class ErrorCode {
  kSingularPoint,
  kNotAdmissible,
  kInvalidScale,
  kSyntaxError,
  kUnknownIdentifier,
  kVariableOutOfRange,
  kDomainError,
  kNotGradient,
  kNotNormalizable,
  kQuadratureDivergence,
  kDimensionMismatch,
  kNonPositiveState,
  kZeroDivision,
  kNodeSingularity,
  kNoConvergence,
  kNoGroundState,
  kUnsupportedFamily,
  kPreconditionFailed,
  kInvalidArgument,
};

const char* error_name(ErrorCode code);

// Base of every error raised by the library. The code is stable and is what
// the command-line tool maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what)
      : Error(C, std::string(error_name(C)) + ": " + what) {}
};

using SingularPoint = TypedError<ErrorCode::kSingularPoint>;
using NotAdmissible = TypedError<ErrorCode::kNotAdmissible>;
using InvalidScale = TypedError<ErrorCode::kInvalidScale>;
using UnknownIdentifier = TypedError<ErrorCode::kUnknownIdentifier>;
using VariableOutOfRange = TypedError<ErrorCode::kVariableOutOfRange>;
using DomainError = TypedError<ErrorCode::kDomainError>;
using NotGradient = TypedError<ErrorCode::kNotGradient>;
using NotNormalizable = TypedError<ErrorCode::kNotNormalizable>;
using QuadratureDivergence = TypedError<ErrorCode::kQuadratureDivergence>;
using DimensionMismatch = TypedError<ErrorCode::kDimensionMismatch>;
using NonPositiveState = TypedError<ErrorCode::kNonPositiveState>;
using ZeroDivision = TypedError<ErrorCode::kZeroDivision>;
using NodeSingularity = TypedError<ErrorCode::kNodeSingularity>;
using NoConvergence = TypedError<ErrorCode::kNoConvergence>;
using NoGroundState = TypedError<ErrorCode::kNoGroundState>;
using UnsupportedFamily = TypedError<ErrorCode::kUnsupportedFamily>;
using PreconditionFailed = TypedError<ErrorCode::kPreconditionFailed>;
using InvalidArgument = TypedError<ErrorCode::kInvalidArgument>;

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(ErrorCode::kSyntaxError,
              "SyntaxError at " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace gsf

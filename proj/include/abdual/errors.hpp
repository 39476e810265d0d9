#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abdual {

enum class ErrorCode {
  kDegreeOutOfRange,
  kDegreeMismatch,
  kVariantMismatch,
  kMasslessSector,
  kMasslessMode,
  kNotImplemented,
  kTooLarge,
  kQuadratureFail,
  kNotPositive,
  kInvalidArgument,
  kParse,
  kIo,
  kNeedsLift,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegreeOutOfRange: return "DEGREE_OUT_OF_RANGE";
    case ErrorCode::kDegreeMismatch: return "DEGREE_MISMATCH";
    case ErrorCode::kVariantMismatch: return "VARIANT_MISMATCH";
    case ErrorCode::kMasslessSector: return "MASSLESS_SECTOR";
    case ErrorCode::kMasslessMode: return "MASSLESS_MODE";
    case ErrorCode::kNotImplemented: return "NOT_IMPLEMENTED";
    case ErrorCode::kTooLarge: return "TOO_LARGE";
    case ErrorCode::kQuadratureFail: return "QUADRATURE_FAIL";
    case ErrorCode::kNotPositive: return "NOT_POSITIVE";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kParse: return "E_PARSE";
    case ErrorCode::kIo: return "E_IO";
    case ErrorCode::kNeedsLift: return "E_NEEDS_LIFT";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace abdual

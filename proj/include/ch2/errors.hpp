#pragma once

#include <stdexcept>
#include <string>

namespace ch2 {

/// Failure categories shared across the library. The CLI maps these to
/// process exit codes (parse/validation -> 1, I/O -> 3, everything else -> 2).
enum class ErrorCode {
    NONFINITE_RHS,
    NO_BRACKET,
    NONPOSITIVE_SCALE,
    NONNEGATIVE_XI,
    OUT_OF_RANGE,
    NEGATIVE_RADIUS,
    NOT_SELF_SIMILAR_PARAMS,
    BOUNDARY_POINT,
    EMPTY_INTERIOR,
    QUADRATURE_FAILURE,
    PARSE_ERROR,
    VALIDATION_ERROR,
    CAP_EXCEEDED,
    IO_ERROR,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace ch2

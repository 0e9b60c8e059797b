#include "ch2/errors.hpp"

namespace ch2 {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NONFINITE_RHS: return "NONFINITE_RHS";
        case ErrorCode::NO_BRACKET: return "NO_BRACKET";
        case ErrorCode::NONPOSITIVE_SCALE: return "NONPOSITIVE_SCALE";
        case ErrorCode::NONNEGATIVE_XI: return "NONNEGATIVE_XI";
        case ErrorCode::OUT_OF_RANGE: return "OUT_OF_RANGE";
        case ErrorCode::NEGATIVE_RADIUS: return "NEGATIVE_RADIUS";
        case ErrorCode::NOT_SELF_SIMILAR_PARAMS: return "NOT_SELF_SIMILAR_PARAMS";
        case ErrorCode::BOUNDARY_POINT: return "BOUNDARY_POINT";
        case ErrorCode::EMPTY_INTERIOR: return "EMPTY_INTERIOR";
        case ErrorCode::QUADRATURE_FAILURE: return "QUADRATURE_FAILURE";
        case ErrorCode::PARSE_ERROR: return "PARSE_ERROR";
        case ErrorCode::VALIDATION_ERROR: return "VALIDATION_ERROR";
        case ErrorCode::CAP_EXCEEDED: return "CAP_EXCEEDED";
        case ErrorCode::IO_ERROR: return "IO_ERROR";
    }
    return "?";
}

}  // namespace ch2

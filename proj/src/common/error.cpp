#include "partmotion/common/error.hpp"

namespace partmotion {

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidAnnotation:
      return "INVALID_ANNOTATION";
    case ErrorCode::kOverlap:
      return "OVERLAP";
    case ErrorCode::kTemplate:
      return "TEMPLATE_ERROR";
    case ErrorCode::kMalformedJson:
      return "MALFORMED_JSON";
    case ErrorCode::kSchemaViolation:
      return "SCHEMA_VIOLATION";
    case ErrorCode::kTimeOutOfRange:
      return "TIME_OUT_OF_RANGE";
    case ErrorCode::kAgentUnavailable:
      return "AGENT_UNAVAILABLE";
    case ErrorCode::kExhaustedRetries:
      return "EXHAUSTED_RETRIES";
    case ErrorCode::kDegenerate:
      return "DEGENERATE";
    case ErrorCode::kDegenerate6d:
      return "DEGENERATE_6D";
    case ErrorCode::kSingularHeading:
      return "SINGULAR_HEADING";
    case ErrorCode::kInsufficientLabels:
      return "INSUFFICIENT_LABELS";
    case ErrorCode::kShapeMismatch:
      return "SHAPE_MISMATCH";
    case ErrorCode::kNonfiniteLoss:
      return "NONFINITE_LOSS";
    case ErrorCode::kNonfiniteSample:
      return "NONFINITE_SAMPLE";
    case ErrorCode::kNonpsdCovariance:
      return "NONPSD_COVARIANCE";
    case ErrorCode::kInsufficientData:
      return "INSUFFICIENT_DATA";
    case ErrorCode::kFormat:
      return "FORMAT_ERROR";
    case ErrorCode::kIo:
      return "IO_ERROR";
    case ErrorCode::kConfig:
      return "CONFIG_ERROR";
  }
  return "UNKNOWN_ERROR";
}

Error::Error(ErrorCode code, const std::string& message, std::string detail)
    : std::runtime_error(std::string(errorCodeName(code)) + ": " + message),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace partmotion

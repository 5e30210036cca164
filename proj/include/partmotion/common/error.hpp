#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace partmotion {

// Every failure mode the library reports. Names match the codes used in
// machine-readable error output (see errorCodeName).
enum class ErrorCode {
  kInvalidAnnotation,
  kOverlap,
  kTemplate,
  kMalformedJson,
  kSchemaViolation,
  kTimeOutOfRange,
  kAgentUnavailable,
  kExhaustedRetries,
  kDegenerate,
  kDegenerate6d,
  kSingularHeading,
  kInsufficientLabels,
  kShapeMismatch,
  kNonfiniteLoss,
  kNonfiniteSample,
  kNonpsdCovariance,
  kInsufficientData,
  kFormat,
  kIo,
  kConfig,
};

std::string_view errorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {});

  ErrorCode code() const noexcept {
    return code_;
  }
  // Offending fragment or auxiliary context; may be empty.
  const std::string& detail() const noexcept {
    return detail_;
  }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace partmotion

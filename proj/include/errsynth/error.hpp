#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace errsynth {

enum class ErrorCode {
  EmptyReport,
  NonContiguousIndices,
  EmptyCorpus,
  InvalidProfile,
  InconsistentPlan,
  MissingTemplate,
  BackendUnavailable,
  UnparseableResponse,
  ValidationFailed,
  NoEligibleSite,
  SchemaViolation,
  IOError,
  EmptySplit,
  AbortedSession,
  ConfigError,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the named failure modes of the pipeline.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace errsynth

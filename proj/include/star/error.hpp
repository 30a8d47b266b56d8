#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace star {

enum class ErrorCode {
  EmptyCorpus,
  ConfigInvalid,
  InvalidInput,
  DuplicateDocumentId,
  DimensionMismatch,
  UnknownTerm,
  ZeroVector,
  NoSignificantTerms,
  NotNormalized,
  OutOfRange,
  TooFewDocuments,
  IoFailure,
  InconsistentBundle,
  ChecksumMismatch,
  VersionMismatch,
  HashFunctionMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures are reported through this exception. The code is
/// stable and is what the CLI maps onto its exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace star

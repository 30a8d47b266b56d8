#include "star/error.hpp"

namespace star {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DuplicateDocumentId: return "DuplicateDocumentId";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoSignificantTerms: return "NoSignificantTerms";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewDocuments: return "TooFewDocuments";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InconsistentBundle: return "InconsistentBundle";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::HashFunctionMismatch: return "HashFunctionMismatch";
  }
  return "Unknown";
}

}  // namespace star

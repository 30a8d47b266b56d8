#pragma once

#include <span>
#include <string>
#include <vector>

#include "star/corpus.hpp"
#include "star/embedder.hpp"
#include "star/store.hpp"

namespace star {

struct BuiltIndex {
  SemanticSpace space;
  IndexBundle bundle;
  std::vector<std::string> skipped;  // documents without any significant term
};

/// tokenize -> vocabulary -> space -> document vectors -> bundle.
/// Throws EmptyCorpus, DuplicateDocumentId, ConfigInvalid.
BuiltIndex build_index(std::span<const RawDocument> docs, const SpaceConfig& config, int workers = 1);

struct AddResult {
  UpdateReport update;
  std::vector<std::string> skipped;
};

/// Absorbs new documents into a loaded index. Existing document vectors are
/// kept as they were; only the new documents get vectors.
AddResult add_to_index(IndexBundle& bundle, std::span<const RawDocument> docs, int workers = 1);

}  // namespace star

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "star/corpus.hpp"
#include "star/embedder.hpp"
#include "star/vectors.hpp"

namespace star {

/// On-disk layout of an index directory:
///
///   manifest.json  format version, seed hash id, configuration, corpus
///                  statistics and a CRC-32 + byte length for every data file
///   vocab.tsv      every counted term: counts, significance, context count,
///                  partial flag
///   terms.vec      raw accumulators of the significant terms, lexicographic
///   docs.vec       unit document vectors, rows in docids.tsv order
///   docids.tsv     document id, title, whether the document has a vector
///
/// Vector files: 8-byte magic "STARIDX1", rows (u64 LE), d (u64 LE), then
/// rows * d IEEE-754 binary32 values, little-endian, row-major.
inline constexpr int kFormatVersion = 1;
inline constexpr char kVectorMagic[8] = {'S', 'T', 'A', 'R', 'I', 'D', 'X', '1'};

struct FileChecksum {
  std::uint32_t crc32 = 0;
  std::uint64_t bytes = 0;

  bool operator==(const FileChecksum&) const = default;
};

struct IndexManifest {
  int format_version = kFormatVersion;
  std::string hash_function;
  std::string created;  // ISO-8601 UTC
  SpaceConfig config;
  CorpusStats stats;
  std::map<std::string, FileChecksum> files;
};

struct TermRow {
  std::string term;
  std::uint64_t context_count = 0;
  bool partial = false;

  bool operator==(const TermRow&) const = default;
};

struct DocRecord {
  std::string id;
  std::string title;
  bool has_vector = false;

  bool operator==(const DocRecord&) const = default;
};

struct IndexBundle {
  IndexManifest manifest;
  Vocabulary vocab;
  std::vector<TermRow> terms;       // significant terms, lexicographic
  std::vector<float> accumulators;  // terms.size() x d, row-major
  std::vector<DocRecord> documents;
  VectorTable doc_vectors;          // rows of documents with has_vector, same order

  std::uint32_t dim() const { return manifest.config.seed.d; }
};

/// Field-for-field equality, ignoring the manifest's timestamp and checksums.
bool equivalent(const IndexBundle& a, const IndexBundle& b);

/// Throws InconsistentBundle when tables, matrices and stats disagree.
void validate_bundle(const IndexBundle& bundle);

IndexBundle make_bundle(const SemanticSpace& space, std::vector<DocRecord> documents, VectorTable doc_vectors);

/// Rebuilds the semantic space (accumulators widened back to 64-bit).
SemanticSpace restore_space(const IndexBundle& bundle);

/// Writes the five index files and returns the manifest as written.
/// Throws IoFailure, InconsistentBundle.
IndexManifest save_index(const IndexBundle& bundle, const std::filesystem::path& dir);

/// Throws IoFailure, ChecksumMismatch, VersionMismatch, HashFunctionMismatch,
/// InconsistentBundle.
IndexBundle load_index(const std::filesystem::path& dir);

std::uint32_t crc32_of(std::string_view bytes);

}  // namespace star

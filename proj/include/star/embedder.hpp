#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "star/corpus.hpp"
#include "star/seedspace.hpp"
#include "star/vectors.hpp"

namespace star {

/// What counts as "co-occurring": a whole sentence, or every sliding window
/// of `width` consecutive tokens inside a sentence (a sentence shorter than
/// the window is one context).
struct ContextMode {
  enum class Kind { Sentence, Window };
  Kind kind = Kind::Sentence;
  std::uint32_t width = 5;

  static ContextMode sentence() { return {}; }
  static ContextMode window(std::uint32_t w) { return {Kind::Window, w}; }

  /// "sentence" or "window:N". Throws ConfigInvalid.
  static ContextMode parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const ContextMode& o) const {
    return kind == o.kind && (kind == Kind::Sentence || width == o.width);
  }
};

struct SpaceConfig {
  SeedConfig seed;
  SignificanceConfig significance;
  ContextMode context;
  bool context_idf = false;  // weight context seeds by idf instead of plain multiplicity
  bool fold_title = true;

  void validate() const;
  bool operator==(const SpaceConfig&) const = default;
};

struct SemanticAccumulator {
  std::vector<double> sum;  // raw context sum, length d
  std::uint64_t context_count = 0;
  bool partial = false;  // promoted by an update although it occurred before; old contexts are missing
};

/// Term -> count, iterated in lexicographic order.
using TermBag = std::map<std::string, std::uint64_t, std::less<>>;

TermBag bag_of(std::span<const Sentence> sentences);
TermBag bag_of(const TokenizedDocument& doc);

struct UpdateReport {
  std::vector<std::string> promoted;  // newly significant (partial when seen in older documents)
  std::vector<std::string> demoted;   // no longer significant, accumulator dropped
  std::uint64_t documents_added = 0;
};

/// Per-term semantic accumulators over a corpus. Every significant term of
/// the vocabulary owns an accumulator of length d. Once built the space is
/// read-only except through add_documents(), which needs exclusive access.
class SemanticSpace {
 public:
  using AccumulatorMap = std::map<std::string, SemanticAccumulator, std::less<>>;

  /// Empty space with a zero accumulator for every significant term.
  SemanticSpace(SpaceConfig config, Vocabulary vocab, CorpusStats stats);

  /// Absorbs every context of every document. The documents are split into
  /// `workers` contiguous shards whose partial sums are added in shard order.
  /// Throws EmptyCorpus, DuplicateDocumentId.
  static SemanticSpace build(std::span<const TokenizedDocument> docs, Vocabulary vocab, CorpusStats stats,
                             const SpaceConfig& config, int workers = 1);

  /// Reassembles a space from persisted parts. Throws InconsistentBundle.
  static SemanticSpace restore(SpaceConfig config, Vocabulary vocab, CorpusStats stats,
                               AccumulatorMap accumulators, std::set<std::string, std::less<>> doc_ids);

  /// S = sum over significant tokens t of m_t * seed(t); every distinct
  /// significant token u gets S - m_u * seed(u). Fewer than two distinct
  /// significant tokens is a no-op.
  void absorb_context(std::span<const std::string> tokens);

  /// Updates counts and significance, then absorbs the new documents.
  /// Throws DuplicateDocumentId.
  UpdateReport add_documents(std::span<const TokenizedDocument> docs, int workers = 1);

  const SpaceConfig& config() const { return config_; }
  std::uint32_t dim() const { return config_.seed.d; }
  const Vocabulary& vocab() const { return vocab_; }
  const CorpusStats& stats() const { return stats_; }
  const AccumulatorMap& accumulators() const { return accumulators_; }
  const SemanticAccumulator* find(std::string_view term) const;
  const std::set<std::string, std::less<>>& doc_ids() const { return doc_ids_; }

 private:
  void accumulate(std::span<const TokenizedDocument> docs, int workers);

  SpaceConfig config_;
  Vocabulary vocab_;
  CorpusStats stats_;
  AccumulatorMap accumulators_;
  std::set<std::string, std::less<>> doc_ids_;
};

/// Convenience: vocabulary + space from tokenized documents.
SemanticSpace build_space(std::span<const TokenizedDocument> docs, const SpaceConfig& config, int workers = 1);

/// ln(M / df). Throws UnknownTerm when the term is absent or has df = 0.
double idf_weight(std::string_view term, const Vocabulary& vocab, const CorpusStats& stats);
double idf_weight(const SemanticSpace& space, std::string_view term);

/// Accumulator / ||accumulator||. Throws UnknownTerm, ZeroVector.
Vector term_vector(const SemanticSpace& space, std::string_view term);

struct ComposedVector {
  Vector vec;
  std::uint64_t term_count = 0;  // token occurrences that contributed
};

/// sum of n * idf * term_vector over the bag, normalized. Terms that are not
/// significant or have a zero vector are ignored. Throws NoSignificantTerms.
ComposedVector compose_vector(const SemanticSpace& space, const TermBag& bag);

struct DocumentVector {
  std::string doc_id;
  Vector vec;
  std::uint64_t term_count = 0;
};

struct DocumentVectorBatch {
  std::vector<DocumentVector> vectors;  // input order, skipped documents omitted
  std::vector<std::string> skipped;     // ids that raised NoSignificantTerms
};

DocumentVectorBatch document_vectors(const SemanticSpace& space, std::span<const TokenizedDocument> docs,
                                     int workers = 1);

VectorTable to_table(std::span<const DocumentVector> docs, std::uint32_t dim);

/// Unit vectors of every term with a nonzero accumulator, lexicographic.
VectorTable term_table(const SemanticSpace& space, int workers = 1);

}  // namespace star

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace star {

struct RawDocument {
  std::string id;
  std::optional<std::string> title;
  std::string text;
};

/// Half-open range [begin, end) of sentence indices.
struct ParagraphRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const ParagraphRange&) const = default;
};

using Sentence = std::vector<std::string>;

struct TokenizedBody {
  std::vector<Sentence> sentences;
  std::vector<ParagraphRange> paragraphs;
};

struct TokenizedDocument {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<ParagraphRange> paragraphs;

  std::size_t token_count() const;
};

/// Splits text into paragraphs (blank-line separated), sentences (`.`, `!`,
/// `?` followed by whitespace or end of text) and lowercase tokens. A token is
/// a run of ASCII alphanumerics or non-ASCII bytes; a hyphen joins two such
/// runs. Paragraphs and sentences without tokens are dropped.
TokenizedBody tokenize(std::string_view text);

/// Raw text of each paragraph kept by tokenize(), in the same order.
std::vector<std::string> paragraph_texts(std::string_view text);

/// Tokenizes a document; a non-empty title becomes the first paragraph when
/// `fold_title` is set.
TokenizedDocument tokenize_document(const RawDocument& doc, bool fold_title = true);

struct SignificanceConfig {
  double max_df_ratio = 0.10;
  std::uint64_t min_count = 3;

  void validate() const;
  bool operator==(const SignificanceConfig&) const = default;
};

struct VocabularyEntry {
  std::string term;
  std::uint64_t collection_count = 0;
  std::uint64_t document_frequency = 0;
  bool significant = false;

  bool operator==(const VocabularyEntry&) const = default;
};

struct CorpusStats {
  std::uint64_t documents = 0;          // M
  std::uint64_t significant_terms = 0;  // N
  std::uint64_t distinct_terms = 0;
  std::uint64_t total_tokens = 0;

  bool operator==(const CorpusStats&) const = default;
};

/// Raw per-term tallies over a set of documents. Merging is integer
/// addition, so partial counts from any number of workers combine to the
/// same result in any order.
struct TermCounts {
  struct Tally {
    std::uint64_t collection_count = 0;
    std::uint64_t document_frequency = 0;
  };
  std::map<std::string, Tally, std::less<>> terms;
  std::uint64_t documents = 0;
  std::uint64_t total_tokens = 0;

  void add_document(const TokenizedDocument& doc);
  void merge(const TermCounts& other);
};

bool is_significant(std::uint64_t collection_count, std::uint64_t document_frequency,
                    std::uint64_t documents, const SignificanceConfig& config);

class Vocabulary {
 public:
  using Map = std::map<std::string, VocabularyEntry, std::less<>>;

  Vocabulary() = default;

  const VocabularyEntry* find(std::string_view term) const;
  bool is_significant(std::string_view term) const;

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  void add_counts(const TermCounts& counts);
  void apply_significance(const SignificanceConfig& config, std::uint64_t documents);

  /// Inserts or replaces an entry verbatim (used when restoring an index).
  void put(VocabularyEntry entry);

  bool operator==(const Vocabulary&) const = default;

 private:
  Map entries_;
};

/// Counts every distinct token and flags significance. Throws EmptyCorpus.
std::pair<Vocabulary, CorpusStats> build_vocabulary(std::span<const TokenizedDocument> docs,
                                                    const SignificanceConfig& config,
                                                    int workers = 1);

CorpusStats compute_stats(const Vocabulary& vocab, std::uint64_t documents);

/// Significant terms in lexicographic order.
std::vector<std::string> significant_terms(const Vocabulary& vocab);

/// JSON Lines (`id`, `text` required, `title` optional) or a directory of
/// `.txt` files keyed by filename stem. Ids must be unique.
std::vector<RawDocument> load_corpus(const std::filesystem::path& path);
std::vector<RawDocument> load_jsonl(const std::filesystem::path& path);
std::vector<RawDocument> load_text_directory(const std::filesystem::path& path);

bool is_valid_utf8(std::string_view text) noexcept;

std::vector<TokenizedDocument> tokenize_all(std::span<const RawDocument> docs, bool fold_title,
                                            int workers = 1);

}  // namespace star

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "star/corpus.hpp"
#include "star/embedder.hpp"
#include "star/vectors.hpp"

namespace star {

enum class Linkage { Average, Complete, Single };

/// "average" | "complete" | "single". Throws ConfigInvalid.
Linkage parse_linkage(std::string_view name);
std::string_view to_string(Linkage linkage);

/// Node ids: leaves are 0..n-1, the i-th merge creates node n + i.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double similarity = 0.0;  // 1 - D^2 / 2 of the linkage distance
  std::size_t size = 0;     // leaves under the new node

  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;
  Linkage linkage = Linkage::Average;

  std::size_t node_count() const { return leaves.size() + merges.size(); }
  /// Leaf indices under `node`, ascending.
  std::vector<std::size_t> members(std::size_t node) const;
};

/// Agglomerative clustering over D_ij = sqrt(2 (1 - sigma_ij)). Each active
/// cluster is keyed by its smallest leaf index; among equal linkage distances
/// the pair with the smallest (key, key) is merged first, and the merged node
/// lists the smaller key on the left. Throws TooFewDocuments.
Dendrogram hcluster(const VectorTable& docs, Linkage linkage = Linkage::Average, int workers = 1);

struct Cluster {
  std::size_t node = 0;
  std::vector<std::size_t> members;  // leaf indices, ascending
  double split_at = 0.0;             // similarity of the cluster's topmost merge
};

struct ClusterCut {
  std::vector<Cluster> clusters;  // multi-member only, split_at descending
  std::size_t singletons = 0;
};

/// Maximal subtrees whose internal merges all have similarity >= min_similarity.
ClusterCut cut_clusters(const Dendrogram& dendrogram, double min_similarity);

/// Stops merging when `count` groups remain.
ClusterCut cut_top(const Dendrogram& dendrogram, std::size_t count);

enum class SummaryUnit { Paragraph, Sentence };

struct Summary {
  std::string doc_id;
  std::vector<std::size_t> kept;  // unit indices, ascending
  std::vector<double> scores;     // aligned with kept
  std::vector<std::optional<double>> unit_scores;  // every unit; nullopt = no significant terms
};

/// Scores every unit against the whole document and keeps the n_keep best
/// (ties to the earlier unit), reported in document order.
/// Throws NoSignificantTerms when the document composes to nothing.
Summary summarize(const TokenizedDocument& doc, const SemanticSpace& space, std::size_t n_keep = 6,
                  SummaryUnit unit = SummaryUnit::Paragraph);

struct PortfolioMatch {
  std::string id;
  double sigma = 0.0;
};

struct PortfolioEntry {
  std::string id;
  std::vector<PortfolioMatch> matches;  // sigma descending, ties by id
};

struct PortfolioReport {
  double threshold = 0.7;
  std::vector<PortfolioEntry> entries;  // by best match descending, ties by id
};

PortfolioReport compare_portfolios(const VectorTable& a, const VectorTable& b, double threshold = 0.7,
                                   int workers = 1);

struct WordUsageRow {
  std::string term;
  std::uint64_t count = 0;  // occurrences in its own document
  double sigma = 0.0;       // similarity to the other document's vector
  bool shared = false;      // also occurs in the other document
};

struct WordUsageTable {
  double semantic_sigma = 0.0;
  std::optional<double> overlap_sigma;
  std::vector<WordUsageRow> left;   // terms of a against b
  std::vector<WordUsageRow> right;  // terms of b against a
};

/// top_n = 0 keeps every row. Throws NoSignificantTerms.
WordUsageTable word_usage_table(const TokenizedDocument& a, const TokenizedDocument& b, const SemanticSpace& space,
                                std::size_t top_n);

}  // namespace star

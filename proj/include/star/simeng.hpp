#pragma once

#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "star/corpus.hpp"
#include "star/embedder.hpp"
#include "star/vectors.hpp"

namespace star {

/// Dot product of two float vectors accumulated in double over eight fixed
/// lanes. Products of floats are exact in double, so the result is the same
/// on every build and for every caller.
double dot(std::span<const float> a, std::span<const float> b) noexcept;

/// Clamped dot product of two unit vectors. Throws DimensionMismatch,
/// NotNormalized (norm off by more than 1e-6).
double cosine(std::span<const float> a, std::span<const float> b);

/// Euclidean distance between unit vectors with similarity sigma:
/// sqrt(2 (1 - sigma)). Throws OutOfRange outside [-1, 1].
double distance(double sigma);

struct Neighbor {
  std::string id;
  double sigma = 0.0;

  bool operator==(const Neighbor&) const = default;
};

using IdSet = std::set<std::string, std::less<>>;

/// Exhaustive scan for the k rows most similar to `query`, sigma descending
/// with ties broken by ascending id. Rows in `exclude` are skipped. The scan
/// may be split across workers; the result does not depend on the split.
std::vector<Neighbor> top_k(const VectorTable& index, std::span<const float> query, std::size_t k,
                            const IdSet& exclude = {}, int workers = 1);

/// v - (v.u) u, renormalized. Throws ZeroVector when the residual norm is
/// below 1e-9, NotNormalized, DimensionMismatch.
Vector orthogonalize(std::span<const float> v, std::span<const float> u);

/// cosine(term_vector(term), doc_vec).
double word_doc_similarity(const SemanticSpace& space, std::string_view term, std::span<const float> doc_vec);

/// Cosine of the tf-idf bag-of-words vectors of two documents over the
/// significant terms only. Throws NoSignificantTerms.
double word_overlap_similarity(const TokenizedDocument& a, const TokenizedDocument& b, const Vocabulary& vocab,
                               const CorpusStats& stats);

struct SimilarityMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<double> values;  // row-major

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return col_ids.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * col_ids.size() + c]; }
};

SimilarityMatrix cross_matrix(const VectorTable& a, const VectorTable& b, int workers = 1);

}  // namespace star

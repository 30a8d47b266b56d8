#include "star/simeng.hpp"

#include <algorithm>
#include <cmath>

#include "star/error.hpp"
#include "star/parallel.hpp"

namespace star {

namespace {

constexpr double kNormTolerance = 1e-6;
constexpr double kCollinear = 1e-4;

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch, "dimensions " + std::to_string(a) + " vs " + std::to_string(b));
}

void require_unit(std::span<const float> v, const char* what) {
  const double n = std::sqrt(dot(v, v));
  if (!(std::abs(n - 1.0) <= kNormTolerance))
    throw Error(ErrorCode::NotNormalized, std::string(what) + " has norm " + std::to_string(n));
}

double clamp_sigma(double s) { return std::clamp(s, -1.0, 1.0); }

}  // namespace

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  double lane[8] = {};
  const std::size_t n = std::min(a.size(), b.size());
  const float* pa = a.data();
  const float* pb = b.data();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t l = 0; l < 8; ++l) lane[l] += static_cast<double>(pa[i + l]) * static_cast<double>(pb[i + l]);
  for (std::size_t l = 0; i < n; ++i, ++l) lane[l] += static_cast<double>(pa[i]) * static_cast<double>(pb[i]);
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

double cosine(std::span<const float> a, std::span<const float> b) {
  require_same_dim(a.size(), b.size());
  require_unit(a, "first vector");
  require_unit(b, "second vector");
  return clamp_sigma(dot(a, b));
}

double distance(double sigma) {
  if (!(sigma >= -1.0 && sigma <= 1.0))
    throw Error(ErrorCode::OutOfRange, "similarity " + std::to_string(sigma) + " outside [-1, 1]");
  return std::sqrt(2.0 * (1.0 - sigma));
}

std::vector<Neighbor> top_k(const VectorTable& index, std::span<const float> query, std::size_t k,
                            const IdSet& exclude, int workers) {
  if (k == 0 || index.empty()) return {};
  require_same_dim(index.dim(), query.size());

  struct Candidate {
    double sigma;
    std::size_t row;
  };
  auto better = [&](const Candidate& x, const Candidate& y) {
    if (x.sigma != y.sigma) return x.sigma > y.sigma;
    return index.id(x.row) < index.id(y.row);
  };

  const auto bounds = shard_bounds(index.size(), static_cast<std::size_t>(resolve_workers(workers)));
  std::vector<std::vector<Candidate>> heaps(bounds.size() - 1);
  parallel_shards(index.size(), workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    auto& heap = heaps[shard];  // worst candidate on top
    heap.reserve(std::min(k, end - begin) + 1);
    for (std::size_t r = begin; r < end; ++r) {
      if (!exclude.empty() && exclude.contains(index.id(r))) continue;
      Candidate c{clamp_sigma(dot(index.row(r), query)), r};
      if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end(), better);
      } else if (better(c, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), better);
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end(), better);
      }
    }
  });

  std::vector<Candidate> all;
  for (auto& heap : heaps) all.insert(all.end(), heap.begin(), heap.end());
  std::sort(all.begin(), all.end(), better);
  if (all.size() > k) all.resize(k);

  std::vector<Neighbor> out;
  out.reserve(all.size());
  for (const auto& c : all) out.push_back({index.id(c.row), c.sigma});
  return out;
}

Vector orthogonalize(std::span<const float> v, std::span<const float> u) {
  require_same_dim(v.size(), u.size());
  require_unit(v, "vector");
  require_unit(u, "anchor");
  const double p = dot(v, u);
  std::vector<double> w(v.size());
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    w[j] = static_cast<double>(v[j]) - p * static_cast<double>(u[j]);
    norm_sq += w[j] * w[j];
  }
  const double norm = std::sqrt(norm_sq);
  if (norm < kCollinear) throw Error(ErrorCode::ZeroVector, "vectors are collinear");
  Vector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = static_cast<float>(w[j] / norm);
  return out;
}

double word_doc_similarity(const SemanticSpace& space, std::string_view term, std::span<const float> doc_vec) {
  return cosine(term_vector(space, term), doc_vec);
}

double word_overlap_similarity(const TokenizedDocument& a, const TokenizedDocument& b, const Vocabulary& vocab,
                               const CorpusStats& stats) {
  auto weighted = [&](const TokenizedDocument& doc) {
    std::vector<std::pair<std::string, double>> out;  // lexicographic
    for (const auto& [term, n] : bag_of(doc)) {
      if (!vocab.is_significant(term)) continue;
      double w = static_cast<double>(n) * idf_weight(term, vocab, stats);
      if (w != 0.0) out.emplace_back(term, w);
    }
    return out;
  };
  const auto wa = weighted(a);
  const auto wb = weighted(b);
  if (wa.empty() || wb.empty()) throw Error(ErrorCode::NoSignificantTerms, "document without weighted terms");

  double na = 0.0, nb = 0.0, ab = 0.0;
  for (const auto& [t, w] : wa) na += w * w;
  for (const auto& [t, w] : wb) nb += w * w;
  auto ia = wa.begin();
  auto ib = wb.begin();
  while (ia != wa.end() && ib != wb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      ab += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return clamp_sigma(ab / (std::sqrt(na) * std::sqrt(nb)));
}

SimilarityMatrix cross_matrix(const VectorTable& a, const VectorTable& b, int workers) {
  require_same_dim(a.dim(), b.dim());
  SimilarityMatrix m;
  m.row_ids = a.ids();
  m.col_ids = b.ids();
  m.values.assign(a.size() * b.size(), 0.0);
  parallel_shards(a.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r)
      for (std::size_t c = 0; c < b.size(); ++c) m.values[r * b.size() + c] = clamp_sigma(dot(a.row(r), b.row(c)));
  });
  return m;
}

}  // namespace star

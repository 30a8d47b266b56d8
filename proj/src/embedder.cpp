#include "star/embedder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "star/error.hpp"
#include "star/parallel.hpp"

namespace star {

// ---------------------------------------------------------------------------
// VectorTable

void VectorTable::append(std::string id, std::span<const float> v) {
  if (v.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch,
                "vector of length " + std::to_string(v.size()) + " in table of dimension " + std::to_string(dim_));
  if (index_.contains(id)) throw Error(ErrorCode::DuplicateDocumentId, id);
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  values_.insert(values_.end(), v.begin(), v.end());
}

void VectorTable::reserve(std::size_t rows) {
  ids_.reserve(rows);
  values_.reserve(rows * dim_);
  index_.reserve(rows);
}

std::optional<std::size_t> VectorTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Configuration

ContextMode ContextMode::parse(std::string_view text) {
  if (text == "sentence") return sentence();
  constexpr std::string_view prefix = "window:";
  if (text.starts_with(prefix)) {
    auto digits = text.substr(prefix.size());
    std::uint32_t w = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), w);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && w >= 2) return window(w);
  }
  throw Error(ErrorCode::ConfigInvalid, "context mode must be 'sentence' or 'window:N' with N >= 2, got '" +
                                            std::string(text) + "'");
}

std::string ContextMode::to_string() const {
  return kind == Kind::Sentence ? "sentence" : "window:" + std::to_string(width);
}

void SpaceConfig::validate() const {
  seed.validate();
  significance.validate();
  if (context.kind == ContextMode::Kind::Window && context.width < 2)
    throw Error(ErrorCode::ConfigInvalid, "context window must span at least 2 tokens");
}

// ---------------------------------------------------------------------------
// Bags

TermBag bag_of(std::span<const Sentence> sentences) {
  TermBag bag;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) {
      auto it = bag.find(token);
      if (it == bag.end())
        bag.emplace(token, 1);
      else
        ++it->second;
    }
  return bag;
}

TermBag bag_of(const TokenizedDocument& doc) { return bag_of(doc.sentences); }

// ---------------------------------------------------------------------------
// Accumulation

namespace {

struct ShardSums {
  explicit ShardSums(std::size_t terms) : sums(terms), counts(terms, 0) {}
  std::vector<std::vector<double>> sums;  // empty until touched
  std::vector<std::uint64_t> counts;
};

/// Significant-term table shared read-only by all shards.
struct TermIndex {
  std::vector<std::string_view> terms;
  std::unordered_map<std::string_view, std::uint32_t> ids;
  std::vector<SeedVector> seeds;
  std::vector<double> weights;
};

class ContextAbsorber {
 public:
  ContextAbsorber(const TermIndex& index, std::uint32_t d) : index_(index), d_(d), s_(d, 0.0), flag_(d, 0) {}

  void absorb(std::vector<std::uint32_t>& ids, ShardSums& out) {
    if (ids.size() < 2) return;
    std::sort(ids.begin(), ids.end());
    distinct_.clear();
    for (auto id : ids) {
      if (!distinct_.empty() && distinct_.back().first == id)
        ++distinct_.back().second;
      else
        distinct_.emplace_back(id, 1);
    }
    if (distinct_.size() < 2) return;

    for (auto [t, m] : distinct_) {
      const double w = static_cast<double>(m) * index_.weights[t];
      const auto& seed = index_.seeds[t];
      for (auto p : seed.positive) {
        touch(p);
        s_[p] += w;
      }
      for (auto n : seed.negative) {
        touch(n);
        s_[n] -= w;
      }
    }
    for (auto [u, m] : distinct_) {
      auto& acc = out.sums[u];
      if (acc.empty()) acc.assign(d_, 0.0);
      for (auto j : touched_) acc[j] += s_[j];
      const double w = static_cast<double>(m) * index_.weights[u];
      const auto& seed = index_.seeds[u];
      for (auto p : seed.positive) acc[p] -= w;
      for (auto n : seed.negative) acc[n] += w;
      ++out.counts[u];
    }
    for (auto j : touched_) {
      s_[j] = 0.0;
      flag_[j] = 0;
    }
    touched_.clear();
  }

 private:
  void touch(std::uint32_t j) {
    if (!flag_[j]) {
      flag_[j] = 1;
      touched_.push_back(j);
    }
  }

  const TermIndex& index_;
  std::uint32_t d_;
  std::vector<double> s_;
  std::vector<unsigned char> flag_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> distinct_;
};

template <typename Fn>
void for_each_context(const TokenizedDocument& doc, const ContextMode& mode, Fn&& fn) {
  for (const auto& sentence : doc.sentences) {
    std::span<const std::string> tokens(sentence);
    if (mode.kind == ContextMode::Kind::Sentence || tokens.size() <= mode.width) {
      fn(tokens);
      continue;
    }
    for (std::size_t i = 0; i + mode.width <= tokens.size(); ++i) fn(tokens.subspan(i, mode.width));
  }
}

void check_unique_ids(std::span<const TokenizedDocument> docs, const std::set<std::string, std::less<>>& existing) {
  std::set<std::string_view> seen;
  for (const auto& doc : docs)
    if (existing.contains(doc.id) || !seen.insert(doc.id).second)
      throw Error(ErrorCode::DuplicateDocumentId, doc.id);
}

double vector_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SemanticSpace::SemanticSpace(SpaceConfig config, Vocabulary vocab, CorpusStats stats)
    : config_(std::move(config)), vocab_(std::move(vocab)), stats_(stats) {
  config_.validate();
  for (const auto& [term, entry] : vocab_.entries())
    if (entry.significant) accumulators_.emplace(term, SemanticAccumulator{std::vector<double>(config_.seed.d, 0.0), 0, false});
}

SemanticSpace SemanticSpace::build(std::span<const TokenizedDocument> docs, Vocabulary vocab, CorpusStats stats,
                                   const SpaceConfig& config, int workers) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents");
  SemanticSpace space(config, std::move(vocab), stats);
  check_unique_ids(docs, space.doc_ids_);
  space.accumulate(docs, workers);
  for (const auto& doc : docs) space.doc_ids_.insert(doc.id);
  return space;
}

SemanticSpace SemanticSpace::restore(SpaceConfig config, Vocabulary vocab, CorpusStats stats,
                                     AccumulatorMap accumulators, std::set<std::string, std::less<>> doc_ids) {
  SemanticSpace space(std::move(config), std::move(vocab), stats);
  if (accumulators.size() != space.accumulators_.size())
    throw Error(ErrorCode::InconsistentBundle, "accumulator count does not match significant terms");
  for (auto& [term, acc] : accumulators) {
    if (!space.accumulators_.contains(term))
      throw Error(ErrorCode::InconsistentBundle, "accumulator for non-significant term '" + term + "'");
    if (acc.sum.size() != space.dim())
      throw Error(ErrorCode::InconsistentBundle, "accumulator dimension mismatch for '" + term + "'");
  }
  space.accumulators_ = std::move(accumulators);
  space.doc_ids_ = std::move(doc_ids);
  return space;
}

const SemanticAccumulator* SemanticSpace::find(std::string_view term) const {
  auto it = accumulators_.find(term);
  return it == accumulators_.end() ? nullptr : &it->second;
}

void SemanticSpace::accumulate(std::span<const TokenizedDocument> docs, int workers) {
  TermIndex index;
  index.terms.reserve(accumulators_.size());
  for (const auto& [term, acc] : accumulators_) {
    index.ids.emplace(term, static_cast<std::uint32_t>(index.terms.size()));
    index.terms.push_back(term);
  }
  const std::size_t n_terms = index.terms.size();
  index.seeds.resize(n_terms);
  index.weights.assign(n_terms, 1.0);
  parallel_shards(n_terms, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      index.seeds[t] = seed_for_term(index.terms[t], config_.seed);
      if (config_.context_idf) index.weights[t] = idf_weight(index.terms[t], vocab_, stats_);
    }
  });

  const auto bounds = shard_bounds(docs.size(), static_cast<std::size_t>(resolve_workers(workers)));
  std::vector<ShardSums> shards;
  shards.reserve(bounds.size() - 1);
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) shards.emplace_back(n_terms);

  parallel_shards(docs.size(), workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    ContextAbsorber absorber(index, config_.seed.d);
    std::vector<std::uint32_t> ids;
    for (std::size_t i = begin; i < end; ++i) {
      for_each_context(docs[i], config_.context, [&](std::span<const std::string> tokens) {
        ids.clear();
        for (const auto& token : tokens)
          if (auto it = index.ids.find(token); it != index.ids.end()) ids.push_back(it->second);
        absorber.absorb(ids, shards[shard]);
      });
    }
  });

  // Fixed shard order per term; terms are independent so they may be split.
  std::vector<SemanticAccumulator*> targets;
  targets.reserve(n_terms);
  for (auto& [term, acc] : accumulators_) targets.push_back(&acc);
  parallel_shards(n_terms, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      auto& target = *targets[t];
      for (auto& shard : shards) {
        const auto& part = shard.sums[t];
        if (!part.empty())
          for (std::size_t j = 0; j < part.size(); ++j) target.sum[j] += part[j];
        target.context_count += shard.counts[t];
      }
    }
  });
}

void SemanticSpace::absorb_context(std::span<const std::string> tokens) {
  TermIndex index;
  for (const auto& token : tokens) {
    if (!accumulators_.contains(token) || index.ids.contains(token)) continue;
    index.ids.emplace(token, static_cast<std::uint32_t>(index.terms.size()));
    index.terms.push_back(token);
    index.seeds.push_back(seed_for_term(token, config_.seed));
    index.weights.push_back(config_.context_idf ? idf_weight(token, vocab_, stats_) : 1.0);
  }
  ShardSums sums(index.terms.size());
  std::vector<std::uint32_t> ids;
  for (const auto& token : tokens)
    if (auto it = index.ids.find(token); it != index.ids.end()) ids.push_back(it->second);
  ContextAbsorber(index, config_.seed.d).absorb(ids, sums);
  for (std::size_t t = 0; t < index.terms.size(); ++t) {
    if (sums.sums[t].empty()) continue;
    auto& acc = accumulators_.find(index.terms[t])->second;
    for (std::size_t j = 0; j < acc.sum.size(); ++j) acc.sum[j] += sums.sums[t][j];
    acc.context_count += sums.counts[t];
  }
}

UpdateReport SemanticSpace::add_documents(std::span<const TokenizedDocument> docs, int workers) {
  UpdateReport report;
  if (docs.empty()) return report;
  check_unique_ids(docs, doc_ids_);

  TermCounts counts;
  for (const auto& doc : docs) counts.add_document(doc);
  const std::uint64_t documents = stats_.documents + docs.size();
  vocab_.add_counts(counts);
  vocab_.apply_significance(config_.significance, documents);
  stats_ = compute_stats(vocab_, documents);

  for (const auto& [term, entry] : vocab_.entries()) {
    auto it = accumulators_.find(term);
    const bool was = it != accumulators_.end();
    if (was && !entry.significant) {
      accumulators_.erase(it);
      report.demoted.push_back(term);
    } else if (!was && entry.significant) {
      // Only terms with occurrences in the old documents miss context.
      auto added = counts.terms.find(term);
      const bool seen_before = entry.collection_count > (added == counts.terms.end() ? 0 : added->second.collection_count);
      accumulators_.emplace(term, SemanticAccumulator{std::vector<double>(config_.seed.d, 0.0), 0, seen_before});
      report.promoted.push_back(term);
    }
  }

  accumulate(docs, workers);
  for (const auto& doc : docs) doc_ids_.insert(doc.id);
  report.documents_added = docs.size();
  return report;
}

SemanticSpace build_space(std::span<const TokenizedDocument> docs, const SpaceConfig& config, int workers) {
  config.validate();
  auto [vocab, stats] = build_vocabulary(docs, config.significance, workers);
  return SemanticSpace::build(docs, std::move(vocab), stats, config, workers);
}

// ---------------------------------------------------------------------------
// Reading vectors

double idf_weight(std::string_view term, const Vocabulary& vocab, const CorpusStats& stats) {
  const auto* entry = vocab.find(term);
  if (entry == nullptr || entry->document_frequency == 0)
    throw Error(ErrorCode::UnknownTerm, std::string(term));
  return std::log(static_cast<double>(stats.documents) / static_cast<double>(entry->document_frequency));
}

double idf_weight(const SemanticSpace& space, std::string_view term) {
  return idf_weight(term, space.vocab(), space.stats());
}

Vector term_vector(const SemanticSpace& space, std::string_view term) {
  const auto* acc = space.find(term);
  if (acc == nullptr) throw Error(ErrorCode::UnknownTerm, std::string(term));
  const double norm = vector_norm(acc->sum);
  if (norm == 0.0) throw Error(ErrorCode::ZeroVector, "term '" + std::string(term) + "' has no context");
  Vector out(acc->sum.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<float>(acc->sum[j] / norm);
  return out;
}

namespace {

using NormTable = std::unordered_map<std::string_view, double>;

ComposedVector compose_impl(const SemanticSpace& space, const TermBag& bag, const NormTable* norms) {
  std::vector<double> r(space.dim(), 0.0);
  ComposedVector out;
  bool any = false;
  for (const auto& [term, n] : bag) {
    const auto* acc = space.find(term);
    if (acc == nullptr) continue;
    double norm;
    if (norms != nullptr) {
      auto it = norms->find(term);
      norm = it == norms->end() ? 0.0 : it->second;
    } else {
      norm = vector_norm(acc->sum);
    }
    if (norm == 0.0) continue;
    const double w = static_cast<double>(n) * idf_weight(space, term);
    if (w == 0.0) continue;
    const double c = w / norm;
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += c * acc->sum[j];
    out.term_count += n;
    any = true;
  }
  const double rn = vector_norm(r);
  if (!any || rn == 0.0) throw Error(ErrorCode::NoSignificantTerms, "nothing to compose");
  out.vec.resize(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) out.vec[j] = static_cast<float>(r[j] / rn);
  return out;
}

NormTable all_norms(const SemanticSpace& space, int workers) {
  std::vector<const std::pair<const std::string, SemanticAccumulator>*> items;
  items.reserve(space.accumulators().size());
  for (const auto& item : space.accumulators()) items.push_back(&item);
  std::vector<double> values(items.size());
  parallel_shards(items.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = vector_norm(items[i]->second.sum);
  });
  NormTable norms;
  norms.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) norms.emplace(items[i]->first, values[i]);
  return norms;
}

}  // namespace

ComposedVector compose_vector(const SemanticSpace& space, const TermBag& bag) {
  return compose_impl(space, bag, nullptr);
}

DocumentVectorBatch document_vectors(const SemanticSpace& space, std::span<const TokenizedDocument> docs,
                                     int workers) {
  const NormTable norms = all_norms(space, workers);
  std::vector<std::optional<DocumentVector>> results(docs.size());
  parallel_shards(docs.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        auto composed = compose_impl(space, bag_of(docs[i]), &norms);
        results[i] = DocumentVector{docs[i].id, std::move(composed.vec), composed.term_count};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoSignificantTerms) throw;
      }
    }
  });
  DocumentVectorBatch batch;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (results[i])
      batch.vectors.push_back(std::move(*results[i]));
    else
      batch.skipped.push_back(docs[i].id);
  }
  return batch;
}

VectorTable to_table(std::span<const DocumentVector> docs, std::uint32_t dim) {
  VectorTable table(dim);
  table.reserve(docs.size());
  for (const auto& doc : docs) table.append(doc.doc_id, doc.vec);
  return table;
}

VectorTable term_table(const SemanticSpace& space, int workers) {
  const NormTable norms = all_norms(space, workers);
  VectorTable table(space.dim());
  Vector row(space.dim());
  for (const auto& [term, acc] : space.accumulators()) {
    const double norm = norms.at(term);
    if (norm == 0.0) continue;
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = static_cast<float>(acc.sum[j] / norm);
    table.append(term, row);
  }
  return table;
}

}  // namespace star

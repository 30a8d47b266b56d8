#include "star/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "star/error.hpp"
#include "star/parallel.hpp"
#include "star/simeng.hpp"

namespace star {

Linkage parse_linkage(std::string_view name) {
  if (name == "average") return Linkage::Average;
  if (name == "complete") return Linkage::Complete;
  if (name == "single") return Linkage::Single;
  throw Error(ErrorCode::ConfigInvalid, "unknown linkage '" + std::string(name) + "'");
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
  }
  return "average";
}

std::vector<std::size_t> Dendrogram::members(std::size_t node) const {
  const std::size_t n = leaves.size();
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    if (x < n) {
      out.push_back(x);
    } else {
      const auto& m = merges.at(x - n);
      stack.push_back(m.left);
      stack.push_back(m.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dendrogram hcluster(const VectorTable& docs, Linkage linkage, int workers) {
  const std::size_t n = docs.size();
  if (n < 2) throw Error(ErrorCode::TooFewDocuments, "clustering needs at least two documents");

  std::vector<double> dist(n * n, 0.0);
  parallel_shards(n, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) dist[i * n + j] = distance(std::clamp(dot(docs.row(i), docs.row(j)), -1.0, 1.0));
  });
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<char> active(n, 1);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> node(n);
  std::iota(node.begin(), node.end(), 0);

  // Nearest active slot to the right of each slot; strict '<' keeps the
  // smallest index on ties.
  std::vector<std::size_t> nn(n, none);
  std::vector<double> nn_dist(n, inf);
  auto refresh = [&](std::size_t i) {
    nn[i] = none;
    nn_dist[i] = inf;
    for (std::size_t j = i + 1; j < n; ++j)
      if (active[j] && at(i, j) < nn_dist[i]) {
        nn[i] = j;
        nn_dist[i] = at(i, j);
      }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  Dendrogram out;
  out.leaves = docs.ids();
  out.linkage = linkage;
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = none;
    for (std::size_t i = 0; i < n; ++i)
      if (active[i] && nn[i] != none && (a == none || nn_dist[i] < nn_dist[a])) a = i;
    const std::size_t b = nn[a];
    const double d_ab = nn_dist[a];
    out.merges.push_back({node[a], node[b], 1.0 - d_ab * d_ab / 2.0, size[a] + size[b]});

    const double wa = static_cast<double>(size[a]);
    const double wb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      double merged;
      switch (linkage) {
        case Linkage::Single: merged = std::min(at(a, k), at(b, k)); break;
        case Linkage::Complete: merged = std::max(at(a, k), at(b, k)); break;
        default: merged = (wa * at(a, k) + wb * at(b, k)) / (wa + wb); break;
      }
      at(a, k) = at(k, a) = merged;
    }
    active[b] = 0;
    size[a] += size[b];
    node[a] = n + step;

    refresh(a);
    for (std::size_t k = 0; k < b; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else if (k < a && (at(k, a) < nn_dist[k] || (at(k, a) == nn_dist[k] && a < nn[k]))) {
        nn[k] = a;
        nn_dist[k] = at(k, a);
      }
    }
  }
  return out;
}

namespace {

void sort_clusters(std::vector<Cluster>& clusters) {
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& x, const Cluster& y) {
    if (x.split_at != y.split_at) return x.split_at > y.split_at;
    return x.members.front() < y.members.front();
  });
}

std::vector<std::size_t> roots_of(const Dendrogram& d, std::size_t merges_applied) {
  std::vector<char> consumed(d.leaves.size() + merges_applied, 0);
  for (std::size_t i = 0; i < merges_applied; ++i) {
    consumed[d.merges[i].left] = 1;
    consumed[d.merges[i].right] = 1;
  }
  std::vector<std::size_t> roots;
  for (std::size_t x = 0; x < consumed.size(); ++x)
    if (!consumed[x]) roots.push_back(x);
  return roots;
}

}  // namespace

ClusterCut cut_clusters(const Dendrogram& dendrogram, double min_similarity) {
  const std::size_t n = dendrogram.leaves.size();
  std::vector<double> subtree_min(dendrogram.node_count(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const auto& m = dendrogram.merges[i];
    subtree_min[n + i] = std::min({m.similarity, subtree_min[m.left], subtree_min[m.right]});
  }

  ClusterCut cut;
  std::vector<std::size_t> stack = roots_of(dendrogram, dendrogram.merges.size());
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    if (x < n) {
      ++cut.singletons;
    } else if (subtree_min[x] >= min_similarity) {
      cut.clusters.push_back({x, dendrogram.members(x), dendrogram.merges[x - n].similarity});
    } else {
      stack.push_back(dendrogram.merges[x - n].left);
      stack.push_back(dendrogram.merges[x - n].right);
    }
  }
  sort_clusters(cut.clusters);
  return cut;
}

ClusterCut cut_top(const Dendrogram& dendrogram, std::size_t count) {
  const std::size_t n = dendrogram.leaves.size();
  count = std::clamp<std::size_t>(count, 1, std::max<std::size_t>(n, 1));
  const std::size_t applied = std::min(dendrogram.merges.size(), n - count);
  ClusterCut cut;
  for (std::size_t x : roots_of(dendrogram, applied)) {
    if (x < n)
      ++cut.singletons;
    else
      cut.clusters.push_back({x, dendrogram.members(x), dendrogram.merges[x - n].similarity});
  }
  sort_clusters(cut.clusters);
  return cut;
}

Summary summarize(const TokenizedDocument& doc, const SemanticSpace& space, std::size_t n_keep, SummaryUnit unit) {
  const Vector whole = compose_vector(space, bag_of(doc)).vec;

  std::vector<std::span<const Sentence>> units;
  std::span<const Sentence> sentences(doc.sentences);
  if (unit == SummaryUnit::Paragraph) {
    for (const auto& p : doc.paragraphs) units.push_back(sentences.subspan(p.begin, p.end - p.begin));
  } else {
    for (std::size_t i = 0; i < sentences.size(); ++i) units.push_back(sentences.subspan(i, 1));
  }

  Summary summary;
  summary.doc_id = doc.id;
  summary.unit_scores.resize(units.size());
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < units.size(); ++i) {
    try {
      auto v = compose_vector(space, bag_of(units[i])).vec;
      summary.unit_scores[i] = std::clamp(dot(v, whole), -1.0, 1.0);
      eligible.push_back(i);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSignificantTerms) throw;
    }
  }

  std::stable_sort(eligible.begin(), eligible.end(),
                   [&](std::size_t x, std::size_t y) { return *summary.unit_scores[x] > *summary.unit_scores[y]; });
  if (eligible.size() > n_keep) eligible.resize(n_keep);
  std::sort(eligible.begin(), eligible.end());
  summary.kept = eligible;
  for (auto i : eligible) summary.scores.push_back(*summary.unit_scores[i]);
  return summary;
}

PortfolioReport compare_portfolios(const VectorTable& a, const VectorTable& b, double threshold, int workers) {
  const SimilarityMatrix m = cross_matrix(a, b, workers);
  PortfolioReport report;
  report.threshold = threshold;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    PortfolioEntry entry{m.row_ids[r], {}};
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.at(r, c) >= threshold) entry.matches.push_back({m.col_ids[c], m.at(r, c)});
    if (entry.matches.empty()) continue;
    std::sort(entry.matches.begin(), entry.matches.end(), [](const PortfolioMatch& x, const PortfolioMatch& y) {
      if (x.sigma != y.sigma) return x.sigma > y.sigma;
      return x.id < y.id;
    });
    report.entries.push_back(std::move(entry));
  }
  std::sort(report.entries.begin(), report.entries.end(), [](const PortfolioEntry& x, const PortfolioEntry& y) {
    if (x.matches.front().sigma != y.matches.front().sigma) return x.matches.front().sigma > y.matches.front().sigma;
    return x.id < y.id;
  });
  return report;
}

WordUsageTable word_usage_table(const TokenizedDocument& a, const TokenizedDocument& b, const SemanticSpace& space,
                                std::size_t top_n) {
  const TermBag bag_a = bag_of(a);
  const TermBag bag_b = bag_of(b);
  const Vector vec_a = compose_vector(space, bag_a).vec;
  const Vector vec_b = compose_vector(space, bag_b).vec;

  auto column = [&](const TermBag& own, const TermBag& other, const Vector& other_vec) {
    std::vector<WordUsageRow> rows;
    for (const auto& [term, n] : own) {
      Vector tv;
      try {
        tv = term_vector(space, term);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownTerm || e.code() == ErrorCode::ZeroVector) continue;
        throw;
      }
      rows.push_back({term, n, std::clamp(dot(tv, other_vec), -1.0, 1.0), other.contains(term)});
    }
    std::sort(rows.begin(), rows.end(), [](const WordUsageRow& x, const WordUsageRow& y) {
      if (x.sigma != y.sigma) return x.sigma > y.sigma;
      return x.term < y.term;
    });
    if (top_n > 0 && rows.size() > top_n) rows.resize(top_n);
    return rows;
  };

  WordUsageTable table;
  table.semantic_sigma = std::clamp(dot(vec_a, vec_b), -1.0, 1.0);
  try {
    table.overlap_sigma = word_overlap_similarity(a, b, space.vocab(), space.stats());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSignificantTerms) throw;
  }
  table.left = column(bag_a, bag_b, vec_b);
  table.right = column(bag_b, bag_a, vec_a);
  return table;
}

}  // namespace star

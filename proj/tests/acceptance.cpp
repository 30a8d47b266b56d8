// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "star/analytics.hpp"
#include "star/error.hpp"
#include "star/pipeline.hpp"
#include "star/seedspace.hpp"
#include "star/simeng.hpp"
#include "star/store.hpp"
#include "synthetic.hpp"

namespace {

using namespace star;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and limits.
constexpr double kAngleEpsilonDeg = 15.0;
constexpr double kMinFractionWithin = 0.99;
constexpr double kMeanAngleTolDeg = 1.0;
constexpr double kOrthogonalityBudgetS = 10.0;
constexpr double kNoiseRatioTarget = 2.0;
constexpr double kNoiseRatioTol = 0.4;
constexpr std::uint64_t kNoiseSamples = 100000;
constexpr double kNoiseBudgetS = 30.0;
constexpr double kMinCosinesPerSecond = 600000.0;
constexpr double kMinScanSeconds = 3.0;
constexpr double kPairedMinSigma = 0.5;
constexpr double kUnrelatedMaxSigma = 0.3;
constexpr int kOracleInstances = 50;
constexpr std::size_t kOracleMaxItems = 200;
constexpr double kOracleBudgetS = 60.0;
constexpr double kOracleSigmaTol = 1e-9;
constexpr double kAnchorCosineTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("star_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "star");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << e.str();
  return code;
}

// Dense lookup of seed b, dotted with the sparse seed a.
std::int64_t sparse_dense_dot(const SeedVector& a, const std::vector<std::int8_t>& b) {
  std::int64_t s = 0;
  for (auto i : a.positive) s += b[i];
  for (auto i : a.negative) s -= b[i];
  return s;
}

std::vector<std::int8_t> densify(const SeedVector& s) {
  std::vector<std::int8_t> v(s.dim, 0);
  for (auto i : s.positive) v[i] = 1;
  for (auto i : s.negative) v[i] = -1;
  return v;
}

// ---------------------------------------------------------------------------

Outcome quasi_orthogonality() {
  const auto start = Clock::now();
  SeedConfig cfg;  // d = 1000, k = 20
  cfg.d = 1000;
  cfg.k = 20;
  std::vector<SeedVector> seeds;
  std::vector<std::vector<std::int8_t>> dense;
  std::vector<std::string> terms;
  for (int i = 0; i < 1000; ++i) {
    terms.push_back("seed-term-" + std::to_string(i));
    seeds.push_back(seed_for_term(terms.back(), cfg));
    dense.push_back(densify(seeds.back()));
  }
  std::uint64_t pairs = 0, within = 0;
  double angle_sum = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      double c = static_cast<double>(sparse_dense_dot(seeds[i], dense[j])) / (2.0 * cfg.k);
      double angle = std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
      angle_sum += angle;
      within += std::abs(angle - 90.0) <= kAngleEpsilonDeg ? 1 : 0;
      ++pairs;
    }
  const double fraction = static_cast<double>(within) / static_cast<double>(pairs);
  const double mean = angle_sum / static_cast<double>(pairs);
  auto report = quasi_orthogonality_report(terms, cfg, kAngleEpsilonDeg);
  const double elapsed = seconds_since(start);
  const bool agree = report.pair_count == pairs && std::abs(report.mean_angle_deg - mean) < 1e-9 &&
                     std::abs(report.fraction_within - fraction) < 1e-12;
  return {fraction >= kMinFractionWithin && std::abs(mean - 90.0) <= kMeanAngleTolDeg && elapsed < kOrthogonalityBudgetS &&
              agree,
          std::to_string(pairs) + " pairs, within " + fmt(100 * fraction, 2) + "%, mean " + fmt(mean, 3) +
              " deg, report agrees " + (agree ? "yes" : "no") + ", " + fmt(elapsed, 2) + " s"};
}

Outcome noise_scaling() {
  const auto start = Clock::now();
  auto measure = [](std::uint32_t d) {
    SeedConfig cfg{d, 20, 0x6e6f697365ULL + d};
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < kNoiseSamples; ++i) {
      auto a = seed_for_term("na" + std::to_string(i), cfg);
      auto b = seed_for_term("nb" + std::to_string(i), cfg);
      const double x = static_cast<double>(sparse_dense_dot(a, densify(b))) / 40.0;
      sum += x;
      sum_sq += x * x;
    }
    const double n = static_cast<double>(kNoiseSamples);
    return std::sqrt((sum_sq - sum * sum / n) / (n - 1));
  };
  const double s500 = measure(500), s2000 = measure(2000);
  const double ratio = s500 / s2000;
  SeedConfig c500{500, 20, 1}, c2000{2000, 20, 1};
  const double lib_ratio =
      estimate_noise(c500, kNoiseSamples, 3).std_dev / estimate_noise(c2000, kNoiseSamples, 3).std_dev;
  const double elapsed = seconds_since(start);
  return {std::abs(ratio - kNoiseRatioTarget) <= kNoiseRatioTol &&
              std::abs(lib_ratio - kNoiseRatioTarget) <= kNoiseRatioTol && elapsed < kNoiseBudgetS,
          "std d=500 " + fmt(s500, 5) + ", d=2000 " + fmt(s2000, 5) + ", ratio " + fmt(ratio, 3) +
              " (library estimate " + fmt(lib_ratio, 3) + "), " + fmt(elapsed, 2) + " s"};
}

Outcome throughput() {
  const std::size_t rows = 20000;
  auto table = testing::random_unit_table(rows, 500, 404);
  auto queries = testing::random_unit_table(16, 500, 405, 0, "q");
  std::uint64_t evaluations = 0;
  double checksum = 0.0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  std::size_t q = 0;
  while (elapsed < kMinScanSeconds) {
    auto hits = top_k(table, queries.row(q++ % queries.size()), 10, {}, 1);
    checksum += hits.front().sigma;
    evaluations += rows;
    elapsed = seconds_since(start);
  }
  const double rate = static_cast<double>(evaluations) / elapsed;
  return {rate >= kMinCosinesPerSecond && checksum != 0.0,
          fmt(rate / 1e6, 2) + "M cosines/s at d=500 on 1 worker over " + fmt(elapsed, 2) + " s"};
}

Outcome semantic_vs_overlap() {
  auto corpus = testing::make_synonym_corpus(20);
  auto training = tokenize_all(corpus.training, true);
  auto space = build_space(training, SpaceConfig{});
  std::vector<TokenizedDocument> left, right;
  std::vector<Vector> lv, rv;
  for (std::size_t t = 0; t < corpus.left.size(); ++t) {
    left.push_back(tokenize_document(corpus.left[t], false));
    right.push_back(tokenize_document(corpus.right[t], false));
    lv.push_back(compose_vector(space, bag_of(left.back())).vec);
    rv.push_back(compose_vector(space, bag_of(right.back())).vec);
  }
  double min_paired = 2.0, max_unrelated = -2.0, max_bow = -1.0;
  for (std::size_t t = 0; t < left.size(); ++t) {
    min_paired = std::min(min_paired, cosine(lv[t], rv[t]));
    max_bow = std::max(max_bow, word_overlap_similarity(left[t], right[t], space.vocab(), space.stats()));
    for (std::size_t s = 0; s < right.size(); ++s)
      if (s != t) max_unrelated = std::max(max_unrelated, cosine(lv[t], rv[s]));
  }
  return {min_paired >= kPairedMinSigma && max_bow == 0.0 && max_unrelated < kUnrelatedMaxSigma,
          "paired sigma min " + fmt(min_paired, 3) + ", paired sigma_bow max " + fmt(max_bow, 3) +
              ", unrelated sigma max " + fmt(max_unrelated, 3)};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(5150);
  int mismatches = 0, summaries = 0;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (mismatches++ == 0) first_failure = what;
  };

  for (int inst = 0; inst < kOracleInstances; ++inst) {
    const std::size_t n = 2 + testing::pick(rng, kOracleMaxItems - 1);
    const auto dim = static_cast<std::uint32_t>(4 + testing::pick(rng, 61));
    auto table = testing::random_unit_table(n, dim, rng(), testing::pick(rng, n / 4 + 1));

    // top_k
    auto query = testing::random_unit_table(1, dim, rng(), 0, "q");
    const std::size_t k = 1 + testing::pick(rng, n + 5);
    std::vector<std::string> exclude;
    for (std::size_t e = testing::pick(rng, 4); e > 0; --e) exclude.push_back(table.id(testing::pick(rng, n)));
    auto got = top_k(table, query.row(0), k, IdSet(exclude.begin(), exclude.end()), 1 + inst % 4);
    auto want = oracle::top_k(table, query.row(0), k, exclude);
    bool ok = got.size() == want.size();
    for (std::size_t i = 0; ok && i < got.size(); ++i)
      ok = got[i].id == want[i].id && std::abs(got[i].sigma - want[i].sigma) <= kOracleSigmaTol;
    if (!ok) fail("top_k instance " + std::to_string(inst));

    // hcluster, average linkage
    auto dendrogram = hcluster(table, Linkage::Average, 1 + inst % 3);
    auto merges = oracle::hcluster(table, Linkage::Average);
    ok = dendrogram.merges.size() == merges.size();
    for (std::size_t i = 0; ok && i < merges.size(); ++i)
      ok = dendrogram.merges[i].left == merges[i].left && dendrogram.merges[i].right == merges[i].right &&
           dendrogram.merges[i].size == merges[i].size &&
           std::abs(dendrogram.merges[i].similarity - merges[i].similarity) <= kOracleSigmaTol;
    if (!ok) fail("hcluster instance " + std::to_string(inst));

    // cross_matrix
    auto other = testing::random_unit_table(1 + testing::pick(rng, kOracleMaxItems), dim, rng(), 0, "b");
    auto matrix = cross_matrix(table, other, 1 + inst % 4);
    auto reference = oracle::cross_matrix(table, other);
    ok = matrix.values.size() == reference.size();
    for (std::size_t i = 0; ok && i < reference.size(); ++i)
      ok = std::abs(matrix.values[i] - reference[i]) <= kOracleSigmaTol;
    if (!ok) fail("cross_matrix instance " + std::to_string(inst));
  }

  // summarize over one shared space
  auto corpus = testing::make_synonym_corpus(20);
  auto training = tokenize_all(corpus.training, true);
  auto space = build_space(training, SpaceConfig{});
  std::vector<std::string> vocabulary = {"unknownword", "filler"};
  for (const auto& ctx : corpus.contexts) vocabulary.insert(vocabulary.end(), ctx.begin(), ctx.end());
  for (int inst = 0; inst < kOracleInstances; ++inst) {
    std::vector<std::string> pool;
    for (std::size_t w = 8 + testing::pick(rng, 40); w > 0; --w)
      pool.push_back(vocabulary[testing::pick(rng, vocabulary.size())]);
    auto doc = tokenize_document(testing::make_long_document(pool, 1 + testing::pick(rng, kOracleMaxItems), rng()), false);
    const std::size_t n_keep = 1 + testing::pick(rng, 12);
    Summary s;
    try {
      s = summarize(doc, space, n_keep);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSignificantTerms) throw;
      continue;
    }
    ++summaries;
    auto o = oracle::summarize(doc, space, n_keep);
    bool ok = s.kept == o.kept && s.scores.size() == o.scores.size();
    for (std::size_t i = 0; ok && i < o.scores.size(); ++i) ok = std::abs(s.scores[i] - o.scores[i]) <= kOracleSigmaTol;
    if (!ok) fail("summarize instance " + std::to_string(inst));
  }

  const double elapsed = seconds_since(start);
  return {mismatches == 0 && summaries == kOracleInstances && elapsed < kOracleBudgetS,
          std::to_string(kOracleInstances) + " instances x 4 operations (" + std::to_string(summaries) +
              " summaries), " + std::to_string(mismatches) +
              " mismatches" + (first_failure.empty() ? "" : " (first: " + first_failure + ")") + ", " +
              fmt(elapsed, 2) + " s"};
}

Outcome parallel_determinism() {
  auto dir = scratch("parallel");
  auto docs = testing::make_topic_corpus(5000, 120, 606);
  {
    std::ofstream out(dir / "corpus.jsonl");
    for (const auto& d : docs) {
      out << "{\"id\":\"" << d.id << "\",\"title\":\"" << *d.title << "\",\"text\":\"";
      for (char c : d.text) out << (c == '\n' ? std::string("\\n") : std::string(1, c));
      out << "\"}\n";
    }
  }
  const std::vector<std::string> queries = {docs[10].text, docs[999].text + " " + docs[2500].text,
                                            "topic7x3 topic7x9 topic8x1"};
  std::string reference_terms, reference_docs, reference_queries, reference_build;
  std::string detail;
  bool pass = true;
  for (int workers : {1, 2, 8}) {
    const auto index = (dir / ("w" + std::to_string(workers))).string();
    std::string build_out;
    if (cli({"build", "--corpus", (dir / "corpus.jsonl").string(), "--index", index, "--workers",
             std::to_string(workers)},
            &build_out) != 0)
      return {false, "build failed with " + std::to_string(workers) + " workers"};
    std::string answers;
    for (const auto& q : queries) {
      std::string out;
      if (cli({"query", "--index", index, "--text", q, "--k", "25", "--workers", std::to_string(workers)}, &out) != 0)
        return {false, "query failed"};
      answers += out;
    }
    auto terms = slurp(fs::path(index) / "terms.vec");
    auto vectors = slurp(fs::path(index) / "docs.vec");
    if (workers == 1) {
      reference_terms = terms;
      reference_docs = vectors;
      reference_queries = answers;
      reference_build = build_out;
      detail = std::to_string(terms.size()) + " byte terms.vec";
    } else {
      const bool same = terms == reference_terms && vectors == reference_docs && answers == reference_queries &&
                        build_out == reference_build;
      pass = pass && same;
      detail += ", " + std::to_string(workers) + " workers " + (same ? "identical" : "DIFFERENT");
    }
  }
  fs::remove_all(dir);
  return {pass, detail};
}

Outcome incrementality() {
  auto corpus = testing::make_incremental_corpus();
  SpaceConfig cfg;
  auto merged_docs = corpus.a;
  merged_docs.insert(merged_docs.end(), corpus.b.begin(), corpus.b.end());
  auto full = build_index(merged_docs, cfg);
  auto bundle = build_index(corpus.a, cfg).bundle;
  add_to_index(bundle, corpus.b);

  // Significance predicted from raw counts.
  auto counts = [](const std::vector<RawDocument>& docs) {
    std::map<std::string, std::pair<std::uint64_t, std::set<std::string>>> c;
    for (const auto& d : docs)
      for (const auto& s : tokenize_document(d, true).sentences)
        for (const auto& t : s) {
          ++c[t].first;
          c[t].second.insert(d.id);
        }
    return c;
  };
  auto significant = [&](const auto& c, std::size_t m) {
    std::set<std::string> out;
    for (const auto& [t, v] : c)
      if (v.first >= cfg.significance.min_count &&
          static_cast<double>(v.second.size()) <= cfg.significance.max_df_ratio * static_cast<double>(m))
        out.insert(t);
    return out;
  };
  const auto count_a = counts(corpus.a);
  const auto sig_a = significant(count_a, corpus.a.size());
  const auto sig_all = significant(counts(merged_docs), merged_docs.size());
  std::set<std::string> expected_partial;
  for (const auto& t : sig_all)
    if (!sig_a.contains(t) && count_a.contains(t)) expected_partial.insert(t);

  const std::size_t d = bundle.dim();
  std::map<std::string, std::size_t> full_rows;
  for (std::size_t i = 0; i < full.bundle.terms.size(); ++i) full_rows[full.bundle.terms[i].term] = i;
  std::size_t compared = 0, differing = 0;
  std::set<std::string> partial;
  for (std::size_t i = 0; i < bundle.terms.size(); ++i) {
    const auto& row = bundle.terms[i];
    if (row.partial) partial.insert(row.term);
    auto it = full_rows.find(row.term);
    if (it == full_rows.end() || !sig_a.contains(row.term)) continue;
    ++compared;
    const bool same = std::equal(bundle.accumulators.begin() + static_cast<long>(i * d),
                                 bundle.accumulators.begin() + static_cast<long>((i + 1) * d),
                                 full.bundle.accumulators.begin() + static_cast<long>(it->second * d)) &&
                      row.context_count == full.bundle.terms[it->second].context_count;
    differing += same ? 0 : 1;
  }
  std::set<std::string> index_terms;
  for (const auto& row : bundle.terms) index_terms.insert(row.term);
  const bool same_vocab = index_terms == sig_all;
  const bool pass = differing == 0 && compared > 0 && partial == expected_partial && !expected_partial.empty() &&
                    same_vocab;
  return {pass, std::to_string(compared) + " stable terms compared, " + std::to_string(differing) + " differ; " +
                    std::to_string(partial.size()) + " partial flags, " + std::to_string(expected_partial.size()) +
                    " predicted" + (same_vocab ? "" : "; significant set differs from prediction")};
}

Outcome disambiguation() {
  auto corpus = testing::make_two_sense_corpus();
  auto docs = tokenize_all(corpus.docs, true);
  auto space = build_space(docs, SpaceConfig{});
  auto anchor = term_vector(space, corpus.anchor);
  auto residual = orthogonalize(term_vector(space, corpus.word), anchor);
  auto hits = top_k(term_table(space), residual, 10);
  std::set<std::string> a(corpus.sense_a.begin(), corpus.sense_a.end());
  std::set<std::string> b(corpus.sense_b.begin(), corpus.sense_b.end());
  b.insert(corpus.anchor);
  int in_a = 0, in_b = 0;
  std::string listing;
  for (const auto& h : hits) {
    in_a += a.contains(h.id) ? 1 : 0;
    in_b += b.contains(h.id) ? 1 : 0;
    listing += (listing.empty() ? "" : " ") + h.id;
  }
  const double c = dot(residual, anchor);
  return {in_b == 0 && in_a >= 8 && std::abs(c) <= kAnchorCosineTol,
          "top-10 sense A " + std::to_string(in_a) + ", sense B " + std::to_string(in_b) + ", cos to anchor " +
              fmt(c, 9) + " [" + listing + "]"};
}

Outcome summarization() {
  auto corpus = testing::make_synonym_corpus(20);
  auto training = tokenize_all(corpus.training, true);
  auto space = build_space(training, SpaceConfig{});
  std::vector<std::string> vocabulary;
  for (std::size_t t = 0; t < 4; ++t)
    vocabulary.insert(vocabulary.end(), corpus.contexts[t].begin(), corpus.contexts[t].end());
  vocabulary.push_back("filler");
  auto raw = testing::make_long_document(vocabulary, 60, 60606, "sixty");
  auto doc = tokenize_document(raw, false);
  auto s = summarize(doc, space, 6);

  double min_kept = 2.0, max_dropped = -2.0;
  std::size_t eligible = 0;
  for (std::size_t p = 0; p < s.unit_scores.size(); ++p) {
    if (!s.unit_scores[p]) continue;
    ++eligible;
    if (std::binary_search(s.kept.begin(), s.kept.end(), p))
      min_kept = std::min(min_kept, *s.unit_scores[p]);
    else
      max_dropped = std::max(max_dropped, *s.unit_scores[p]);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < s.kept.size(); ++i) increasing = increasing && s.kept[i - 1] < s.kept[i];

  // Same document through the command line: 6 paragraphs and gap markers.
  auto dir = scratch("summary");
  {
    std::ofstream out(dir / "training.jsonl");
    for (const auto& d : corpus.training) out << "{\"id\":\"" << d.id << "\",\"text\":\"" << d.text << "\"}\n";
  }
  std::ofstream(dir / "sixty.txt") << raw.text;
  std::string out;
  int rows = 0, gaps = 0;
  if (cli({"build", "--corpus", (dir / "training.jsonl").string(), "--index", (dir / "idx").string()}) == 0 &&
      cli({"summarize", "--index", (dir / "idx").string(), "--file", (dir / "sixty.txt").string(), "--n-keep", "6"},
          &out) == 0) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
      if (line == "...") ++gaps;
      else if (!line.empty() && line[0] != '#') ++rows;
    }
  }
  fs::remove_all(dir);
  return {doc.paragraphs.size() == 60 && eligible == 60 && s.kept.size() == 6 && increasing &&
              min_kept >= max_dropped && rows == 6 && gaps > 0,
          std::to_string(doc.paragraphs.size()) + " paragraphs, kept " + std::to_string(s.kept.size()) +
              ", min kept sigma " + fmt(min_kept) + " >= max dropped " + fmt(max_dropped) + ", command line rows " +
              std::to_string(rows) + " with " + std::to_string(gaps) + " gap markers"};
}

Outcome distance_formula() {
  const bool exact = distance(1.0) == 0.0 && distance(-1.0) == 2.0 && distance(0.5) == 1.0;
  bool monotone = true;
  double prev = distance(-1.0);
  for (int i = 1; i < 1000; ++i) {
    const double sigma = -1.0 + 2.0 * i / 999.0;
    const double dcur = distance(std::min(sigma, 1.0));
    monotone = monotone && dcur < prev;
    prev = dcur;
  }
  return {exact && monotone, std::string("exact points ") + (exact ? "ok" : "WRONG") + ", strictly decreasing over 1000 points " +
                                 (monotone ? "ok" : "NO")};
}

std::string format_hits(const std::vector<Neighbor>& hits) {
  std::string out;
  char buf[64];
  for (const auto& h : hits) {
    std::snprintf(buf, sizeof buf, "%.17g", h.sigma);
    out += h.id + "\t" + buf + "\n";
  }
  return out;
}

Outcome persistence() {
  auto dir = scratch("persist");
  auto docs = testing::make_topic_corpus(1000, 40, 1111);
  auto built = build_index(docs, SpaceConfig{});
  save_index(built.bundle, dir / "idx");
  auto loaded = load_index(dir / "idx");
  auto restored = restore_space(loaded);

  std::string before, after;
  for (std::size_t q = 0; q < 25; ++q) {
    auto bag = bag_of(tokenize_document(docs[q * 37], false));
    before += format_hits(top_k(built.bundle.doc_vectors, compose_vector(built.space, bag).vec, 15));
    after += format_hits(top_k(loaded.doc_vectors, compose_vector(restored, bag).vec, 15));
  }
  const bool same = before == after && equivalent(built.bundle, loaded);

  int probes = 0, detected = 0;
  for (const char* name : {"manifest.json", "vocab.tsv", "terms.vec", "docs.vec", "docids.tsv"}) {
    const auto path = dir / "idx" / name;
    const std::string original = slurp(path);
    for (int i = 0; i < 40; ++i) {
      std::string bad = original;
      const std::size_t pos = (original.size() - 1) * static_cast<std::size_t>(i) / 39;
      bad[pos] = static_cast<char>(bad[pos] ^ (1 << (i % 8)));
      std::ofstream(path, std::ios::binary | std::ios::trunc) << bad;
      ++probes;
      try {
        load_index(dir / "idx");
      } catch (const Error& e) {
        const bool data_file = std::string(name) != "manifest.json";
        detected += !data_file || e.code() == ErrorCode::ChecksumMismatch ? 1 : 0;
      }
    }
    std::ofstream(path, std::ios::binary | std::ios::trunc) << original;
  }
  bool clean_reload = true;
  try {
    load_index(dir / "idx");
  } catch (const Error&) {
    clean_reload = false;
  }
  fs::remove_all(dir);
  return {same && detected == probes && clean_reload,
          std::string("query output ") + (same ? "byte-identical" : "DIFFERENT") + " after reload; " +
              std::to_string(detected) + "/" + std::to_string(probes) + " single-byte corruptions detected"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"01 seed quasi-orthogonality", quasi_orthogonality},
      {"02 noise scaling with dimension", noise_scaling},
      {"03 cosine throughput floor", throughput},
      {"04 semantic vs word-overlap divergence", semantic_vs_overlap},
      {"05 brute-force oracle equivalence", oracle_equivalence},
      {"06 parallel build determinism", parallel_determinism},
      {"07 incremental build", incrementality},
      {"08 sense removal by orthogonalization", disambiguation},
      {"09 summarization contract", summarization},
      {"10 distance formula", distance_formula},
      {"11 persistence round trip", persistence},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "star/analytics.hpp"
#include "star/error.hpp"
#include "star/simeng.hpp"
#include "synthetic.hpp"

namespace star {
namespace {

VectorTable with_copies(const VectorTable& base, std::vector<std::pair<std::size_t, std::string>> copies) {
  VectorTable out = base;
  for (auto& [row, id] : copies) out.append(id, base.row(row));
  return out;
}

void expect_same_merges(const Dendrogram& got, const std::vector<oracle::OracleMerge>& want) {
  ASSERT_EQ(got.merges.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got.merges[i].left, want[i].left) << "merge " << i;
    EXPECT_EQ(got.merges[i].right, want[i].right) << "merge " << i;
    EXPECT_EQ(got.merges[i].size, want[i].size) << "merge " << i;
    EXPECT_NEAR(got.merges[i].similarity, want[i].similarity, 1e-9) << "merge " << i;
  }
}

TEST(HCluster, TwoIdenticalDocuments) {
  auto base = testing::random_unit_table(1, 16, 1);
  auto t = with_copies(base, {{0, "copy"}});
  auto d = hcluster(t);
  ASSERT_EQ(d.merges.size(), 1u);
  EXPECT_NEAR(d.merges[0].similarity, 1.0, 1e-6);
  EXPECT_EQ(d.merges[0].size, 2u);
}

TEST(HCluster, DuplicatesMergeFirstAndAllAtOne) {
  auto base = testing::random_unit_table(6, 32, 2);
  auto t = with_copies(base, {{4, "dup"}});
  auto d = hcluster(t);
  EXPECT_EQ(d.merges[0].left, 4u);
  EXPECT_EQ(d.merges[0].right, 6u);

  auto one = testing::random_unit_table(1, 32, 3);
  auto same = with_copies(one, {{0, "b"}, {0, "c"}, {0, "d"}});
  for (const auto& m : hcluster(same).merges) EXPECT_NEAR(m.similarity, 1.0, 1e-6);
}

TEST(HCluster, MatchesOracleForEveryLinkage) {
  for (auto linkage : {Linkage::Average, Linkage::Complete, Linkage::Single}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto t = testing::random_unit_table(5 + seed * 9, 12, seed, seed);
      expect_same_merges(hcluster(t, linkage, 2), oracle::hcluster(t, linkage));
    }
  }
}

TEST(HCluster, AverageLinkageMonotone) {
  auto t = testing::random_unit_table(60, 8, 9);
  auto d = hcluster(t);
  const std::size_t n = d.leaves.size();
  for (std::size_t i = 0; i < d.merges.size(); ++i)
    for (auto child : {d.merges[i].left, d.merges[i].right})
      if (child >= n) EXPECT_GE(d.merges[child - n].similarity, d.merges[i].similarity - 1e-12);
}

TEST(HCluster, TooFewDocuments) {
  auto t = testing::random_unit_table(1, 8, 1);
  try {
    hcluster(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewDocuments);
  }
  EXPECT_THROW(parse_linkage("ward"), Error);
  EXPECT_EQ(parse_linkage("single"), Linkage::Single);
}

TEST(CutClusters, ThresholdsAndPlantedPairs) {
  auto base = testing::random_unit_table(10, 64, 4);
  auto t = with_copies(base, {{2, "dupA"}, {7, "dupB"}});
  auto d = hcluster(t);

  auto all = cut_clusters(d, -1.0);
  ASSERT_EQ(all.clusters.size(), 1u);
  EXPECT_EQ(all.clusters[0].members.size(), 12u);
  EXPECT_EQ(all.singletons, 0u);

  auto none = cut_clusters(d, 1.5);
  EXPECT_TRUE(none.clusters.empty());
  EXPECT_EQ(none.singletons, 12u);

  auto pairs = cut_clusters(d, 0.95);
  ASSERT_EQ(pairs.clusters.size(), 2u);
  std::set<std::vector<std::size_t>> found;
  for (const auto& c : pairs.clusters) {
    found.insert(c.members);
    EXPECT_NEAR(c.split_at, 1.0, 1e-6);
  }
  EXPECT_EQ(found, (std::set<std::vector<std::size_t>>{{2, 10}, {7, 11}}));
  EXPECT_EQ(pairs.singletons, 8u);
}

TEST(CutTop, GroupCount) {
  auto t = testing::random_unit_table(20, 8, 6);
  auto d = hcluster(t);
  for (std::size_t count : {1u, 3u, 20u}) {
    auto cut = cut_top(d, count);
    EXPECT_EQ(cut.clusters.size() + cut.singletons, count);
    std::set<std::size_t> leaves;
    for (const auto& c : cut.clusters)
      for (auto m : c.members) EXPECT_TRUE(leaves.insert(m).second);
  }
}

class SpaceFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new testing::SynonymCorpus(testing::make_synonym_corpus(20));
    auto docs = tokenize_all(corpus_->training, true);
    space_ = new SemanticSpace(build_space(docs, SpaceConfig{}));
  }
  static void TearDownTestSuite() {
    delete space_;
    delete corpus_;
  }
  static testing::SynonymCorpus* corpus_;
  static SemanticSpace* space_;
};
testing::SynonymCorpus* SpaceFixture::corpus_ = nullptr;
SemanticSpace* SpaceFixture::space_ = nullptr;

TEST_F(SpaceFixture, SummarizeSingleParagraph) {
  auto doc = tokenize_document({"one", std::nullopt, "ctx1x1 ctx1x2 synx1x0. ctx1x4."}, false);
  auto s = summarize(doc, *space_, 6);
  ASSERT_EQ(s.kept, std::vector<std::size_t>{0});
  EXPECT_NEAR(s.scores[0], 1.0, 1e-6);
}

TEST_F(SpaceFixture, SummarizeMatchesOracleAndKeepsOrder) {
  std::vector<std::string> vocab = corpus_->contexts[0];
  vocab.insert(vocab.end(), corpus_->contexts[1].begin(), corpus_->contexts[1].end());
  vocab.push_back("filler");
  auto doc = tokenize_document(testing::make_long_document(vocab, 40, 3), false);
  auto s = summarize(doc, *space_, 6);
  auto o = oracle::summarize(doc, *space_, 6);
  EXPECT_EQ(s.kept, o.kept);
  ASSERT_EQ(s.scores.size(), o.scores.size());
  for (std::size_t i = 0; i < o.scores.size(); ++i) EXPECT_NEAR(s.scores[i], o.scores[i], 1e-9);
  EXPECT_TRUE(std::is_sorted(s.kept.begin(), s.kept.end()));
  EXPECT_EQ(std::adjacent_find(s.kept.begin(), s.kept.end()), s.kept.end());

  // Reordering words inside a dropped paragraph changes nothing.
  auto shuffled = doc;
  for (std::size_t p = 0; p < shuffled.paragraphs.size(); ++p)
    if (!std::binary_search(s.kept.begin(), s.kept.end(), p))
      for (std::size_t i = shuffled.paragraphs[p].begin; i < shuffled.paragraphs[p].end; ++i)
        std::reverse(shuffled.sentences[i].begin(), shuffled.sentences[i].end());
  EXPECT_EQ(summarize(shuffled, *space_, 6).kept, s.kept);
}

TEST_F(SpaceFixture, SummarizeEmptyDocument) {
  auto doc = tokenize_document({"e", std::nullopt, "nothing known here"}, false);
  EXPECT_THROW(summarize(doc, *space_, 6), Error);
}

TEST_F(SpaceFixture, WordUsageFindsUnsharedSynonym) {
  auto a = tokenize_document(corpus_->left[5], false);
  auto b = tokenize_document(corpus_->right[5], false);
  auto table = word_usage_table(a, b, *space_, 0);
  EXPECT_GT(table.semantic_sigma, 0.5);
  ASSERT_TRUE(table.overlap_sigma.has_value());
  EXPECT_EQ(*table.overlap_sigma, 0.0);
  ASSERT_FALSE(table.left.empty());
  for (const auto& row : table.left) EXPECT_FALSE(row.shared);
  EXPECT_GT(table.left[0].sigma, 0.5);

  auto self = word_usage_table(a, a, *space_, 1);
  ASSERT_EQ(self.left.size(), 1u);
  EXPECT_TRUE(self.left[0].shared);
  EXPECT_EQ(self.left[0].count, 2u);
}

TEST(ComparePortfolios, MatchesCrossMatrixExactly) {
  auto a = testing::random_unit_table(30, 6, 10, 0, "a");
  auto b = testing::random_unit_table(25, 6, 11, 0, "b");
  auto report = compare_portfolios(a, b, 0.6, 2);
  auto m = cross_matrix(a, b);
  std::set<std::pair<std::string, std::string>> expected, got;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.at(r, c) >= 0.6) expected.insert({m.row_ids[r], m.col_ids[c]});
  double prev_best = 2.0;
  for (const auto& e : report.entries) {
    EXPECT_LE(e.matches.front().sigma, prev_best);
    prev_best = e.matches.front().sigma;
    for (std::size_t i = 0; i < e.matches.size(); ++i) {
      got.insert({e.id, e.matches[i].id});
      EXPECT_GE(e.matches[i].sigma, 0.6);
      if (i > 0) EXPECT_GE(e.matches[i - 1].sigma, e.matches[i].sigma);
    }
  }
  EXPECT_EQ(got, expected);
}

TEST(ComparePortfolios, SelfMatchesAndEmptyAboveOne) {
  auto a = testing::random_unit_table(15, 32, 12);
  auto report = compare_portfolios(a, a, 0.99);
  ASSERT_EQ(report.entries.size(), 15u);
  for (const auto& e : report.entries) {
    ASSERT_EQ(e.matches.size(), 1u);
    EXPECT_EQ(e.matches[0].id, e.id);
  }
  EXPECT_TRUE(compare_portfolios(a, testing::random_unit_table(5, 32, 13, 0, "z"), 1.0 + 1e-9).entries.empty());
}

}  // namespace
}  // namespace star

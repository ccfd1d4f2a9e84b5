#include "tsekit/synthetic_backend.h"

#include <gtest/gtest.h>

#include <random>

#include "test_util.h"

namespace tsekit {
namespace {

TEST(SyntheticTest, RanksAndPrefixSums) {
  const auto d = rank_distribution(
      "t", {{"are", 0.55}, {"exist", 0.15}, {"exists", 0.25}, {"is", 0.05}},
      "toy", Direction::kBidirectional);
  EXPECT_EQ(d.find("are")->rank, 1u);
  EXPECT_EQ(d.find("are")->cum_before, 0.0);
  EXPECT_EQ(d.find("exists")->rank, 2u);
  EXPECT_EQ(d.find("exists")->cum_before, 0.55);
  EXPECT_EQ(d.find("exist")->rank, 3u);
  EXPECT_EQ(d.find("is")->rank, 4u);
  ASSERT_TRUE(d.top);
  EXPECT_EQ(d.top->front().form, "are");
}

TEST(SyntheticTest, TiesBreakLexicographically) {
  const auto d = rank_distribution(
      "t", {{"d", 0.25}, {"b", 0.25}, {"a", 0.25}, {"c", 0.25}}, "toy",
      Direction::kBidirectional);
  EXPECT_EQ(d.find("a")->rank, 1u);
  EXPECT_EQ(d.find("b")->rank, 2u);
  EXPECT_EQ(d.find("c")->rank, 3u);
  EXPECT_EQ(d.find("d")->rank, 4u);
  EXPECT_EQ(d.find("c")->cum_before, 0.5);
}

TEST(SyntheticTest, ZeroMassTailStaysInsideUnitInterval) {
  // These sum to 1.0000000000000002 in rank order.
  const auto d = rank_distribution("t",
                                   {{"a", 18.0 / 49}, {"b", 14.0 / 49}, {"c", 13.0 / 49},
                                    {"d", 4.0 / 49}, {"z", 0.0}},
                                   "toy", Direction::kBidirectional);
  EXPECT_EQ(d.find("z")->cum_before, 1.0);
  EXPECT_NO_THROW(validate(d));
}

TEST(SyntheticTest, RejectsBadSpecs) {
  EXPECT_THROW(rank_distribution("t", {{"a", 0.5}, {"b", 0.4}}, "m",
                                 Direction::kBidirectional),
               FormatError);
  EXPECT_THROW(rank_distribution("t", {{"a", 0.5}, {"a", 0.5}}, "m",
                                 Direction::kBidirectional),
               FormatError);
  EXPECT_THROW(rank_distribution("t", {{"a", 1.5}, {"b", -0.5}}, "m",
                                 Direction::kBidirectional),
               FormatError);
}

TEST(SyntheticTest, SpecFile) {
  const auto backend = SyntheticBackend::load(test::data_path("toy_synthetic.json"));
  EXPECT_EQ(backend.model_id(), "toy");
  TemplateInstance t;
  t.id = "anything";
  t.prefix = "The dogs ";
  const std::vector<std::string> cands = {"are", "is", "walks"};
  const auto d = backend.query(t, cands);
  EXPECT_EQ(d.template_id, "anything");
  EXPECT_EQ(d.records.size(), 2u);
  EXPECT_DOUBLE_EQ(d.find("is")->cum_before, 0.95);
  EXPECT_EQ(backend.top_k(t, 10).size(), 4u);
  EXPECT_EQ(backend.top_k(t, 2).size(), 2u);
  EXPECT_TRUE(backend.top_k(t, 0).empty());

  EXPECT_THROW(SyntheticBackend::from_json(R"({"templates": {}})"), FormatError);
  EXPECT_THROW(SyntheticBackend::from_json(R"({"default": {"a": 1.0}})"), FormatError);
  const auto no_default = SyntheticBackend::from_json(R"({"templates": {"x": [["a", 1.0]]}})");
  EXPECT_THROW(no_default.query(t, cands), ScoringError);
}

TEST(SyntheticProperty, RankOrderAndPrefixSums) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 1 + rng() % 20;
    const auto w = test::random_simplex(rng, n);
    double total = 0.0;
    for (double x : w) total += x;
    if (std::abs(total - 1.0) > kSyntheticSumTolerance) continue;
    WordProbs probs;
    for (size_t i = 0; i < n; ++i) probs.emplace_back(test::random_word(rng, 3, 6) + std::to_string(i), w[i]);
    const auto d = rank_distribution("t", probs, "m", Direction::kBidirectional);
    std::vector<const TokenProbRecord*> by_rank(n);
    for (const auto& [form, r] : d.records) by_rank.at(r.rank - 1) = &r;
    double cum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (i > 0) {
        ASSERT_GE(by_rank[i - 1]->prob, by_rank[i]->prob);
        if (by_rank[i - 1]->prob == by_rank[i]->prob) {
          ASSERT_LT(by_rank[i - 1]->form, by_rank[i]->form);
        }
      }
      ASSERT_EQ(by_rank[i]->cum_before, std::min(cum, 1.0));
      cum += by_rank[i]->prob;
    }
  }
}

}  // namespace
}  // namespace tsekit

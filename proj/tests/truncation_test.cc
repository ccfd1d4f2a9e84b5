#include "tsekit/truncation.h"

#include <gtest/gtest.h>

#include <random>

#include "test_util.h"
#include "tsekit/synthetic_backend.h"

namespace tsekit {
namespace {

TokenProbRecord rec(double prob, double cum_before) {
  return TokenProbRecord{"x", prob, 1, cum_before};
}

PercentileCutoff top(double p) { return PercentileCutoff(CutoffKind::kTop, p); }
PercentileCutoff bottom(double p) { return PercentileCutoff(CutoffKind::kBottom, p); }

TEST(CutoffTest, Range) {
  EXPECT_THROW(top(0), std::invalid_argument);
  EXPECT_THROW(top(100.5), std::invalid_argument);
  EXPECT_THROW(bottom(-1), std::invalid_argument);
  EXPECT_NO_THROW(bottom(0.0001));
  EXPECT_EQ(top(50).threshold_mass(), 0.5);
  EXPECT_EQ(default_top_grid().back(), 100);
  EXPECT_EQ(default_bottom_grid().size(), 7u);
}

TEST(MembershipTest, HandExamples) {
  EXPECT_DOUBLE_EQ(membership_weight(rec(0.2, 0.4), top(50)), 0.5);
  EXPECT_EQ(membership_weight(rec(0.2, 0.4), top(100)), 1.0);
  EXPECT_EQ(membership_weight(rec(0.0, 0.9), top(100)), 1.0);
  EXPECT_EQ(membership_weight(rec(0.2, 0.5), top(50)), 0.0);
  EXPECT_EQ(membership_weight(rec(0.2, 0.6), top(50)), 0.0);
  EXPECT_EQ(membership_weight(rec(0.2, 0.1), top(50)), 1.0);
  EXPECT_EQ(membership_weight(rec(0.0, 0.1), top(50)), 0.0);
  // Bottom 10: tail region is [0.9, 1].
  EXPECT_EQ(membership_weight(rec(0.05, 0.95), bottom(10)), 1.0);
  EXPECT_DOUBLE_EQ(membership_weight(rec(0.2, 0.8), bottom(10)), 0.5);
  EXPECT_EQ(membership_weight(rec(0.2, 0.1), bottom(10)), 0.0);
  EXPECT_EQ(membership_weight(rec(0.0, 0.1), bottom(10)), 1.0);
}

TEST(MembershipProperty, MonotoneInPAndSumRule) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double cum = u(rng) * 0.95;
    const double prob = std::max(1e-6, u(rng) * (1.0 - cum));
    const auto r = rec(prob, cum);
    double prev_top = 0.0;
    double prev_bottom = 0.0;
    for (int step = 1; step <= 200; ++step) {
      const double p = step * 0.5;
      const double wt = membership_weight(r, top(p));
      const double wb = membership_weight(r, bottom(p));
      ASSERT_GE(wt, 0.0);
      ASSERT_LE(wt, 1.0);
      ASSERT_GE(wt, prev_top - 1e-12);
      ASSERT_GE(wb, prev_bottom - 1e-12);
      prev_top = wt;
      prev_bottom = wb;
      if (p < 100.0) {
        ASSERT_NEAR(wt + membership_weight(r, bottom(100.0 - p)), 1.0, 1e-9)
            << "cum " << cum << " prob " << prob << " p " << p;
      }
    }
  }
}

// A = (walk 0.4 rank 1, walks 0.1), B = (run 0.05, runs 0.2 rank 2), plural.
TemplateDistribution straddle_dist() {
  return rank_distribution("t",
                           {{"walk", 0.4}, {"walks", 0.1}, {"run", 0.05}, {"runs", 0.2},
                            {"zza", 0.05}, {"zzb", 0.05}, {"zzc", 0.05}, {"zzd", 0.05},
                            {"zze", 0.05}},
                           "fixture", Direction::kBidirectional);
}

const Lexicon& walk_run() {
  static const Lexicon lex = parse_lemma_list("walk\nrun\n");
  return lex;
}

TEST(TruncatedScoresTest, StraddleExample) {
  const auto d = straddle_dist();
  const auto s = truncated_scores(d, walk_run(), Number::kPlural, top(50));
  ASSERT_TRUE(s.mw && s.ew);
  EXPECT_NEAR(*s.mw, 0.5 * 1.0 + 0.5 * (0.4 / 0.6), 1e-12);
  EXPECT_NEAR(*s.mw, 0.8333333333333334, 1e-12);
  EXPECT_NEAR(*s.ew, 0.75, 1e-12);
  EXPECT_NEAR(s.mass_counted, 0.5, 1e-12);
  EXPECT_FALSE(s.invalid);
  EXPECT_EQ(s.n_lemmas_used, 2u);

  EXPECT_NEAR(*truncated_scores(d, walk_run(), Number::kPlural, top(45)).mw,
              0.75 + 0.25 * (0.4 / 0.6), 1e-12);
  const auto at60 = truncated_scores(d, walk_run(), Number::kPlural, top(60));
  EXPECT_NEAR(*at60.mw, 0.4 / 0.6, 1e-12);
  EXPECT_NEAR(*at60.ew, 0.5, 1e-12);
  EXPECT_NEAR(*truncated_scores(d, walk_run(), Number::kPlural, top(65)).mw,
              0.5 * (0.4 / 0.6) + 0.5 * (0.4 / 0.7), 1e-12);
}

TEST(TruncatedScoresTest, RequireBothForTopEw) {
  const auto d = straddle_dist();
  const auto s = truncated_scores(d, walk_run(), Number::kPlural, top(50),
                                  TruncationOptions{true});
  EXPECT_FALSE(s.ew);
  EXPECT_EQ(s.ew_reason, ExclusionReason::kNoEligibleLemmas);
  EXPECT_TRUE(s.mw);
}

TEST(TruncatedScoresTest, FullTopEqualsUntruncated) {
  const auto d = straddle_dist();
  const auto s = truncated_scores(d, walk_run(), Number::kPlural, top(100));
  EXPECT_EQ(s.ew, ew_score(d, walk_run(), Number::kPlural).value);
  EXPECT_EQ(s.mw, mw_score(d, walk_run(), Number::kPlural).value);
  EXPECT_EQ(s.straddle_fallbacks, 0u);
}

TEST(TruncatedScoresTest, SmallBottomHasNoEligibleLemma) {
  const auto d = straddle_dist();
  const auto s = truncated_scores(d, walk_run(), Number::kPlural, bottom(1));
  EXPECT_FALSE(s.ew);
  EXPECT_EQ(s.ew_reason, ExclusionReason::kNoEligibleLemmas);
  EXPECT_FALSE(s.mw);
  EXPECT_TRUE(s.invalid);
  EXPECT_EQ(s.mass_counted, 0.0);
}

TEST(TruncatedScoresTest, SharedFormIsOneToken) {
  // "rise" is the plural of rise and, with the exception table, the singular
  // of an invented lemma; both pairs see one straddling token.
  InflectionExceptions ex{{"ris", {"rise", "ris"}}};
  LexiconLoadOptions opts;
  opts.exceptions = ex;
  const Lexicon lex = parse_lemma_list("rise\nris\n", opts);
  const auto d = rank_distribution(
      "t", {{"rise", 0.4}, {"rises", 0.3}, {"ris", 0.2}, {"other", 0.1}}, "m",
      Direction::kBidirectional);
  const auto s = truncated_scores(d, lex, Number::kPlural, top(20));
  // Only "rise" is (half) inside. With it: rise pair correct 0.4, ris pair
  // incorrect 0.4 -> MW 0.5. Without it: empty set.
  ASSERT_TRUE(s.mw);
  EXPECT_NEAR(*s.mw, 0.5, 1e-12);
  EXPECT_GE(s.straddle_fallbacks, 1u);
  EXPECT_NEAR(s.mass_counted, 0.2, 1e-12);
}

TEST(SweepTest, RowsPerCutoff) {
  TemplateInstance t;
  t.id = "t";
  t.construction = "Simple";
  t.number = Number::kPlural;
  std::vector<EvalItem> items{{t, straddle_dist()}};
  const std::vector<PercentileCutoff> cutoffs{top(50), top(100)};
  const auto r = sweep(items, walk_run(), cutoffs);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.reports.size(), 2u);
  size_t n_mw = 0;
  for (const auto& row : r.rows) n_mw += row.metric == Metric::kMw;
  EXPECT_EQ(n_mw, 2u);
  EXPECT_EQ(r.rows[0].metric, Metric::kEw);
  EXPECT_EQ(r.rows[1].metric, Metric::kMw);
  EXPECT_NEAR(*r.rows[1].value, 0.8333333333333334, 1e-12);
  EXPECT_EQ(r.rows[3].value, mw_score(items[0].dist, walk_run(), Number::kPlural).value);
  EXPECT_EQ(r.rows[3].n_templates, 1u);
}

// Correct forms hold the head of the distribution, incorrect forms the tail,
// so widening the nucleus only adds incorrect mass.
TEST(SweepProperty, HeadHeavyFamilyIsNonIncreasingInTopP) {
  std::mt19937_64 rng(37);
  const Lexicon lex = parse_lemma_list("walk\nrun\ntalk\njump\n");
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = test::random_simplex(rng, 8);
    std::vector<double> sorted = w;
    std::sort(sorted.rbegin(), sorted.rend());
    WordProbs probs{{"walk", sorted[0]}, {"run", sorted[1]},   {"talk", sorted[2]},
                    {"jump", sorted[3]}, {"walks", sorted[4]}, {"runs", sorted[5]},
                    {"talks", sorted[6]}, {"jumps", sorted[7]}};
    double total = 0.0;
    for (double x : sorted) total += x;
    if (std::abs(total - 1.0) > kSyntheticSumTolerance || sorted[3] == sorted[4]) continue;
    const auto d = rank_distribution("t", probs, "m", Direction::kBidirectional);
    std::optional<double> prev;
    for (int p = 1; p <= 100; ++p) {
      const auto s = truncated_scores(d, lex, Number::kPlural, top(p));
      if (!s.mw) continue;
      if (prev) ASSERT_LE(*s.mw, *prev + 1e-12) << "p " << p;
      prev = s.mw;
    }
  }
}

}  // namespace
}  // namespace tsekit

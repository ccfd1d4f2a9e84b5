// TSE, EW and MW scores for one template, and their per-construction
// aggregation.
//
//   TSE  1[P(correct | c) > P(incorrect | c)] for one lemma (strict).
//   EW   mean of the TSE indicator over every lemma of the lexicon.
//   MW   sum of correct-form mass / sum of correct + incorrect mass.
//
// A lemma takes part only when both of its forms have a record in the
// distribution; the rest are counted as missing.

#ifndef TSEKIT_METRICS_H_
#define TSEKIT_METRICS_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsekit/backend.h"
#include "tsekit/lexicon.h"
#include "tsekit/templates.h"

namespace tsekit {

enum class ExclusionReason { kNoEligibleLemmas, kZeroMass };

std::string_view to_string(ExclusionReason r);

// Probabilities of one lemma's two forms in a template's distribution.
struct PairMass {
  const InflectionPair* pair = nullptr;
  double correct = 0.0;
  double incorrect = 0.0;
  const TokenProbRecord* correct_record = nullptr;
  const TokenProbRecord* incorrect_record = nullptr;
};

struct PairCollection {
  std::vector<PairMass> pairs;  // same order as the input
  size_t n_missing = 0;
};

PairCollection collect_pairs(const TemplateDistribution& dist,
                             std::span<const InflectionPair> pairs,
                             Number number);

// Mean indicator over the pairs with include[i] set (all when empty).
// nullopt for an empty selection.
std::optional<double> ew_over(std::span<const PairMass> pairs,
                              const std::vector<char>& include = {});

// MW over the selected forms; `with_correct[i]` / `with_incorrect[i]`
// choose which of pair i's forms count (all when empty). nullopt when the
// selected mass is zero.
std::optional<double> mw_over(std::span<const PairMass> pairs,
                              const std::vector<char>& with_correct = {},
                              const std::vector<char>& with_incorrect = {});

// 1 iff the correct form is strictly more probable. Throws ScoringError if
// either form has no record.
int tse_indicator(const TemplateDistribution& dist, const InflectionPair& pair,
                  Number number);

struct MetricResult {
  std::optional<double> value;
  size_t n_used = 0;
  size_t n_missing = 0;
  std::optional<ExclusionReason> excluded_reason;
};

MetricResult ew_score(const TemplateDistribution& dist,
                      std::span<const InflectionPair> pairs, Number number);
MetricResult ew_score(const TemplateDistribution& dist, const Lexicon& lexicon,
                      Number number);
MetricResult mw_score(const TemplateDistribution& dist,
                      std::span<const InflectionPair> pairs, Number number);
MetricResult mw_score(const TemplateDistribution& dist, const Lexicon& lexicon,
                      Number number);
// Mean indicator over the dataset's own lemma set for the template.
MetricResult classic_tse_score(const TemplateDistribution& dist,
                               std::span<const InflectionPair> lemma_set,
                               Number number);

struct TemplateScore {
  std::string template_id;
  std::string construction;
  std::optional<double> tse;
  std::optional<double> ew;
  std::optional<double> mw;
  size_t n_lemmas_used = 0;
  std::optional<ExclusionReason> excluded_reason;

  friend bool operator==(const TemplateScore&, const TemplateScore&) = default;
};

// Inflection pairs for a template's own lemmas: lexicon entries when
// present, otherwise the rule table with `exceptions`.
std::vector<InflectionPair> resolve_lemma_set(
    std::span<const std::string> lemmas, const Lexicon& lexicon,
    const InflectionExceptions& exceptions = {});

// All three metrics for one template. A template with no usable lemma or
// zero inflection mass is excluded and carries no scores.
TemplateScore score_template(const TemplateInstance& t,
                             const TemplateDistribution& dist,
                             const Lexicon& lexicon,
                             std::span<const InflectionPair> classic_set);

enum class Metric { kTse, kEw, kMw };
std::string_view to_string(Metric m);

struct MetricSummary {
  std::optional<double> mean;
  size_t n = 0;
};

struct ScoreRow {
  std::string group;
  MetricSummary tse, ew, mw;
  size_t n_templates = 0;
  size_t n_excluded = 0;
  size_t n_excluded_no_eligible = 0;
  size_t n_excluded_zero_mass = 0;

  const MetricSummary& metric(Metric m) const {
    return m == Metric::kTse ? tse : m == Metric::kEw ? ew : mw;
  }
};

struct ScoreReport {
  std::vector<ScoreRow> rows;
  const ScoreRow* find(std::string_view group) const;
};

// Position of a construction in the standard table layout; unknown labels
// sort after the known ones.
int construction_rank(std::string_view construction);

using Grouping = std::function<std::string(const TemplateScore&)>;
Grouping by_construction();

// Unweighted per-group means over non-excluded templates. Values are summed
// in sorted order, so the result does not depend on input order.
ScoreReport aggregate(std::span<const TemplateScore> scores,
                      const Grouping& grouping = by_construction());

// Order-independent mean: sorts, then sums.
std::optional<double> stable_mean(std::vector<double> values);

}  // namespace tsekit

#endif  // TSEKIT_METRICS_H_

// Percentile-restricted scoring.
//
// A top-p cutoff keeps the nucleus: the highest-ranked tokens whose
// cumulative mass reaches p/100. A bottom-p cutoff keeps the tail tokens
// whose mass, counted from the least probable end, is at most p/100. The
// token that straddles a boundary is partially inside; its membership
// weight is the fraction of its mass on the inside, and scores are linearly
// interpolated between the sets with and without it.

#ifndef TSEKIT_TRUNCATION_H_
#define TSEKIT_TRUNCATION_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsekit/backend.h"
#include "tsekit/lexicon.h"
#include "tsekit/metrics.h"
#include "tsekit/templates.h"

namespace tsekit {

enum class CutoffKind { kTop, kBottom };

std::string_view to_string(CutoffKind k);
std::optional<CutoffKind> parse_cutoff_kind(std::string_view s);

class PercentileCutoff {
 public:
  // Throws std::invalid_argument unless 0 < p <= 100.
  PercentileCutoff(CutoffKind kind, double p);

  CutoffKind kind() const { return kind_; }
  double p() const { return p_; }
  double threshold_mass() const { return p_ / 100.0; }

  friend bool operator==(const PercentileCutoff&,
                         const PercentileCutoff&) = default;

 private:
  CutoffKind kind_;
  double p_;
};

std::vector<double> default_top_grid();     // 10, 20, ..., 90, 95, 97, 100
std::vector<double> default_bottom_grid();  // 50, 10, 1, ..., 0.0001

// Fraction of the token's mass inside the cutoff, in [0, 1].
double membership_weight(const TokenProbRecord& r,
                         const PercentileCutoff& cutoff);

using MembershipWeight = std::map<std::string, double, std::less<>>;

MembershipWeight membership(const TemplateDistribution& dist,
                            const PercentileCutoff& cutoff);

struct TruncationOptions {
  // Top-p EW normally admits a lemma when either form is in the nucleus;
  // set to require both, as bottom-p always does.
  bool top_requires_both = false;
};

struct TruncatedScore {
  std::optional<double> ew;
  std::optional<double> mw;
  std::optional<ExclusionReason> ew_reason;
  std::optional<ExclusionReason> mw_reason;
  // Sum of weight * prob over the forms of participating lemmas.
  double mass_counted = 0.0;
  // No participating form has both positive weight and positive mass.
  bool invalid = false;
  // Interpolation branches that were undefined (empty set) and dropped.
  size_t straddle_fallbacks = 0;
  // Lemmas with positive inclusion weight for EW.
  size_t n_lemmas_used = 0;
  // Lemmas with both forms present in the distribution.
  size_t n_pairs_present = 0;
};

TruncatedScore truncated_scores(const TemplateDistribution& dist,
                                std::span<const InflectionPair> pairs,
                                Number number, const PercentileCutoff& cutoff,
                                const TruncationOptions& options = {});
TruncatedScore truncated_scores(const TemplateDistribution& dist,
                                const Lexicon& lexicon, Number number,
                                const PercentileCutoff& cutoff,
                                const TruncationOptions& options = {});

// Per-template score under a cutoff, with the same exclusion rules as
// score_template: no usable lemma or zero selected mass excludes the whole
// template; a missing EW alone leaves MW standing. TSE is not computed.
TemplateScore truncated_template_score(const TemplateInstance& t,
                                       const TruncatedScore& s);

struct EvalItem {
  TemplateInstance tmpl;
  TemplateDistribution dist;
};

struct CurveRow {
  std::string construction;
  CutoffKind kind = CutoffKind::kTop;
  double p = 100.0;
  Metric metric = Metric::kEw;
  std::optional<double> value;
  double mass_counted = 0.0;        // mean over the group's templates
  double invalid_proportion = 0.0;  // invalid templates / templates
  size_t n_templates = 0;
};

struct SweepResult {
  std::vector<CurveRow> rows;
  // One aggregated report per cutoff, in grid order.
  std::vector<ScoreReport> reports;
  size_t straddle_fallbacks = 0;
};

// Scores every item under every cutoff and aggregates per construction.
// Rows come out cutoff by cutoff, constructions in table order, EW then MW.
SweepResult sweep(std::span<const EvalItem> items, const Lexicon& lexicon,
                  std::span<const PercentileCutoff> cutoffs,
                  const TruncationOptions& options = {});

}  // namespace tsekit

#endif  // TSEKIT_TRUNCATION_H_

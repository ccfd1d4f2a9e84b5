#include "tsekit/metrics.h"

#include <algorithm>
#include <array>
#include <map>

namespace tsekit {

std::string_view to_string(ExclusionReason r) {
  return r == ExclusionReason::kNoEligibleLemmas ? "no_eligible_lemmas"
                                                 : "zero_mass";
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kTse:
      return "TSE";
    case Metric::kEw:
      return "EW";
    case Metric::kMw:
      break;
  }
  return "MW";
}

PairCollection collect_pairs(const TemplateDistribution& dist,
                             std::span<const InflectionPair> pairs,
                             Number number) {
  PairCollection out;
  out.pairs.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto* c = dist.find(p.correct_form(number));
    const auto* i = dist.find(p.incorrect_form(number));
    if (c == nullptr || i == nullptr) {
      ++out.n_missing;
      continue;
    }
    out.pairs.push_back(PairMass{&p, c->prob, i->prob, c, i});
  }
  return out;
}

std::optional<double> ew_over(std::span<const PairMass> pairs,
                              const std::vector<char>& include) {
  size_t n = 0;
  size_t correct = 0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    if (!include.empty() && !include[k]) continue;
    ++n;
    if (pairs[k].correct > pairs[k].incorrect) ++correct;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::optional<double> mw_over(std::span<const PairMass> pairs,
                              const std::vector<char>& with_correct,
                              const std::vector<char>& with_incorrect) {
  double num = 0.0;
  double den = 0.0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const bool c = with_correct.empty() || with_correct[k];
    const bool i = with_incorrect.empty() || with_incorrect[k];
    const double pc = c ? pairs[k].correct : 0.0;
    num += pc;
    den += pc + (i ? pairs[k].incorrect : 0.0);
  }
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

int tse_indicator(const TemplateDistribution& dist, const InflectionPair& pair,
                  Number number) {
  const auto* c = dist.find(pair.correct_form(number));
  const auto* i = dist.find(pair.incorrect_form(number));
  if (c == nullptr || i == nullptr) {
    throw ScoringError("template " + dist.template_id + ": no record for \"" +
                       (c == nullptr ? pair.correct_form(number)
                                     : pair.incorrect_form(number)) +
                       "\"");
  }
  return c->prob > i->prob ? 1 : 0;
}

MetricResult ew_score(const TemplateDistribution& dist,
                      std::span<const InflectionPair> pairs, Number number) {
  auto coll = collect_pairs(dist, pairs, number);
  MetricResult r;
  r.n_used = coll.pairs.size();
  r.n_missing = coll.n_missing;
  r.value = ew_over(coll.pairs);
  if (!r.value) r.excluded_reason = ExclusionReason::kNoEligibleLemmas;
  return r;
}

MetricResult ew_score(const TemplateDistribution& dist, const Lexicon& lexicon,
                      Number number) {
  return ew_score(dist, lexicon.pairs(), number);
}

MetricResult mw_score(const TemplateDistribution& dist,
                      std::span<const InflectionPair> pairs, Number number) {
  auto coll = collect_pairs(dist, pairs, number);
  MetricResult r;
  r.n_used = coll.pairs.size();
  r.n_missing = coll.n_missing;
  if (coll.pairs.empty()) {
    r.excluded_reason = ExclusionReason::kNoEligibleLemmas;
    return r;
  }
  r.value = mw_over(coll.pairs);
  if (!r.value) r.excluded_reason = ExclusionReason::kZeroMass;
  return r;
}

MetricResult mw_score(const TemplateDistribution& dist, const Lexicon& lexicon,
                      Number number) {
  return mw_score(dist, lexicon.pairs(), number);
}

MetricResult classic_tse_score(const TemplateDistribution& dist,
                               std::span<const InflectionPair> lemma_set,
                               Number number) {
  return ew_score(dist, lemma_set, number);
}

std::vector<InflectionPair> resolve_lemma_set(
    std::span<const std::string> lemmas, const Lexicon& lexicon,
    const InflectionExceptions& exceptions) {
  std::vector<InflectionPair> out;
  out.reserve(lemmas.size());
  for (const auto& l : lemmas) {
    if (const auto* p = lexicon.find(l)) {
      out.push_back(*p);
    } else if (Lemma::is_valid(l)) {
      out.push_back(inflect(Lemma(l), exceptions));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.lemma < b.lemma; });
  return out;
}

TemplateScore score_template(const TemplateInstance& t,
                             const TemplateDistribution& dist,
                             const Lexicon& lexicon,
                             std::span<const InflectionPair> classic_set) {
  TemplateScore s;
  s.template_id = t.id;
  s.construction = t.construction;
  const auto coll = collect_pairs(dist, lexicon.pairs(), t.number);
  s.n_lemmas_used = coll.pairs.size();
  if (coll.pairs.empty()) {
    s.excluded_reason = ExclusionReason::kNoEligibleLemmas;
    return s;
  }
  s.mw = mw_over(coll.pairs);
  if (!s.mw) {
    s.excluded_reason = ExclusionReason::kZeroMass;
    return s;
  }
  s.ew = ew_over(coll.pairs);
  s.tse = classic_tse_score(dist, classic_set, t.number).value;
  return s;
}

int construction_rank(std::string_view construction) {
  static constexpr std::array<std::string_view, 10> kOrder = {
      "Simple",
      "In a sentential complement",
      "VP coordination",
      "Across prepositional phrase",
      "Across subject relative clause",
      "Across object relative clause",
      "Across object relative (no that)",
      "In object relative clause",
      "In object relative (no that)",
      "BLiMP",
  };
  for (size_t i = 0; i < kOrder.size(); ++i) {
    if (kOrder[i] == construction) return static_cast<int>(i);
  }
  return static_cast<int>(kOrder.size());
}

Grouping by_construction() {
  return [](const TemplateScore& s) { return s.construction; };
}

const ScoreRow* ScoreReport::find(std::string_view group) const {
  for (const auto& r : rows) {
    if (r.group == group) return &r;
  }
  return nullptr;
}

std::optional<double> stable_mean(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

ScoreReport aggregate(std::span<const TemplateScore> scores,
                      const Grouping& grouping) {
  struct Acc {
    std::vector<double> tse, ew, mw;
    ScoreRow row;
  };
  std::map<std::string, Acc> groups;
  for (const auto& s : scores) {
    auto& acc = groups[grouping(s)];
    ++acc.row.n_templates;
    if (s.excluded_reason) {
      ++acc.row.n_excluded;
      if (*s.excluded_reason == ExclusionReason::kNoEligibleLemmas) {
        ++acc.row.n_excluded_no_eligible;
      } else {
        ++acc.row.n_excluded_zero_mass;
      }
      continue;
    }
    if (s.tse) acc.tse.push_back(*s.tse);
    if (s.ew) acc.ew.push_back(*s.ew);
    if (s.mw) acc.mw.push_back(*s.mw);
  }
  ScoreReport report;
  for (auto& [name, acc] : groups) {
    ScoreRow row = acc.row;
    row.group = name;
    row.tse = {stable_mean(acc.tse), acc.tse.size()};
    row.ew = {stable_mean(acc.ew), acc.ew.size()};
    row.mw = {stable_mean(acc.mw), acc.mw.size()};
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ScoreRow& a, const ScoreRow& b) {
                     return construction_rank(a.group) <
                            construction_rank(b.group);
                   });
  return report;
}

}  // namespace tsekit

#include "tsekit/truncation.h"

#include <algorithm>
#include <stdexcept>

namespace tsekit {
namespace {

// Straddling items beyond this point can only come from inconsistent
// cum_before values; enumeration is 2^k.
constexpr size_t kMaxStraddlers = 16;

// Multilinear interpolation over the straddling items. `eval(mask)` scores
// the set where item j is included iff bit j of mask is set. With a single
// straddler of weight w this is w * S_with + (1 - w) * S_without. Branches
// that are undefined are dropped and the rest renormalized.
template <typename Eval>
std::optional<double> interpolate(const std::vector<double>& weights,
                                  Eval&& eval, size_t& fallbacks) {
  if (weights.empty()) return eval(0u);
  if (weights.size() > kMaxStraddlers) {
    throw ScoringError("too many straddling tokens at one cutoff (" +
                       std::to_string(weights.size()) +
                       "); cum_before values are inconsistent");
  }
  const unsigned n_masks = 1u << weights.size();
  double acc = 0.0;
  double total = 0.0;
  bool dropped = false;
  for (unsigned mask = 0; mask < n_masks; ++mask) {
    double w = 1.0;
    for (size_t j = 0; j < weights.size(); ++j) {
      w *= (mask >> j) & 1u ? weights[j] : 1.0 - weights[j];
    }
    if (w == 0.0) continue;
    std::optional<double> v = eval(mask);
    if (!v) {
      dropped = true;
      continue;
    }
    acc += w * *v;
    total += w;
  }
  if (total == 0.0) return std::nullopt;
  if (dropped) {
    ++fallbacks;
    return acc / total;
  }
  return acc;
}

bool fractional(double w) { return w > 0.0 && w < 1.0; }

}  // namespace

std::string_view to_string(CutoffKind k) {
  return k == CutoffKind::kTop ? "top" : "bottom";
}

std::optional<CutoffKind> parse_cutoff_kind(std::string_view s) {
  if (s == "top") return CutoffKind::kTop;
  if (s == "bottom") return CutoffKind::kBottom;
  return std::nullopt;
}

PercentileCutoff::PercentileCutoff(CutoffKind kind, double p)
    : kind_(kind), p_(p) {
  if (!(p > 0.0 && p <= 100.0)) {
    throw std::invalid_argument("percentile must be in (0, 100], got " +
                                format_double(p));
  }
}

std::vector<double> default_top_grid() {
  return {10, 20, 30, 40, 50, 60, 70, 80, 90, 95, 97, 100};
}

std::vector<double> default_bottom_grid() {
  return {50, 10, 1, 0.1, 0.01, 0.001, 0.0001};
}

double membership_weight(const TokenProbRecord& r,
                         const PercentileCutoff& cutoff) {
  const double t = cutoff.threshold_mass();
  if (t >= 1.0) return 1.0;
  if (cutoff.kind() == CutoffKind::kTop) {
    if (r.prob <= 0.0) return 0.0;
    return std::clamp((t - r.cum_before) / r.prob, 0.0, 1.0);
  }
  if (r.prob <= 0.0) return 1.0;
  return std::clamp(((r.cum_before + r.prob) - (1.0 - t)) / r.prob, 0.0, 1.0);
}

MembershipWeight membership(const TemplateDistribution& dist,
                            const PercentileCutoff& cutoff) {
  MembershipWeight out;
  for (const auto& [form, r] : dist.records) {
    out.emplace(form, membership_weight(r, cutoff));
  }
  return out;
}

TruncatedScore truncated_scores(const TemplateDistribution& dist,
                                std::span<const InflectionPair> pairs,
                                Number number, const PercentileCutoff& cutoff,
                                const TruncationOptions& options) {
  TruncatedScore out;
  const auto coll = collect_pairs(dist, pairs, number);
  const auto& items = coll.pairs;
  out.n_pairs_present = items.size();
  if (items.empty()) {
    out.ew_reason = ExclusionReason::kNoEligibleLemmas;
    out.mw_reason = ExclusionReason::kNoEligibleLemmas;
    out.invalid = true;
    return out;
  }

  const size_t n = items.size();
  std::vector<double> wc(n), wi(n);
  for (size_t k = 0; k < n; ++k) {
    wc[k] = membership_weight(*items[k].correct_record, cutoff);
    wi[k] = membership_weight(*items[k].incorrect_record, cutoff);
  }

  // Distinct forms: weight, mass and straddler slot (or -1).
  struct FormInfo {
    double weight;
    double prob;
    int slot = -1;
  };
  std::map<std::string_view, FormInfo> forms;
  for (size_t k = 0; k < n; ++k) {
    forms.emplace(items[k].correct_record->form,
                  FormInfo{wc[k], items[k].correct});
    forms.emplace(items[k].incorrect_record->form,
                  FormInfo{wi[k], items[k].incorrect});
  }
  out.invalid = true;
  for (const auto& [form, info] : forms) {
    out.mass_counted += info.weight * info.prob;
    if (info.weight > 0.0 && info.prob > 0.0) out.invalid = false;
  }

  // EW: lemma-level inclusion weights.
  const bool need_both =
      cutoff.kind() == CutoffKind::kBottom || options.top_requires_both;
  std::vector<double> lemma_weight(n);
  std::vector<double> ew_straddle_weights;
  std::vector<int> ew_slot(n, -1);
  for (size_t k = 0; k < n; ++k) {
    lemma_weight[k] = need_both ? std::min(wc[k], wi[k]) : std::max(wc[k], wi[k]);
    if (lemma_weight[k] > 0.0) ++out.n_lemmas_used;
    if (fractional(lemma_weight[k])) {
      ew_slot[k] = static_cast<int>(ew_straddle_weights.size());
      ew_straddle_weights.push_back(lemma_weight[k]);
    }
  }
  std::vector<char> include(n);
  out.ew = interpolate(
      ew_straddle_weights,
      [&](unsigned mask) {
        for (size_t k = 0; k < n; ++k) {
          include[k] = lemma_weight[k] >= 1.0 ||
                       (ew_slot[k] >= 0 && ((mask >> ew_slot[k]) & 1u));
        }
        return ew_over(items, include);
      },
      out.straddle_fallbacks);

  // MW: token-level inclusion; a form shared by two lemmas is one token.
  std::vector<double> mw_straddle_weights;
  for (auto& [form, info] : forms) {
    if (fractional(info.weight)) {
      info.slot = static_cast<int>(mw_straddle_weights.size());
      mw_straddle_weights.push_back(info.weight);
    }
  }
  std::vector<char> with_c(n), with_i(n);
  auto inside = [&](const TokenProbRecord* r, double w, unsigned mask) {
    if (w >= 1.0) return true;
    const int slot = forms.at(r->form).slot;
    return slot >= 0 && ((mask >> slot) & 1u);
  };
  out.mw = interpolate(
      mw_straddle_weights,
      [&](unsigned mask) {
        for (size_t k = 0; k < n; ++k) {
          with_c[k] = inside(items[k].correct_record, wc[k], mask);
          with_i[k] = inside(items[k].incorrect_record, wi[k], mask);
        }
        return mw_over(items, with_c, with_i);
      },
      out.straddle_fallbacks);

  if (!out.ew) out.ew_reason = ExclusionReason::kNoEligibleLemmas;
  if (!out.mw) out.mw_reason = ExclusionReason::kZeroMass;
  return out;
}

TruncatedScore truncated_scores(const TemplateDistribution& dist,
                                const Lexicon& lexicon, Number number,
                                const PercentileCutoff& cutoff,
                                const TruncationOptions& options) {
  return truncated_scores(dist, lexicon.pairs(), number, cutoff, options);
}

TemplateScore truncated_template_score(const TemplateInstance& t,
                                       const TruncatedScore& s) {
  TemplateScore out;
  out.template_id = t.id;
  out.construction = t.construction;
  out.n_lemmas_used = s.n_lemmas_used;
  if (s.n_pairs_present == 0) {
    out.excluded_reason = ExclusionReason::kNoEligibleLemmas;
  } else if (!s.mw) {
    out.excluded_reason = ExclusionReason::kZeroMass;
  } else {
    out.mw = s.mw;
    out.ew = s.ew;
  }
  return out;
}

SweepResult sweep(std::span<const EvalItem> items, const Lexicon& lexicon,
                  std::span<const PercentileCutoff> cutoffs,
                  const TruncationOptions& options) {
  SweepResult result;
  for (const auto& cutoff : cutoffs) {
    std::vector<TemplateScore> scores;
    scores.reserve(items.size());
    struct Diag {
      std::vector<double> mass;
      size_t invalid = 0;
    };
    std::map<std::string, Diag> diag;
    for (const auto& item : items) {
      const TruncatedScore s = truncated_scores(item.dist, lexicon,
                                                item.tmpl.number, cutoff, options);
      result.straddle_fallbacks += s.straddle_fallbacks;
      scores.push_back(truncated_template_score(item.tmpl, s));
      auto& d = diag[item.tmpl.construction];
      d.mass.push_back(s.mass_counted);
      if (s.invalid) ++d.invalid;
    }
    ScoreReport report = aggregate(scores);
    for (const auto& row : report.rows) {
      const auto& d = diag.at(row.group);
      const double mass = stable_mean(d.mass).value_or(0.0);
      const double invalid = static_cast<double>(d.invalid) /
                             static_cast<double>(row.n_templates);
      for (Metric m : {Metric::kEw, Metric::kMw}) {
        result.rows.push_back(CurveRow{row.group, cutoff.kind(), cutoff.p(), m,
                                       row.metric(m).mean, mass, invalid,
                                       row.n_templates});
      }
    }
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace tsekit

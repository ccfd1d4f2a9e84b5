#include "tsekit/backend.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace tsekit {
namespace {

[[noreturn]] void fail(const TemplateDistribution& dist, std::string_view form,
                       std::string_view field, std::string_view what) {
  throw ScoringError("template " + dist.template_id + ": record \"" +
                     std::string(form) + "\" field " + std::string(field) +
                     ": " + std::string(what));
}

}  // namespace

void validate(const TemplateDistribution& dist) {
  std::vector<const TokenProbRecord*> by_rank;
  by_rank.reserve(dist.records.size());
  for (const auto& [form, r] : dist.records) {
    if (form != r.form) fail(dist, form, "form", "key mismatch");
    if (!std::isfinite(r.prob) || r.prob < 0.0 || r.prob > 1.0) {
      fail(dist, form, "prob", "outside [0,1]: " + format_double(r.prob));
    }
    if (!std::isfinite(r.cum_before) || r.cum_before < 0.0 ||
        r.cum_before > 1.0) {
      fail(dist, form, "cum_before",
           "outside [0,1]: " + format_double(r.cum_before));
    }
    if (r.cum_before + r.prob > 1.0 + kMassTolerance) {
      fail(dist, form, "cum_before", "cum_before + prob exceeds 1");
    }
    if (r.rank == 0) fail(dist, form, "rank", "ranks are 1-based");
    by_rank.push_back(&r);
  }
  std::sort(by_rank.begin(), by_rank.end(),
            [](const auto* a, const auto* b) { return a->rank < b->rank; });
  for (size_t i = 1; i < by_rank.size(); ++i) {
    const auto& prev = *by_rank[i - 1];
    const auto& cur = *by_rank[i];
    if (prev.rank == cur.rank) fail(dist, cur.form, "rank", "duplicate rank");
    if (cur.cum_before < prev.cum_before) {
      fail(dist, cur.form, "cum_before", "decreases with rank");
    }
  }
  if (dist.top) {
    for (size_t i = 0; i < dist.top->size(); ++i) {
      const auto& t = (*dist.top)[i];
      if (!std::isfinite(t.prob) || t.prob < 0.0 || t.prob > 1.0) {
        fail(dist, t.form, "top.prob", "outside [0,1]");
      }
      if (i > 0 && t.prob > (*dist.top)[i - 1].prob) {
        fail(dist, t.form, "top", "not in descending order");
      }
    }
  }
}

TemplateDistribution restrict_to(const TemplateDistribution& dist,
                                 std::span<const std::string> candidates) {
  TemplateDistribution out;
  out.template_id = dist.template_id;
  out.model_id = dist.model_id;
  out.direction = dist.direction;
  out.top = dist.top;
  for (const auto& c : candidates) {
    if (const auto* r = dist.find(c)) out.records.emplace(c, *r);
  }
  return out;
}

}  // namespace tsekit

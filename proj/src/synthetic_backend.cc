#include "tsekit/synthetic_backend.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace tsekit {
namespace {

WordProbs parse_word_probs(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected [[form, prob], ...]");
  WordProbs out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number()) {
      throw FormatError(where + ": expected [form, prob] entries");
    }
    out.emplace_back(e[0].get<std::string>(), e[1].get<double>());
  }
  return out;
}

}  // namespace

TemplateDistribution rank_distribution(std::string template_id,
                                       const WordProbs& probs,
                                       std::string model_id,
                                       Direction direction) {
  const std::string where = "synthetic distribution " + template_id;
  std::set<std::string_view> seen;
  for (const auto& [form, p] : probs) {
    if (!seen.insert(form).second) {
      throw FormatError(where + ": duplicate form \"" + form + "\"");
    }
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw FormatError(where + ": probability of \"" + form +
                        "\" outside [0,1]");
    }
  }
  std::vector<const std::pair<std::string, double>*> order;
  for (const auto& e : probs) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->second != b->second ? a->second > b->second : a->first < b->first;
  });

  TemplateDistribution d;
  d.template_id = std::move(template_id);
  d.model_id = std::move(model_id);
  d.direction = direction;
  d.top.emplace();
  double cum = 0.0;
  std::uint64_t rank = 0;
  for (const auto* e : order) {
    // The running sum can overshoot 1 by an ulp ahead of zero-mass tokens.
    d.records.emplace(e->first,
                      TokenProbRecord{e->first, e->second, ++rank, std::min(cum, 1.0)});
    d.top->push_back(TopToken{e->first, e->second});
    cum += e->second;
  }
  if (std::abs(cum - 1.0) > kSyntheticSumTolerance) {
    throw FormatError(where + ": probabilities sum to " + format_double(cum) +
                      ", expected 1");
  }
  validate(d);
  return d;
}

SyntheticBackend::SyntheticBackend(std::string model_id, Direction direction,
                                   std::map<std::string, WordProbs> templates,
                                   std::optional<WordProbs> fallback)
    : model_id_(std::move(model_id)), direction_(direction) {
  for (auto& [id, probs] : templates) {
    by_id_.emplace(id, rank_distribution(id, probs, model_id_, direction_));
  }
  if (fallback) {
    fallback_ = rank_distribution("default", *fallback, model_id_, direction_);
  }
}

SyntheticBackend SyntheticBackend::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("synthetic spec: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("synthetic spec: expected an object");
  const std::string model_id = j.value("model_id", "synthetic");
  auto direction = parse_direction(j.value("direction", "bidirectional"));
  if (!direction) throw FormatError("synthetic spec: bad direction");
  std::map<std::string, WordProbs> templates;
  if (auto it = j.find("templates"); it != j.end()) {
    if (!it->is_object()) throw FormatError("synthetic spec: templates must be an object");
    for (const auto& [id, probs] : it->items()) {
      templates.emplace(id, parse_word_probs(probs, "synthetic spec template " + id));
    }
  }
  std::optional<WordProbs> fallback;
  if (auto it = j.find("default"); it != j.end()) {
    fallback = parse_word_probs(*it, "synthetic spec default");
  }
  if (templates.empty() && !fallback) {
    throw FormatError("synthetic spec: no distributions");
  }
  return SyntheticBackend(model_id, *direction, std::move(templates),
                          std::move(fallback));
}

SyntheticBackend SyntheticBackend::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

const TemplateDistribution& SyntheticBackend::full(
    const std::string& template_id) const {
  if (auto it = by_id_.find(template_id); it != by_id_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw ScoringError("synthetic backend has no distribution for template " +
                     template_id);
}

TemplateDistribution SyntheticBackend::query(
    const TemplateInstance& t, std::span<const std::string> candidates) const {
  TemplateDistribution d = restrict_to(full(t.id), candidates);
  d.template_id = t.id;
  d.top.reset();
  return d;
}

std::vector<TopToken> SyntheticBackend::top_k(const TemplateInstance& t,
                                              size_t k) const {
  const auto& top = *full(t.id).top;
  return {top.begin(), top.begin() + std::min(k, top.size())};
}

}  // namespace tsekit

// Backend over explicit, hand-written distributions.
//
// Spec file (JSON):
//   {"model_id": "toy", "direction": "bidirectional",
//    "templates": {"<template id>": [["are", 0.55], ["is", 0.05], ...]},
//    "default": [["are", 0.55], ...]}
// Each distribution covers the whole (small) vocabulary and must sum to 1
// within 1e-12. "default" serves template ids not listed under
// "templates"; both keys are optional but at least one must be present.

#ifndef TSEKIT_SYNTHETIC_BACKEND_H_
#define TSEKIT_SYNTHETIC_BACKEND_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsekit/backend.h"

namespace tsekit {

inline constexpr double kSyntheticSumTolerance = 1e-12;

using WordProbs = std::vector<std::pair<std::string, double>>;

// Ranks tokens by descending probability, ties by ascending form, and
// fills cum_before with the running prefix sum. Throws FormatError on
// duplicate forms, probabilities outside [0,1], or a total away from 1.
TemplateDistribution rank_distribution(std::string template_id,
                                       const WordProbs& probs,
                                       std::string model_id = "synthetic",
                                       Direction direction =
                                           Direction::kBidirectional);

class SyntheticBackend : public Backend {
 public:
  SyntheticBackend(std::string model_id, Direction direction,
                   std::map<std::string, WordProbs> templates,
                   std::optional<WordProbs> fallback = std::nullopt);

  static SyntheticBackend from_json(std::string_view text);
  static SyntheticBackend load(const std::filesystem::path& path);

  TemplateDistribution query(
      const TemplateInstance& t,
      std::span<const std::string> candidates) const override;
  std::vector<TopToken> top_k(const TemplateInstance& t,
                              size_t k) const override;
  std::string model_id() const override { return model_id_; }
  Direction direction() const override { return direction_; }

  // The full ranked distribution for `template_id`.
  const TemplateDistribution& full(const std::string& template_id) const;

 private:
  std::string model_id_;
  Direction direction_;
  std::map<std::string, TemplateDistribution, std::less<>> by_id_;
  std::optional<TemplateDistribution> fallback_;
};

}  // namespace tsekit

#endif  // TSEKIT_SYNTHETIC_BACKEND_H_

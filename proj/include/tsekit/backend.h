// Probability records at the verb slot and the backend contract that
// produces them.

#ifndef TSEKIT_BACKEND_H_
#define TSEKIT_BACKEND_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsekit/common.h"
#include "tsekit/templates.h"

namespace tsekit {

// One candidate token's probability in the model's full distribution.
// `rank` is 1-based in the descending order (ties broken by form), and
// `cum_before` is the total mass of all strictly higher-ranked tokens.
struct TokenProbRecord {
  std::string form;
  double prob = 0.0;
  std::uint64_t rank = 0;
  double cum_before = 0.0;

  friend bool operator==(const TokenProbRecord&,
                         const TokenProbRecord&) = default;
};

struct TopToken {
  std::string form;
  double prob = 0.0;

  friend bool operator==(const TopToken&, const TopToken&) = default;
};

struct TemplateDistribution {
  std::string template_id;
  std::map<std::string, TokenProbRecord, std::less<>> records;
  std::string model_id;
  Direction direction = Direction::kBidirectional;
  // Highest-probability tokens of the full vocabulary, descending. Optional
  // in dumps; needed only by `topk`.
  std::optional<std::vector<TopToken>> top;

  const TokenProbRecord* find(std::string_view form) const {
    auto it = records.find(form);
    return it == records.end() ? nullptr : &it->second;
  }

  friend bool operator==(const TemplateDistribution&,
                         const TemplateDistribution&) = default;
};

// Slack allowed on cum_before + prob <= 1.
inline constexpr double kMassTolerance = 1e-9;

// Checks every record invariant; throws ScoringError naming the template id
// and the offending field.
void validate(const TemplateDistribution& dist);

// Keeps only the records for `candidates`.
TemplateDistribution restrict_to(const TemplateDistribution& dist,
                                 std::span<const std::string> candidates);

class Backend {
 public:
  virtual ~Backend() = default;

  // Records for `candidates` at the slot of `t`. Must be deterministic and
  // safe to call concurrently.
  virtual TemplateDistribution query(
      const TemplateInstance& t,
      std::span<const std::string> candidates) const = 0;

  // The k most probable tokens, descending. Throws ScoringError with
  // "unsupported by backend" when the backend cannot answer.
  virtual std::vector<TopToken> top_k(const TemplateInstance& t,
                                      size_t k) const = 0;

  virtual std::string model_id() const = 0;
  virtual Direction direction() const = 0;
};

}  // namespace tsekit

#endif  // TSEKIT_BACKEND_H_

// Remote scoring server client.
//
// POST <path> with
//   {"template_id": .., "prefix": .., "suffix": .., "direction": ..,
//    "candidates": [form, ...]}
// The response body mirrors a dump record line:
//   {"records": [{"form", "prob", "rank", "cum_before"}, ...], ...}
// See docs/http.md.

#ifndef TSEKIT_HTTP_BACKEND_H_
#define TSEKIT_HTTP_BACKEND_H_

#include <chrono>
#include <span>
#include <string>

#include "tsekit/backend.h"

namespace tsekit {

// Environment variable holding the bearer token sent to the server.
inline constexpr const char* kApiTokenEnv = "TSEKIT_API_TOKEN";

struct HttpEndpoint {
  std::string base_url;  // scheme://host:port
  std::string path = "/score";
  std::string token;     // sent as "Authorization: Bearer <token>" if set
  std::string model_id = "remote";
  Direction direction = Direction::kBidirectional;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{200};
  std::chrono::seconds timeout{60};
};

// Connection errors, 5xx and 429 are retried with exponential backoff
// (base, 2*base, 4*base, ...) up to `max_retries` times. Throws
// ScoringError on other statuses, exhausted retries, schema violations and
// responses missing a candidate ("incomplete distribution").
TemplateDistribution http_query(const HttpEndpoint& endpoint,
                                const TemplateInstance& t,
                                std::span<const std::string> candidates);

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  TemplateDistribution query(
      const TemplateInstance& t,
      std::span<const std::string> candidates) const override {
    return http_query(endpoint_, t, candidates);
  }
  std::vector<TopToken> top_k(const TemplateInstance& t,
                              size_t k) const override;
  std::string model_id() const override { return endpoint_.model_id; }
  Direction direction() const override { return endpoint_.direction; }

 private:
  HttpEndpoint endpoint_;
};

}  // namespace tsekit

#endif  // TSEKIT_HTTP_BACKEND_H_

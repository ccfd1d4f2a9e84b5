#include "tsekit/http_backend.h"

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tsekit/dump.h"

namespace tsekit {
namespace {

bool is_transient(int status) { return status == 429 || status >= 500; }

}  // namespace

TemplateDistribution http_query(const HttpEndpoint& endpoint,
                                const TemplateInstance& t,
                                std::span<const std::string> candidates) {
  nlohmann::json request;
  request["template_id"] = t.id;
  request["prefix"] = t.prefix;
  request["suffix"] = t.suffix;
  request["direction"] = to_string(endpoint.direction);
  request["candidates"] = std::vector<std::string>(candidates.begin(), candidates.end());
  const std::string body = request.dump();

  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(endpoint.timeout);
  client.set_read_timeout(endpoint.timeout);
  client.set_write_timeout(endpoint.timeout);
  httplib::Headers headers;
  if (!endpoint.token.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.token);
  }

  std::string last_error;
  std::string response_body;
  bool ok = false;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(endpoint.backoff_base * (1 << (attempt - 1)));
    }
    auto res = client.Post(endpoint.path, headers, body, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      response_body = res->body;
      ok = true;
      break;
    }
    last_error = "HTTP status " + std::to_string(res->status);
    if (!is_transient(res->status)) break;
  }
  if (!ok) {
    throw ScoringError("template " + t.id + ": " + endpoint.base_url +
                       endpoint.path + " failed: " + last_error);
  }

  TemplateDistribution dist;
  try {
    nlohmann::json j = nlohmann::json::parse(response_body);
    if (!j.is_object()) throw FormatError("response is not an object");
    if (!j.contains("template_id")) j["template_id"] = t.id;
    DumpHeader header;
    header.model_id = endpoint.model_id;
    header.direction = endpoint.direction;
    dist = parse_dump_record(j.dump(), header);
  } catch (const nlohmann::json::exception& e) {
    throw ScoringError("template " + t.id + ": schema violation: " + e.what());
  } catch (const FormatError& e) {
    throw ScoringError("template " + t.id + ": schema violation: " + e.what());
  }
  if (dist.template_id != t.id) {
    throw ScoringError("template " + t.id + ": response is for template " +
                       dist.template_id);
  }
  for (const auto& c : candidates) {
    if (dist.find(c) == nullptr) {
      throw ScoringError("template " + t.id +
                         ": incomplete distribution, missing candidate \"" + c +
                         "\"");
    }
  }
  TemplateDistribution out = restrict_to(dist, candidates);
  out.top.reset();
  return out;
}

std::vector<TopToken> HttpBackend::top_k(const TemplateInstance&, size_t) const {
  throw ScoringError("top-k unsupported by backend: http");
}

}  // namespace tsekit

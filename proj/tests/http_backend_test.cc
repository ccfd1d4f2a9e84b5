#include "tsekit/http_backend.h"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "test_util.h"
#include "tsekit/dump.h"
#include "tsekit/templates.h"

namespace tsekit {
namespace {

class MockScorer {
 public:
  MockScorer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockScorer() {
    server_.stop();
    thread_.join();
  }

  httplib::Server& server() { return server_; }

  HttpEndpoint endpoint() const {
    HttpEndpoint ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port_);
    ep.model_id = "mock";
    ep.backoff_base = std::chrono::milliseconds(1);
    ep.timeout = std::chrono::seconds(5);
    return ep;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

struct Fixture {
  TemplateInstance tmpl;
  TemplateDistribution dist;
  std::string record_json;
};

Fixture table3() {
  Fixture f;
  f.tmpl = load_templates(test::data_path("table3_templates.jsonl")).templates[0];
  const Dump dump = read_dump(test::data_path("table3.dump"));
  f.dist = dump.distributions[0];
  f.dist.top.reset();
  f.record_json = serialize_dump_record(f.dist);
  return f;
}

std::vector<std::string> forms_of(const TemplateDistribution& d) {
  std::vector<std::string> out;
  for (const auto& [form, r] : d.records) out.push_back(form);
  return out;
}

TEST(HttpBackendTest, ReturnsFixtureDistribution) {
  const Fixture f = table3();
  MockScorer mock;
  nlohmann::json seen;
  std::string auth;
  mock.server().Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(f.record_json, "application/json");
  });
  HttpEndpoint ep = mock.endpoint();
  ep.token = "secret";
  const auto cands = forms_of(f.dist);
  const auto d = http_query(ep, f.tmpl, cands);
  EXPECT_EQ(d.template_id, f.tmpl.id);
  EXPECT_EQ(d.records, f.dist.records);
  EXPECT_EQ(d.model_id, "mock");
  EXPECT_EQ(seen["template_id"], f.tmpl.id);
  EXPECT_EQ(seen["prefix"], f.tmpl.prefix);
  EXPECT_EQ(seen["suffix"], f.tmpl.suffix);
  EXPECT_EQ(seen["direction"], "bidirectional");
  EXPECT_EQ(seen["candidates"].size(), cands.size());
  EXPECT_EQ(auth, "Bearer secret");
}

TEST(HttpBackendTest, OmittedCandidateIsIncomplete) {
  const Fixture f = table3();
  MockScorer mock;
  mock.server().Post("/score", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(f.record_json, "application/json");
  });
  auto cands = forms_of(f.dist);
  cands.push_back("greets");
  try {
    http_query(mock.endpoint(), f.tmpl, cands);
    FAIL() << "expected ScoringError";
  } catch (const ScoringError& e) {
    EXPECT_NE(std::string(e.what()).find("incomplete distribution"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("greets"), std::string::npos);
  }
}

TEST(HttpBackendTest, RetriesAfterServerError) {
  const Fixture f = table3();
  MockScorer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/score", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 500;
      return;
    }
    res.set_content(f.record_json, "application/json");
  });
  const auto d = http_query(mock.endpoint(), f.tmpl, forms_of(f.dist));
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(d.records, f.dist.records);
}

TEST(HttpBackendTest, GivesUpAfterMaxRetries) {
  const Fixture f = table3();
  MockScorer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/score", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 503;
  });
  EXPECT_THROW(http_query(mock.endpoint(), f.tmpl, forms_of(f.dist)), ScoringError);
  EXPECT_EQ(calls.load(), 6);
}

TEST(HttpBackendTest, ClientErrorIsNotRetried) {
  const Fixture f = table3();
  MockScorer mock;
  std::atomic<int> calls{0};
  mock.server().Post("/score", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  EXPECT_THROW(http_query(mock.endpoint(), f.tmpl, forms_of(f.dist)), ScoringError);
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpBackendTest, SchemaViolation) {
  const Fixture f = table3();
  MockScorer mock;
  mock.server().Post("/score", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"records": [{"form": "meets", "prob": 2.0, "rank": 1, "cum_before": 0}]})",
                    "application/json");
  });
  try {
    http_query(mock.endpoint(), f.tmpl, std::vector<std::string>{"meets"});
    FAIL() << "expected ScoringError";
  } catch (const ScoringError& e) {
    EXPECT_NE(std::string(e.what()).find("schema violation"), std::string::npos);
  }
}

TEST(HttpBackendTest, TopKUnsupported) {
  HttpBackend backend(HttpEndpoint{});
  EXPECT_THROW(backend.top_k(TemplateInstance{}, 3), ScoringError);
}

}  // namespace
}  // namespace tsekit

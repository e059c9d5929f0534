#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/llm.hpp"
#include "tempdir.hpp"

using namespace errsynth;
using nlohmann::json;

namespace {

// Local chat/completions stand-in. Each request pops the next scripted
// status; 200 replies carry `content`.
class MockServer {
 public:
  MockServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int status = 200;
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(req.body);
        auths_.push_back(req.get_header_value("Authorization"));
        if (!statuses_.empty()) {
          status = statuses_.front();
          statuses_.erase(statuses_.begin());
        }
      }
      int now = ++in_flight_;
      int seen = peak_.load();
      while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
      }
      if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
      --in_flight_;
      res.status = status;
      if (status == 200) {
        if (malformed_) {
          res.set_content("{\"choices\": []}", "application/json");
        } else {
          json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "reply text"}}}}}}};
          res.set_content(body.dump(), "application/json");
        }
      } else {
        res.set_content("{\"error\": \"scripted\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  void script(std::vector<int> statuses) { statuses_ = std::move(statuses); }
  void set_delay(int ms) { delay_ms_ = ms; }
  void set_malformed(bool m) { malformed_ = m; }
  std::vector<std::string> bodies() {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  std::vector<std::string> auths() {
    std::lock_guard lock(mu_);
    return auths_;
  }
  int peak() const { return peak_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<int> statuses_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auths_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  int delay_ms_ = 0;
  bool malformed_ = false;
};

HttpLlmConfig config_for(const MockServer& s) {
  setenv("ERRSYNTH_TEST_KEY", "sk-test", 1);
  HttpLlmConfig c;
  c.endpoint = s.endpoint();
  c.model = "mock-model";
  c.api_key_env = "ERRSYNTH_TEST_KEY";
  c.backoff_initial_ms = 5;
  c.max_retries = 3;
  c.timeout_seconds = 5;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IOError;
}

}  // namespace

TEST_CASE("request shape and credential") {
  MockServer s;
  HttpLlmClient client(config_for(s));
  CHECK(client.complete({"sys prompt", "user text", 0.3}) == "reply text");
  CHECK(client.complete({"", "only user", 0.3}) == "reply text");
  auto bodies = s.bodies();
  REQUIRE(bodies.size() == 2);
  auto first = json::parse(bodies[0]);
  CHECK(first["model"] == "mock-model");
  REQUIRE(first["messages"].size() == 2);
  CHECK(first["messages"][0]["role"] == "system");
  CHECK(first["messages"][1]["content"] == "user text");
  CHECK(first["temperature"].get<double>() == doctest::Approx(0.3));
  auto second = json::parse(bodies[1]);
  REQUIRE(second["messages"].size() == 1);
  CHECK(second["messages"][0]["role"] == "user");
  for (const auto& a : s.auths()) CHECK(a == "Bearer sk-test");
}

TEST_CASE("retries 429 and 5xx then succeeds") {
  MockServer s;
  s.script({500, 429, 503});
  HttpLlmClient client(config_for(s));
  CHECK(client.complete({"", "x", 0.7}) == "reply text");
  CHECK(client.attempts() == 4);
}

TEST_CASE("gives up after the retry budget") {
  MockServer s;
  s.script({500, 500, 500, 500, 500});
  HttpLlmClient client(config_for(s));
  CHECK(code_of([&] { client.complete({"", "x", 0.7}); }) == ErrorCode::BackendUnavailable);
  CHECK(client.attempts() == 4);
}

TEST_CASE("client errors are not retried") {
  MockServer s;
  s.script({400});
  HttpLlmClient client(config_for(s));
  CHECK(code_of([&] { client.complete({"", "x", 0.7}); }) == ErrorCode::BackendUnavailable);
  CHECK(client.attempts() == 1);
}

TEST_CASE("malformed body") {
  MockServer s;
  s.set_malformed(true);
  HttpLlmClient client(config_for(s));
  CHECK(code_of([&] { client.complete({"", "x", 0.7}); }) == ErrorCode::UnparseableResponse);
}

TEST_CASE("unreachable endpoint is a backend error") {
  setenv("ERRSYNTH_TEST_KEY", "sk-test", 1);
  HttpLlmConfig c;
  {
    MockServer s;
    c = config_for(s);
  }
  c.max_retries = 1;
  HttpLlmClient client(c);
  CHECK(code_of([&] { client.complete({"", "x", 0.7}); }) == ErrorCode::BackendUnavailable);
  CHECK(client.attempts() == 2);
}

TEST_CASE("configuration errors") {
  MockServer s;
  auto c = config_for(s);
  auto bad = c;
  bad.endpoint = "ftp://nowhere";
  CHECK(code_of([&] { HttpLlmClient x(bad); }) == ErrorCode::ConfigError);
  bad = c;
  bad.model.clear();
  CHECK(code_of([&] { HttpLlmClient x(bad); }) == ErrorCode::ConfigError);
  bad = c;
  bad.api_key_env = "ERRSYNTH_SURELY_UNSET_VARIABLE";
  unsetenv("ERRSYNTH_SURELY_UNSET_VARIABLE");
  CHECK(code_of([&] { HttpLlmClient x(bad); }) == ErrorCode::ConfigError);

  auto round = HttpLlmConfig::from_json(c.to_json());
  CHECK(round.endpoint == c.endpoint);
  CHECK(round.backoff_initial_ms == c.backoff_initial_ms);
}

TEST_CASE("concurrency cap holds") {
  MockServer s;
  s.set_delay(40);
  auto c = config_for(s);
  c.max_concurrency = 2;
  HttpLlmClient client(c);
  std::vector<std::thread> threads;
  for (int k = 0; k < 6; ++k) threads.emplace_back([&] { client.complete({"", "x", 0.7}); });
  for (auto& t : threads) t.join();
  CHECK(client.throttle().peak_in_flight() == 2);
  CHECK(s.peak() <= 2);
  CHECK(client.throttle().in_flight() == 0);
}

TEST_CASE("rate pacing") {
  Throttle t(8, 50.0);
  auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < 60; ++k) t.acquire();
  auto elapsed = std::chrono::steady_clock::now() - start;
  // the bucket starts with at most one second of tokens
  CHECK(elapsed >= std::chrono::milliseconds(150));
}

TEST_CASE("audit log appends one line per entry") {
  testsupport::TempDir dir;
  auto path = dir.path() / "logs" / "audit.jsonl";
  {
    AuditLog log(path);
    log.record({{"n", 1}});
    log.record({{"n", 2}});
  }
  {
    AuditLog log(path);
    log.record({{"n", 3}});
  }
  auto lines = testsupport::read_lines(path);
  REQUIRE(lines.size() == 3);
  CHECK(json::parse(lines[2])["n"] == 3);
}

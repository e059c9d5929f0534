#include "errsynth/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

#include "errsynth/error.hpp"

namespace errsynth {

using nlohmann::json;

Throttle::Throttle(std::size_t max_concurrency, double requests_per_second)
    : slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, max_concurrency))),
      rate_(requests_per_second),
      capacity_(std::max(1.0, requests_per_second)),
      tokens_(std::max(1.0, requests_per_second)),
      last_(std::chrono::steady_clock::now()) {}

Throttle::Permit::~Permit() {
  if (t_) t_->release();
}

void Throttle::take_token() {
  if (rate_ <= 0.0) return;
  for (;;) {
    std::chrono::duration<double> wait{0.0};
    {
      std::lock_guard lock(mu_);
      auto now = std::chrono::steady_clock::now();
      double elapsed = std::chrono::duration<double>(now - last_).count();
      last_ = now;
      tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    }
    std::this_thread::sleep_for(wait);
  }
}

Throttle::Permit Throttle::acquire() {
  slots_.acquire();
  take_token();
  std::lock_guard lock(mu_);
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
  return Permit(this);
}

void Throttle::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  slots_.release();
}

std::size_t Throttle::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

std::size_t Throttle::peak_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

json HttpLlmConfig::to_json() const {
  return {{"endpoint", endpoint},
          {"model", model},
          {"api_key_env", api_key_env},
          {"temperature", temperature},
          {"timeout_seconds", timeout_seconds},
          {"max_retries", max_retries},
          {"backoff_initial_ms", backoff_initial_ms},
          {"max_concurrency", max_concurrency},
          {"requests_per_second", requests_per_second}};
}

HttpLlmConfig HttpLlmConfig::from_json(const json& j) {
  HttpLlmConfig c;
  try {
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.temperature = j.value("temperature", c.temperature);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.backoff_initial_ms = j.value("backoff_initial_ms", c.backoff_initial_ms);
    c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
    c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("llm settings: ") + e.what());
  }
  if (c.max_retries < 0 || c.timeout_seconds <= 0 || c.max_concurrency == 0) {
    throw Error(ErrorCode::ConfigError, "llm settings out of range");
  }
  return c;
}

HttpLlmClient::HttpLlmClient(HttpLlmConfig config)
    : config_(std::move(config)), throttle_(config_.max_concurrency, config_.requests_per_second) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw Error(ErrorCode::ConfigError, "llm endpoint must be an http(s) URL: '" + config_.endpoint + "'");
  }
  base_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
  if (config_.model.empty()) throw Error(ErrorCode::ConfigError, "llm model name is empty");
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::ConfigError, "credential variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
}

std::string HttpLlmClient::complete(const ChatRequest& request) {
  auto permit = throttle_.acquire();
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  json body = {{"model", config_.model}, {"temperature", request.temperature}, {"n", 1}, {"messages", messages}};
  const std::string payload = body.dump();
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(
          static_cast<long long>(config_.backoff_initial_ms * std::pow(2.0, attempt - 1)));
      std::this_thread::sleep_for(delay);
    }
    ++attempts_;
    httplib::Client cli(base_);
    cli.set_connection_timeout(config_.timeout_seconds, 0);
    cli.set_read_timeout(config_.timeout_seconds, 0);
    cli.set_write_timeout(config_.timeout_seconds, 0);
    auto res = cli.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::BackendUnavailable,
                  "HTTP " + std::to_string(res->status) + " from " + base_ + path_ + ": " + res->body.substr(0, 200));
    }
    try {
      json j = json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::UnparseableResponse, std::string("malformed completion body: ") + e.what());
    }
  }
  throw Error(ErrorCode::BackendUnavailable,
              "gave up after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

AuditLog::AuditLog(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorCode::IOError, "cannot open audit log " + path.string());
}

void AuditLog::record(const json& entry) {
  std::lock_guard lock(mu_);
  out_ << entry.dump() << '\n';
  out_.flush();
}

}  // namespace errsynth

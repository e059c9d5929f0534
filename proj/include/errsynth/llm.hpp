#pragma once

#include <chrono>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include <json.hpp>

namespace errsynth {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.7;
};

/// A chat-completion backend. Implementations must tolerate concurrent
/// complete() calls up to their configured limit.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Throws Error(BackendUnavailable) or Error(UnparseableResponse).
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string model() const = 0;
};

/// Caps in-flight calls and paces call starts with a token bucket.
class Throttle {
 public:
  /// requests_per_second <= 0 disables pacing.
  Throttle(std::size_t max_concurrency, double requests_per_second);

  class Permit {
   public:
    explicit Permit(Throttle* t) : t_(t) {}
    Permit(Permit&& o) noexcept : t_(o.t_) { o.t_ = nullptr; }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit();

   private:
    Throttle* t_;
  };

  Permit acquire();

  std::size_t in_flight() const;
  std::size_t peak_in_flight() const;

 private:
  void release();
  void take_token();

  std::counting_semaphore<> slots_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  mutable std::mutex mu_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
};

struct HttpLlmConfig {
  std::string endpoint;  // e.g. https://api.example.com/v1/chat/completions
  std::string model;
  std::string api_key_env = "ERRSYNTH_API_KEY";
  double temperature = 0.7;
  int timeout_seconds = 120;
  int max_retries = 3;
  int backoff_initial_ms = 1000;
  std::size_t max_concurrency = 4;
  double requests_per_second = 0.0;

  nlohmann::json to_json() const;
  static HttpLlmConfig from_json(const nlohmann::json& j);
};

/// OpenAI-compatible chat/completions client. Transport errors, 429 and 5xx
/// are retried with exponential backoff; other statuses fail at once.
class HttpLlmClient : public LlmClient {
 public:
  /// Throws Error(ConfigError) when the endpoint is malformed or the
  /// credential variable is unset.
  explicit HttpLlmClient(HttpLlmConfig config);

  std::string complete(const ChatRequest& request) override;
  std::string model() const override { return config_.model; }

  const Throttle& throttle() const { return throttle_; }
  std::size_t attempts() const { return attempts_; }

 private:
  HttpLlmConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
  std::string api_key_;
  Throttle throttle_;
  std::atomic<std::size_t> attempts_{0};
};

/// Append-only JSONL log of backend calls.
class AuditLog {
 public:
  explicit AuditLog(const std::filesystem::path& path);
  void record(const nlohmann::json& entry);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace errsynth

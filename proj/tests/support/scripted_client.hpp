#pragma once

#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "errsynth/llm.hpp"

namespace testsupport {

/// Backend stand-in that replays canned responses in order, or answers via a
/// handler. Throws BackendUnavailable once the script runs dry.
class ScriptedClient : public errsynth::LlmClient {
 public:
  ScriptedClient() = default;
  explicit ScriptedClient(std::vector<std::string> responses);

  std::function<std::string(const errsynth::ChatRequest&)> handler;

  std::string complete(const errsynth::ChatRequest& request) override;
  std::string model() const override { return "scripted"; }

  std::vector<errsynth::ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> responses_;
  std::vector<errsynth::ChatRequest> requests_;
};

}  // namespace testsupport

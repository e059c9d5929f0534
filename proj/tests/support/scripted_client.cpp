#include "scripted_client.hpp"

#include "errsynth/error.hpp"

namespace testsupport {

ScriptedClient::ScriptedClient(std::vector<std::string> responses)
    : responses_(responses.begin(), responses.end()) {}

std::string ScriptedClient::complete(const errsynth::ChatRequest& request) {
  std::function<std::string(const errsynth::ChatRequest&)> h;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    h = handler;
    if (!h) {
      if (responses_.empty()) throw errsynth::Error(errsynth::ErrorCode::BackendUnavailable, "script exhausted");
      std::string r = std::move(responses_.front());
      responses_.pop_front();
      return r;
    }
  }
  return h(request);
}

std::vector<errsynth::ChatRequest> ScriptedClient::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace testsupport

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mockingbird/backend/backend.hpp"

namespace mockingbird::backend {

struct HttpReply {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Minimal POST transport. Connection problems are raised as BackendError
/// (timeout or transport); any HTTP status is returned as a reply.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpReply post(const std::string& base_url, const std::string& path, const HttpHeaders& headers,
                         const std::string& body, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib transport; supports http:// and https:// base URLs.
std::shared_ptr<HttpTransport> make_http_transport();

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};

  /// base_delay * 2^retry
  std::chrono::milliseconds delay(int retry) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

Sleeper real_sleeper();
EnvLookup process_environment();

/// Body of a POST /chat/completions request.
Json chat_completion_body(const ChatRequest& request);

/// Extracts choices[0].message.content and usage; throws BackendError(malformed_reply).
ChatResponse parse_chat_completion(const std::string& body, UsageCategory category);

/// Client for OpenAI-compatible chat-completions endpoints.
class OpenAiBackend final : public ChatBackend {
 public:
  explicit OpenAiBackend(BackendProfile profile, std::shared_ptr<HttpTransport> transport = make_http_transport(),
                         RetryPolicy retry = {}, Sleeper sleeper = real_sleeper(),
                         EnvLookup env = process_environment());

  ChatResponse complete(const ChatRequest& request) override;
  const BackendProfile& profile() const override { return profile_; }

 private:
  BackendProfile profile_;
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  EnvLookup env_;
};

}  // namespace mockingbird::backend

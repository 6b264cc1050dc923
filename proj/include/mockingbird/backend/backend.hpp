#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/contract/schema.hpp"
#include "mockingbird/memory/message.hpp"

namespace mockingbird::backend {

using memory::ChatMessage;

enum class UsageCategory { invocation, reflection, compression, script_generation };

std::string to_string(UsageCategory category);
UsageCategory usage_category_from_string(const std::string& name);

struct TokenUsage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  UsageCategory category = UsageCategory::invocation;

  std::size_t total() const noexcept { return prompt_tokens + completion_tokens; }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

/// Endpoint description plus prices in currency units per million tokens.
struct BackendProfile {
  std::string base_url = "https://api.openai.com/v1";
  /// Name of the environment variable holding the API key; the key itself is never stored.
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model_id;
  double temperature = 0.0;
  bool supports_structured_output = false;
  double input_price_per_million = 0.0;
  double output_price_per_million = 0.0;
  std::chrono::milliseconds timeout{60000};
};

/// Throws BackendError(precondition) on negative prices.
void check(const BackendProfile& profile);
BackendProfile profile_from_json(const Json& doc);
Json profile_to_json(const BackendProfile& profile);

struct ChatRequest {
  std::vector<ChatMessage> messages;
  /// Sent as the provider's structured-output schema when the profile supports it.
  std::optional<contract::SchemaDoc> response_schema;
  std::string model_id;
  double temperature = 0.0;
  /// Assigned by the caller; copied into the response usage.
  UsageCategory category = UsageCategory::invocation;
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  std::chrono::nanoseconds latency{0};
  /// Transport retries spent before this response arrived.
  int retries = 0;
  /// Operation-log id when the call went through a recording backend.
  std::string call_id;
};

enum class ErrorKind {
  precondition,
  auth,
  rate_limit,
  malformed_reply,
  timeout,
  transport,
  server,
  script_exhausted,
  unmatched_request,
};

std::string to_string(ErrorKind kind);
ErrorKind error_kind_from_string(const std::string& name);

class BackendError : public Error {
 public:
  BackendError(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }
  bool retryable() const noexcept;

 private:
  ErrorKind kind_;
};

/// Stub failure for a request no scripted matcher accepted; carries the request.
class UnmatchedRequestError : public BackendError {
 public:
  explicit UnmatchedRequestError(ChatRequest request);
  const ChatRequest& request() const noexcept { return request_; }

 private:
  ChatRequest request_;
};

/// Stateless chat-completion endpoint. Implementations are safe to call concurrently.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual const BackendProfile& profile() const = 0;
};

/// Throws BackendError(precondition) for an empty message list or a non-system first message.
void check(const ChatRequest& request);

/// Request for `messages` using the model settings of `profile`.
ChatRequest make_request(const BackendProfile& profile, std::vector<ChatMessage> messages, UsageCategory category,
                         std::optional<contract::SchemaDoc> response_schema = std::nullopt);

Json request_to_json(const ChatRequest& request);
ChatRequest request_from_json(const Json& doc);

}  // namespace mockingbird::backend

#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/backend/backend.hpp"

namespace mockingbird::backend {

using Matcher = std::function<bool(const ChatRequest&)>;

Matcher match_any();
/// Fires when the last message of the request contains `needle`.
Matcher match_substring(std::string needle);
/// Fires for requests of the given usage category.
Matcher match_category(UsageCategory category);
/// Fires when both matchers fire.
Matcher match_both(Matcher first, Matcher second);
/// Fires when the request messages (role and content) equal `messages` exactly.
Matcher match_messages(std::vector<ChatMessage> messages);

struct ScriptedReply {
  Matcher matcher;
  std::string content;
  /// When set, consuming this entry raises the error instead of replying.
  std::optional<ErrorKind> failure;
  /// Overrides the character-based estimate.
  std::optional<TokenUsage> usage;

  static ScriptedReply reply(std::string content, Matcher matcher = match_any());
  static ScriptedReply fail(ErrorKind kind, Matcher matcher = match_any());
};

/// Deterministic backend. Each request consumes the first unconsumed entry whose
/// matcher fires; usage is ceil(chars/4) for the prompt side and the reply side.
class StubBackend final : public ChatBackend {
 public:
  explicit StubBackend(std::vector<ScriptedReply> script, BackendProfile profile = default_profile());

  ChatResponse complete(const ChatRequest& request) override;
  const BackendProfile& profile() const override { return profile_; }

  std::size_t call_count() const;
  std::size_t remaining() const;
  /// Every request seen, in arrival order, with the reply text (empty on failure).
  std::vector<std::pair<ChatRequest, std::string>> transcript() const;

  static BackendProfile default_profile();

 private:
  BackendProfile profile_;
  mutable std::mutex mutex_;
  std::vector<ScriptedReply> script_;
  std::vector<bool> consumed_;
  std::size_t calls_ = 0;
  std::vector<std::pair<ChatRequest, std::string>> transcript_;
};

}  // namespace mockingbird::backend

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/core.hpp"

namespace mockingbird::memory {

enum class Role { system, user, assistant };

std::string to_string(Role role);
Role role_from_string(const std::string& name);

/// ceil(characters / 4); a tokenizer-free estimate.
std::size_t estimate_tokens(std::string_view text);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
  std::size_t token_estimate = 0;

  static ChatMessage system(std::string content);
  static ChatMessage user(std::string content);
  static ChatMessage assistant(std::string content);

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

Json message_to_json(const ChatMessage& m);
ChatMessage message_from_json(const Json& doc);

/// One argument/result exchange, mirrored as a user/assistant message pair.
struct MockInvocation {
  std::string id;
  Json arguments = Json::object();
  std::string remarks;
  Json results;
  std::optional<Json> ground_truth;
  bool reflected = false;
  TimePoint created_at{};

  /// The arguments document.
  ChatMessage request_message() const;
  /// {"remarks": ..., "results": ...}
  ChatMessage response_message() const;
};

Json invocation_to_json(const MockInvocation& inv);
MockInvocation invocation_from_json(const Json& doc);

}  // namespace mockingbird::memory

#include "mockingbird/backend/stub.hpp"

#include <algorithm>

namespace mockingbird::backend {

Matcher match_any() {
  return [](const ChatRequest&) { return true; };
}

Matcher match_substring(std::string needle) {
  return [needle = std::move(needle)](const ChatRequest& r) {
    return !r.messages.empty() && r.messages.back().content.find(needle) != std::string::npos;
  };
}

Matcher match_category(UsageCategory category) {
  return [category](const ChatRequest& r) { return r.category == category; };
}

Matcher match_both(Matcher first, Matcher second) {
  return [first = std::move(first), second = std::move(second)](const ChatRequest& r) {
    return first(r) && second(r);
  };
}

Matcher match_messages(std::vector<ChatMessage> messages) {
  return [expected = std::move(messages)](const ChatRequest& r) {
    if (r.messages.size() != expected.size()) return false;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (r.messages[i].role != expected[i].role || r.messages[i].content != expected[i].content) return false;
    }
    return true;
  };
}

ScriptedReply ScriptedReply::reply(std::string content, Matcher matcher) {
  return ScriptedReply{std::move(matcher), std::move(content), std::nullopt, std::nullopt};
}

ScriptedReply ScriptedReply::fail(ErrorKind kind, Matcher matcher) {
  return ScriptedReply{std::move(matcher), {}, kind, std::nullopt};
}

StubBackend::StubBackend(std::vector<ScriptedReply> script, BackendProfile profile)
    : profile_(std::move(profile)), script_(std::move(script)), consumed_(script_.size(), false) {
  if (script_.empty()) throw BackendError(ErrorKind::precondition, "stub script must not be empty");
}

BackendProfile StubBackend::default_profile() {
  BackendProfile p;
  p.base_url = "stub://";
  p.api_key_env.clear();
  p.model_id = "stub";
  return p;
}

ChatResponse StubBackend::complete(const ChatRequest& request) {
  check(request);
  std::lock_guard lock(mutex_);
  ++calls_;

  std::optional<std::size_t> chosen;
  bool any_left = false;
  for (std::size_t i = 0; i < script_.size(); ++i) {
    if (consumed_[i]) continue;
    any_left = true;
    if (script_[i].matcher(request)) {
      chosen = i;
      break;
    }
  }
  if (!chosen) {
    transcript_.emplace_back(request, std::string{});
    if (!any_left) throw BackendError(ErrorKind::script_exhausted, "stub script is exhausted");
    throw UnmatchedRequestError(request);
  }

  consumed_[*chosen] = true;
  const auto& entry = script_[*chosen];
  if (entry.failure) {
    transcript_.emplace_back(request, std::string{});
    throw BackendError(*entry.failure, "scripted failure");
  }

  std::size_t prompt_chars = 0;
  for (const auto& m : request.messages) prompt_chars += m.content.size();

  ChatResponse response;
  response.content = entry.content;
  if (entry.usage) {
    response.usage = *entry.usage;
  } else {
    response.usage.prompt_tokens = (prompt_chars + 3) / 4;
    response.usage.completion_tokens = memory::estimate_tokens(entry.content);
  }
  response.usage.category = request.category;
  transcript_.emplace_back(request, response.content);
  return response;
}

std::size_t StubBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t StubBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), false));
}

std::vector<std::pair<ChatRequest, std::string>> StubBackend::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

}  // namespace mockingbird::backend

#include "mockingbird/memory/message.hpp"

namespace mockingbird::memory {

std::string to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(const std::string& name) {
  if (name == "system") return Role::system;
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  throw Error("unknown chat role '" + name + "'");
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

namespace {
ChatMessage make(Role role, std::string content) {
  auto tokens = estimate_tokens(content);
  return ChatMessage{role, std::move(content), tokens};
}
}  // namespace

ChatMessage ChatMessage::system(std::string content) {
  if (content.empty()) throw Error("system message content must not be empty");
  return make(Role::system, std::move(content));
}
ChatMessage ChatMessage::user(std::string content) { return make(Role::user, std::move(content)); }
ChatMessage ChatMessage::assistant(std::string content) { return make(Role::assistant, std::move(content)); }

Json message_to_json(const ChatMessage& m) {
  Json out;
  out["role"] = to_string(m.role);
  out["content"] = m.content;
  return out;
}

ChatMessage message_from_json(const Json& doc) {
  return make(role_from_string(doc.at("role").get<std::string>()), doc.at("content").get<std::string>());
}

ChatMessage MockInvocation::request_message() const { return ChatMessage::user(canonical(arguments)); }

ChatMessage MockInvocation::response_message() const {
  Json body;
  body["remarks"] = remarks;
  body["results"] = results;
  return ChatMessage::assistant(canonical(body));
}

Json invocation_to_json(const MockInvocation& inv) {
  Json out;
  out["id"] = inv.id;
  out["arguments"] = inv.arguments;
  out["remarks"] = inv.remarks;
  out["results"] = inv.results;
  out["ground_truth"] = inv.ground_truth ? *inv.ground_truth : Json();
  out["reflected"] = inv.reflected;
  out["created_at"] = format_timestamp(inv.created_at);
  return out;
}

MockInvocation invocation_from_json(const Json& doc) {
  MockInvocation inv;
  inv.id = doc.at("id").get<std::string>();
  inv.arguments = doc.at("arguments");
  inv.remarks = doc.value("remarks", std::string{});
  inv.results = doc.at("results");
  if (doc.contains("ground_truth") && !doc["ground_truth"].is_null()) inv.ground_truth = doc["ground_truth"];
  inv.reflected = doc.value("reflected", false);
  if (doc.contains("created_at")) inv.created_at = parse_timestamp(doc["created_at"].get<std::string>());
  if (inv.reflected && !inv.ground_truth) throw Error("reflected invocation " + inv.id + " has no ground truth");
  return inv;
}

}  // namespace mockingbird::memory

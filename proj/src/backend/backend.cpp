#include "mockingbird/backend/backend.hpp"

namespace mockingbird::backend {

namespace {

struct CategoryName {
  UsageCategory category;
  const char* name;
};

constexpr CategoryName kCategories[] = {
    {UsageCategory::invocation, "invocation"},
    {UsageCategory::reflection, "reflection"},
    {UsageCategory::compression, "compression"},
    {UsageCategory::script_generation, "script_generation"},
};

struct KindName {
  ErrorKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ErrorKind::precondition, "precondition"},
    {ErrorKind::auth, "auth"},
    {ErrorKind::rate_limit, "rate_limit"},
    {ErrorKind::malformed_reply, "malformed_reply"},
    {ErrorKind::timeout, "timeout"},
    {ErrorKind::transport, "transport"},
    {ErrorKind::server, "server"},
    {ErrorKind::script_exhausted, "script_exhausted"},
    {ErrorKind::unmatched_request, "unmatched_request"},
};

}  // namespace

std::string to_string(UsageCategory category) {
  for (const auto& [c, n] : kCategories) {
    if (c == category) return n;
  }
  return "invocation";
}

UsageCategory usage_category_from_string(const std::string& name) {
  for (const auto& [c, n] : kCategories) {
    if (name == n) return c;
  }
  throw Error("unknown usage category '" + name + "'");
}

std::string to_string(ErrorKind kind) {
  for (const auto& [k, n] : kKinds) {
    if (k == kind) return n;
  }
  return "transport";
}

ErrorKind error_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKinds) {
    if (name == n) return k;
  }
  throw Error("unknown backend error kind '" + name + "'");
}

BackendError::BackendError(ErrorKind kind, const std::string& message)
    : Error(to_string(kind) + ": " + message), kind_(kind) {}

bool BackendError::retryable() const noexcept {
  return kind_ == ErrorKind::rate_limit || kind_ == ErrorKind::timeout || kind_ == ErrorKind::transport ||
         kind_ == ErrorKind::server;
}

UnmatchedRequestError::UnmatchedRequestError(ChatRequest request)
    : BackendError(ErrorKind::unmatched_request,
                   "no scripted reply matches request ending with: " +
                       (request.messages.empty() ? std::string("<empty>")
                                                 : request.messages.back().content.substr(0, 200))),
      request_(std::move(request)) {}

void check(const BackendProfile& profile) {
  if (profile.input_price_per_million < 0 || profile.output_price_per_million < 0) {
    throw BackendError(ErrorKind::precondition, "token prices must be non-negative");
  }
}

BackendProfile profile_from_json(const Json& doc) {
  BackendProfile p;
  p.base_url = doc.value("base_url", p.base_url);
  p.api_key_env = doc.value("api_key_env", p.api_key_env);
  p.model_id = doc.value("model", p.model_id);
  p.temperature = doc.value("temperature", p.temperature);
  p.supports_structured_output = doc.value("structured_output", p.supports_structured_output);
  p.input_price_per_million = doc.value("input_price_per_million", p.input_price_per_million);
  p.output_price_per_million = doc.value("output_price_per_million", p.output_price_per_million);
  p.timeout = std::chrono::milliseconds(doc.value("timeout_ms", static_cast<long long>(p.timeout.count())));
  check(p);
  return p;
}

Json profile_to_json(const BackendProfile& p) {
  Json out;
  out["base_url"] = p.base_url;
  out["api_key_env"] = p.api_key_env;
  out["model"] = p.model_id;
  out["temperature"] = p.temperature;
  out["structured_output"] = p.supports_structured_output;
  out["input_price_per_million"] = p.input_price_per_million;
  out["output_price_per_million"] = p.output_price_per_million;
  out["timeout_ms"] = p.timeout.count();
  return out;
}

void check(const ChatRequest& request) {
  if (request.messages.empty()) throw BackendError(ErrorKind::precondition, "request has no messages");
  if (request.messages.front().role != memory::Role::system) {
    throw BackendError(ErrorKind::precondition, "first message of a request must be the system prompt");
  }
}

ChatRequest make_request(const BackendProfile& profile, std::vector<ChatMessage> messages, UsageCategory category,
                         std::optional<contract::SchemaDoc> response_schema) {
  ChatRequest r;
  r.messages = std::move(messages);
  r.model_id = profile.model_id;
  r.temperature = profile.temperature;
  r.category = category;
  if (profile.supports_structured_output) r.response_schema = std::move(response_schema);
  return r;
}

Json request_to_json(const ChatRequest& request) {
  Json out;
  out["model"] = request.model_id;
  out["temperature"] = request.temperature;
  out["category"] = to_string(request.category);
  out["messages"] = Json::array();
  for (const auto& m : request.messages) out["messages"].push_back(memory::message_to_json(m));
  out["response_schema"] = request.response_schema ? request.response_schema->json() : Json();
  return out;
}

ChatRequest request_from_json(const Json& doc) {
  ChatRequest r;
  r.model_id = doc.value("model", std::string{});
  r.temperature = doc.value("temperature", 0.0);
  r.category = usage_category_from_string(doc.value("category", std::string("invocation")));
  for (const auto& m : doc.at("messages")) r.messages.push_back(memory::message_from_json(m));
  if (doc.contains("response_schema") && doc["response_schema"].is_object()) {
    r.response_schema = contract::SchemaDoc(doc["response_schema"]);
  }
  return r;
}

}  // namespace mockingbird::backend

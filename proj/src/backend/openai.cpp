#include "mockingbird/backend/openai.hpp"

#include <cstdlib>
#include <thread>

namespace mockingbird::backend {

namespace {

// OpenAI strict mode requires every object member to be required and closed.
bool strict_compatible(const Json& node) {
  if (!node.is_object()) return true;
  if (node.value("type", std::string{}) == "object") {
    if (!node.contains("additionalProperties") || node["additionalProperties"] != false) return false;
    const auto& props = node.contains("properties") ? node["properties"] : Json::object();
    const auto& required = node.contains("required") ? node["required"] : Json::array();
    if (props.size() != required.size()) return false;
    for (const auto& [k, v] : props.items()) {
      if (!strict_compatible(v)) return false;
    }
  }
  if (node.contains("items") && !strict_compatible(node["items"])) return false;
  return true;
}

std::string schema_name(const Json& schema) {
  std::string title = schema.value("title", std::string("response"));
  std::string out;
  for (char c : title) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.size() > 64) out.resize(64);
  return out.empty() ? "response" : out;
}

BackendError status_error(const HttpReply& reply) {
  auto snippet = reply.body.substr(0, 300);
  auto code = std::to_string(reply.status);
  if (reply.status == 401 || reply.status == 403) return BackendError(ErrorKind::auth, "HTTP " + code + " " + snippet);
  if (reply.status == 429) return BackendError(ErrorKind::rate_limit, "HTTP 429 " + snippet);
  if (reply.status == 408 || reply.status == 504) return BackendError(ErrorKind::timeout, "HTTP " + code);
  if (reply.status >= 500) return BackendError(ErrorKind::server, "HTTP " + code + " " + snippet);
  return BackendError(ErrorKind::precondition, "provider rejected the request: HTTP " + code + " " + snippet);
}

}  // namespace

std::chrono::milliseconds RetryPolicy::delay(int retry) const { return base_delay * (1LL << retry); }

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
}

Json chat_completion_body(const ChatRequest& request) {
  Json body;
  body["model"] = request.model_id;
  body["temperature"] = request.temperature;
  body["messages"] = Json::array();
  for (const auto& m : request.messages) body["messages"].push_back(memory::message_to_json(m));
  if (request.response_schema) {
    Json schema = request.response_schema->json();
    auto name = schema_name(schema);
    schema.erase("$schema");
    schema.erase("title");
    Json format;
    format["type"] = "json_schema";
    format["json_schema"] = Json{{"name", name}, {"strict", strict_compatible(schema)}, {"schema", schema}};
    body["response_format"] = std::move(format);
  }
  return body;
}

ChatResponse parse_chat_completion(const std::string& body, UsageCategory category) {
  Json doc = Json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw BackendError(ErrorKind::malformed_reply, "reply is not JSON");
  try {
    const auto& choices = doc.at("choices");
    if (!choices.is_array() || choices.empty()) throw BackendError(ErrorKind::malformed_reply, "reply has no choices");
    const auto& message = choices[0].at("message");
    if (!message.contains("content") || !message["content"].is_string()) {
      throw BackendError(ErrorKind::malformed_reply, "reply message has no text content");
    }
    ChatResponse out;
    out.content = message["content"].get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
      out.usage.prompt_tokens = doc["usage"].value("prompt_tokens", std::size_t{0});
      out.usage.completion_tokens = doc["usage"].value("completion_tokens", std::size_t{0});
    }
    out.usage.category = category;
    return out;
  } catch (const Json::exception& e) {
    throw BackendError(ErrorKind::malformed_reply, e.what());
  }
}

OpenAiBackend::OpenAiBackend(BackendProfile profile, std::shared_ptr<HttpTransport> transport, RetryPolicy retry,
                             Sleeper sleeper, EnvLookup env)
    : profile_(std::move(profile)),
      transport_(std::move(transport)),
      retry_(retry),
      sleeper_(std::move(sleeper)),
      env_(std::move(env)) {
  check(profile_);
}

ChatResponse OpenAiBackend::complete(const ChatRequest& request) {
  check(request);

  HttpHeaders headers{{"Content-Type", "application/json"}};
  if (!profile_.api_key_env.empty()) {
    auto key = env_(profile_.api_key_env);
    if (!key) throw BackendError(ErrorKind::auth, "environment variable " + profile_.api_key_env + " is not set");
    headers.emplace_back("Authorization", "Bearer " + *key);
  }

  // Base URL may carry a path prefix such as /v1.
  std::string origin = profile_.base_url;
  std::string prefix;
  if (auto scheme = origin.find("://"); scheme != std::string::npos) {
    if (auto slash = origin.find('/', scheme + 3); slash != std::string::npos) {
      prefix = origin.substr(slash);
      origin.resize(slash);
    }
  }
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  const auto body = chat_completion_body(request).dump();
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    try {
      auto reply = transport_->post(origin, prefix + "/chat/completions", headers, body, profile_.timeout);
      if (reply.status != 200) throw status_error(reply);
      auto response = parse_chat_completion(reply.body, request.category);
      response.retries = attempt;
      response.latency = std::chrono::steady_clock::now() - start;
      return response;
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= retry_.max_retries) throw;
      sleeper_(retry_.delay(attempt));
    }
  }
}

}  // namespace mockingbird::backend

#include "mockingbird/mockfn/mock_function.hpp"

#include "mockingbird/contract/arguments.hpp"
#include "mockingbird/prompts.hpp"

namespace mockingbird::mockfn {

std::string to_string(ServedBy served_by) { return served_by == ServedBy::llm ? "llm" : "script"; }

namespace {

std::string join_lines(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += "attempt " + std::to_string(i + 1) + ":\n" + parts[i];
    if (i + 1 < parts.size()) out += "\n";
  }
  return out;
}

std::optional<Json> try_parse(std::string_view text) {
  auto doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

}  // namespace

FormalFailure::FormalFailure(std::vector<std::string> reports, std::vector<std::string> call_ids)
    : Error("no schema-conforming response after " + std::to_string(reports.size()) + " attempt(s)\n" +
            join_lines(reports)),
      reports_(std::move(reports)),
      call_ids_(std::move(call_ids)) {}

ChatMessage build_system_prompt(const contract::FunctionContract& contract, const contract::SchemaDoc& param_schema,
                                const contract::SchemaDoc& response_schema) {
  std::string text = prompts::role_play_directive(contract.name, contract.description);
  text += "\nThe arguments follow this JSON schema:\n";
  text += param_schema.serialize();
  text += "\n\nYour reply must follow this JSON schema:\n";
  text += response_schema.serialize();
  text += "\n\nWrite your reasoning in \"remarks\" first, then put the return value in \"results\".";
  return ChatMessage::system(std::move(text));
}

std::optional<Json> parse_reply(std::string_view content) {
  if (auto doc = try_parse(content)) return doc;
  auto open = content.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  auto body = content.find('\n', open);
  if (body == std::string_view::npos) return std::nullopt;
  ++body;
  auto close = content.find("```", body);
  if (close == std::string_view::npos) return std::nullopt;
  return try_parse(content.substr(body, close - body));
}

MockFunction::MockFunction(contract::FunctionContract contract, std::shared_ptr<backend::ChatBackend> executor,
                           Runtime runtime, MockFunctionOptions options)
    : contract_(std::move(contract)),
      executor_(std::move(executor)),
      runtime_(std::move(runtime)),
      options_(options) {
  contract::check(contract_);
  if (!executor_) throw Error("mock function needs an executor backend");
  if (options_.max_regeneration_attempts < 1) throw Error("max_regeneration_attempts must be at least 1");
  param_schema_ = contract::build_parameter_schema(contract_);
  response_schema_ = contract::build_response_schema(contract_);
  system_prompt_ = build_system_prompt(contract_, param_schema_, response_schema_);
  memory_ = MemoryBranch::create("main", system_prompt_);
}

void MockFunction::set_memory(std::shared_ptr<MemoryBranch> memory) {
  if (!memory) throw Error("memory branch must not be null");
  memory_ = std::move(memory);
}

InvocationOutcome MockFunction::invoke(const Json& args) { return invoke_in(*memory_, args); }

InvocationOutcome MockFunction::invoke_in(MemoryBranch& branch, const Json& args) {
  auto installed = script();
  if (!installed || !installed->valid) return invoke_live(branch, args);

  Json rendered = contract::render_arguments(contract_, args);
  std::string fallback;
  try {
    auto out = subscript::execute_script(*installed, rendered, options_.script_limits);
    if (out.ready) {
      Json doc{{"remarks", out.remarks}, {"results", out.results}};
      auto check = contract::validate(response_schema_, doc);
      if (check.ok()) {
        InvocationOutcome outcome;
        outcome.invocation.id = runtime_.ids->next();
        outcome.invocation.arguments = std::move(rendered);
        outcome.invocation.remarks = std::move(out.remarks);
        outcome.invocation.results = contract::canonicalize_value(contract_.return_spec, out.results);
        outcome.invocation.created_at = runtime_.clock->now();
        outcome.served_by = ServedBy::script;
        outcome.formally_correct_first_try = true;
        return outcome;
      }
      invalidate();
      fallback = "script output violates the response schema: " + check.report();
    } else {
      fallback = "declined";
    }
  } catch (const subscript::ScriptFault& fault) {
    invalidate();
    fallback = fault.what();
  }
  auto outcome = invoke_live(branch, args);
  outcome.script_fallback = std::move(fallback);
  return outcome;
}

InvocationOutcome MockFunction::invoke_live(MemoryBranch& branch, const Json& args) {
  Json rendered = contract::render_arguments(contract_, args);
  MockInvocation inv;
  inv.arguments = std::move(rendered);

  // Correction exchanges live only in this local transcript, never in memory.
  auto messages = branch.render_context();
  messages.push_back(inv.request_message());

  std::vector<std::string> reports;
  std::vector<std::string> call_ids;
  const auto& profile = executor_->profile();
  for (int attempt = 1; attempt <= options_.max_regeneration_attempts; ++attempt) {
    auto request = backend::make_request(profile, messages, backend::UsageCategory::invocation, response_schema_);
    auto response = executor_->complete(request);
    if (!response.call_id.empty()) call_ids.push_back(response.call_id);

    auto doc = parse_reply(response.content);
    contract::ValidationResult check;
    if (doc) {
      check = contract::validate(response_schema_, *doc);
    } else {
      check.violations.push_back({"", "not valid JSON"});
    }
    if (check.ok()) {
      inv.id = runtime_.ids->next();
      inv.remarks = (*doc)["remarks"].get<std::string>();
      inv.results = contract::canonicalize_value(contract_.return_spec, (*doc)["results"]);
      inv.created_at = runtime_.clock->now();
      branch.append(inv);
      InvocationOutcome outcome;
      outcome.invocation = std::move(inv);
      outcome.attempts = attempt;
      outcome.formally_correct_first_try = attempt == 1;
      outcome.served_by = ServedBy::llm;
      outcome.call_ids = std::move(call_ids);
      return outcome;
    }
    reports.push_back(check.report());
    messages.push_back(ChatMessage::assistant(response.content));
    messages.push_back(ChatMessage::user(prompts::correction_request(reports.back())));
  }
  throw FormalFailure(std::move(reports), std::move(call_ids));
}

std::optional<subscript::SubstitutionScript> MockFunction::script() const {
  std::lock_guard lock(script_mutex_);
  return script_;
}

bool MockFunction::has_valid_script() const {
  std::lock_guard lock(script_mutex_);
  return script_ && script_->valid;
}

void MockFunction::install_script(subscript::SubstitutionScript script) {
  if (!script.valid || !script.executable) throw Error("only a valid script can be installed");
  std::lock_guard lock(script_mutex_);
  script_ = std::move(script);
}

void MockFunction::invalidate() {
  std::lock_guard lock(script_mutex_);
  script_.reset();
}

}  // namespace mockingbird::mockfn

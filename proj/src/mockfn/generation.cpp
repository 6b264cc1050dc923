#include "mockingbird/mockfn/mock_function.hpp"
#include "mockingbird/prompts.hpp"

namespace mockingbird::mockfn {

ScriptGenerationFailure::ScriptGenerationFailure(int attempts, std::string last_diagnostics)
    : Error("no compilable script after " + std::to_string(attempts) + " attempt(s):\n" + last_diagnostics),
      attempts_(attempts),
      last_diagnostics_(std::move(last_diagnostics)) {}

subscript::SubstitutionScript generate_script(MockFunction& fn, backend::ChatBackend& generator, int max_attempts) {
  if (max_attempts < 1) throw Error("max_attempts must be at least 1");
  auto messages = fn.memory()->render_context();
  messages.push_back(ChatMessage::user(
      prompts::script_request(fn.contract().name, fn.contract().description, fn.parameter_schema().serialize(),
                              fn.response_schema().serialize(), subscript::dialect_reference())));

  std::string diagnostics;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto request = backend::make_request(generator.profile(), messages, backend::UsageCategory::script_generation);
    auto response = generator.complete(request);
    auto source = subscript::extract_source(response.content);
    try {
      auto script = subscript::make_script(std::move(source), attempt, fn.runtime().clock->now());
      fn.install_script(script);
      return script;
    } catch (const subscript::CompileError& err) {
      diagnostics = err.report();
    }
    messages.push_back(ChatMessage::assistant(response.content));
    messages.push_back(ChatMessage::user(prompts::script_diagnostics(diagnostics)));
  }
  throw ScriptGenerationFailure(max_attempts, diagnostics);
}

}  // namespace mockingbird::mockfn

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/backend/backend.hpp"
#include "mockingbird/contract/contract.hpp"
#include "mockingbird/contract/schema.hpp"
#include "mockingbird/memory/branch.hpp"
#include "mockingbird/subscript/substitution.hpp"

namespace mockingbird::mockfn {

using memory::ChatMessage;
using memory::MemoryBranch;
using memory::MockInvocation;

enum class ServedBy { llm, script };

std::string to_string(ServedBy served_by);

struct MockFunctionOptions {
  int max_regeneration_attempts = 3;
  subscript::ExecutionLimits script_limits;
};

struct InvocationOutcome {
  MockInvocation invocation;
  /// Backend requests spent; 0 when the script answered.
  int attempts = 0;
  bool formally_correct_first_try = false;
  ServedBy served_by = ServedBy::llm;
  /// Operation-log ids of the backend calls, in order.
  std::vector<std::string> call_ids;
  /// Why an installed script did not answer (fault text or "declined").
  std::optional<std::string> script_fallback;
};

/// Every attempt produced a response that failed schema validation.
class FormalFailure : public Error {
 public:
  FormalFailure(std::vector<std::string> reports, std::vector<std::string> call_ids);
  /// One violation report per attempt.
  const std::vector<std::string>& reports() const noexcept { return reports_; }
  int attempts() const noexcept { return static_cast<int>(reports_.size()); }
  const std::vector<std::string>& call_ids() const noexcept { return call_ids_; }

 private:
  std::vector<std::string> reports_;
  std::vector<std::string> call_ids_;
};

/// Directive, parameter schema and response schema, both schemas verbatim.
ChatMessage build_system_prompt(const contract::FunctionContract& contract, const contract::SchemaDoc& param_schema,
                                const contract::SchemaDoc& response_schema);

/// Parses an assistant reply; a ``` fenced block holding the document is accepted.
std::optional<Json> parse_reply(std::string_view content);

/// A function executed by an LLM role-playing it.
///
/// The script slot is synchronized; memory branches synchronize themselves.
/// Concurrent callers should each invoke into their own sub-branch.
class MockFunction {
 public:
  MockFunction(contract::FunctionContract contract, std::shared_ptr<backend::ChatBackend> executor, Runtime runtime,
               MockFunctionOptions options = {});

  const contract::FunctionContract& contract() const noexcept { return contract_; }
  const contract::SchemaDoc& parameter_schema() const noexcept { return param_schema_; }
  const contract::SchemaDoc& response_schema() const noexcept { return response_schema_; }
  const ChatMessage& system_prompt() const noexcept { return system_prompt_; }
  const std::shared_ptr<MemoryBranch>& memory() const noexcept { return memory_; }
  /// Swaps the main memory, e.g. for one restored from disk.
  void set_memory(std::shared_ptr<MemoryBranch> memory);
  backend::ChatBackend& executor() const noexcept { return *executor_; }
  const Runtime& runtime() const noexcept { return runtime_; }
  const MockFunctionOptions& options() const noexcept { return options_; }

  /// Invokes into the main memory.
  InvocationOutcome invoke(const Json& args);
  /// Invokes with `branch` as context. A live answer is registered in `branch`;
  /// a script answer is not registered anywhere.
  InvocationOutcome invoke_in(MemoryBranch& branch, const Json& args);
  /// Live inference only, bypassing any installed script.
  InvocationOutcome invoke_live(MemoryBranch& branch, const Json& args);

  std::optional<subscript::SubstitutionScript> script() const;
  bool has_valid_script() const;
  void install_script(subscript::SubstitutionScript script);
  /// Clears the script slot. No-op when empty.
  void invalidate();

 private:
  contract::FunctionContract contract_;
  contract::SchemaDoc param_schema_;
  contract::SchemaDoc response_schema_;
  ChatMessage system_prompt_;
  std::shared_ptr<backend::ChatBackend> executor_;
  Runtime runtime_;
  MockFunctionOptions options_;
  std::shared_ptr<MemoryBranch> memory_;
  mutable std::mutex script_mutex_;
  std::optional<subscript::SubstitutionScript> script_;
};

/// Compilation never succeeded within the attempt budget.
class ScriptGenerationFailure : public Error {
 public:
  ScriptGenerationFailure(int attempts, std::string last_diagnostics);
  int attempts() const noexcept { return attempts_; }
  const std::string& last_diagnostics() const noexcept { return last_diagnostics_; }

 private:
  int attempts_;
  std::string last_diagnostics_;
};

/// Asks `generator` for a script reproducing `fn`, feeding compiler diagnostics
/// back until one compiles. On success the script is installed in `fn`.
subscript::SubstitutionScript generate_script(MockFunction& fn, backend::ChatBackend& generator, int max_attempts = 3);

}  // namespace mockingbird::mockfn

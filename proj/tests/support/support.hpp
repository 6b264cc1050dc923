#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mockingbird/backend/stub.hpp"
#include "mockingbird/contract/contract.hpp"
#include "mockingbird/memory/branch.hpp"

namespace mbtest {

using mockingbird::Json;

mockingbird::contract::FunctionContract iris_contract();
mockingbird::contract::FunctionContract mushroom_contract();
/// Titanic-style boolean classifier.
mockingbird::contract::FunctionContract survival_contract();
mockingbird::contract::FunctionContract price_contract();

/// {"remarks": remarks, "results": results} as reply text.
std::string reply(const Json& results, const std::string& remarks = "because");

mockingbird::backend::ScriptedReply on(mockingbird::backend::UsageCategory category, std::string content);

std::shared_ptr<mockingbird::backend::StubBackend> stub(std::vector<mockingbird::backend::ScriptedReply> script);

/// Stub for code paths that must not call the backend; any call fails.
std::shared_ptr<mockingbird::backend::StubBackend> idle_stub();

mockingbird::memory::MockInvocation invocation(const std::string& id, const Json& results,
                                               std::optional<Json> truth = std::nullopt, bool reflected = false);

std::vector<std::string> ids_of(const mockingbird::memory::MemoryBranch& branch);

/// Iris and mushroom substitution scripts in the sandbox dialect.
extern const char* const kIrisScript;
extern const char* const kMushroomScript;

/// Random contracts and documents for validator agreement checks.
class SchemaFuzzer {
 public:
  explicit SchemaFuzzer(std::uint64_t seed) : rng_(seed) {}

  mockingbird::contract::FunctionContract contract(int index);
  /// Conforming instance of `spec`.
  Json instance(const mockingbird::contract::ValueSpec& spec);
  /// Conforming instance of the response schema, then possibly mutated.
  std::string response_text(const mockingbird::contract::FunctionContract& contract);

  std::mt19937_64& rng() { return rng_; }

 private:
  mockingbird::contract::ValueSpec value(int depth);
  std::vector<mockingbird::contract::ParamSpec> members(int depth, int max_count);
  Json mutate(Json doc);
  Json wrong_kind(const Json& value);
  bool coin(double p);
  int pick(int lo, int hi);

  std::mt19937_64 rng_;
  int counter_ = 0;
};

/// Accept/reject verdicts of the Python `jsonschema` package (Draft 2020-12)
/// for each text against `schema`. Empty when the oracle cannot run.
std::optional<std::vector<bool>> reference_verdicts(const Json& schema, const std::vector<std::string>& texts);

/// Batch form: one verdict list per (schema, texts) group, one interpreter launch.
std::optional<std::vector<std::vector<bool>>> reference_verdicts(
    const std::vector<std::pair<Json, std::vector<std::string>>>& groups);

}  // namespace mbtest

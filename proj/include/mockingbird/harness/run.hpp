#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/backend/accounting.hpp"
#include "mockingbird/backend/stub.hpp"
#include "mockingbird/harness/dataset.hpp"
#include "mockingbird/harness/metrics.hpp"
#include "mockingbird/harness/oplog.hpp"
#include "mockingbird/harness/rag.hpp"
#include "mockingbird/trainer/trainer.hpp"

namespace mockingbird::harness {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// One scripted reply of the stub backend, repeated `times` times.
struct StubReplySpec {
  std::string content;
  std::optional<backend::UsageCategory> category;
  std::optional<std::string> contains;
  std::optional<backend::ErrorKind> failure;
  int times = 1;
};

struct RunConfig {
  contract::FunctionContract contract;
  DatasetSpec dataset;
  /// "stub" or "openai".
  std::string backend = "stub";
  backend::BackendProfile executor;
  /// Fall back to the executor profile when absent.
  std::optional<backend::BackendProfile> reflector;
  std::optional<backend::BackendProfile> generator;
  std::vector<StubReplySpec> stub_replies;

  std::size_t context_length = 0;
  double error_threshold = 0.0;
  trainer::RefinementPolicy policy = trainer::RefinementPolicy::replace;
  int max_regeneration_attempts = 3;

  bool script = false;
  int script_max_attempts = 3;

  std::optional<RagMaterial> rag;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;
  bool deterministic = true;
  std::size_t eval_parallelism = 1;
  std::optional<std::size_t> eval_limit;

  const backend::BackendProfile& reflector_profile() const { return reflector ? *reflector : executor; }
  const backend::BackendProfile& generator_profile() const { return generator ? *generator : executor; }
};

/// Relative paths inside the document resolve against `base_dir`. Throws ConfigError.
RunConfig run_config_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

enum class RunMode { full, train_only, eval_only };

struct RunOptions {
  RunMode mode = RunMode::full;
  /// Replaces the configured backend for every role, e.g. a replay stub.
  std::shared_ptr<backend::ChatBackend> backend_override;
  /// Memory snapshot to start from instead of an empty memory.
  std::optional<std::filesystem::path> memory_in;
};

struct RunResult {
  std::optional<MetricsReport> metrics;
  trainer::TrainingReport training;
  backend::CostBreakdown cost;
  std::shared_ptr<OperationLog> log;
  Json memory;
  std::optional<std::string> script_source;
  std::vector<std::string> notices;
};

/// Stub scripted from `stub_replies`.
std::shared_ptr<backend::ChatBackend> make_stub_backend(const RunConfig& config);

/// Stub that answers each logged request with its logged response, usage and error.
std::shared_ptr<backend::StubBackend> replay_backend(const std::vector<OperationLogRecord>& records,
                                                     const backend::BackendProfile& profile);

/// Prices each record with the profile of the role that issued it.
backend::CostBreakdown cost_from_records(const std::vector<OperationLogRecord>& records, const RunConfig& config);

/// Train and/or evaluate. Fatal backend errors (auth, precondition, exhausted or
/// unmatched stub script) propagate; other per-entry failures are recorded.
RunResult execute_run(const RunConfig& config, const RunOptions& options = {});

/// operations.jsonl, metrics.json, cost.json, training.json, memory.json and script.txt.
void write_artifacts(const RunResult& result, const std::filesystem::path& dir);

}  // namespace mockingbird::harness

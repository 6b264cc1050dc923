#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mockingbird/mockfn/mock_function.hpp"

namespace mockingbird::trainer {

using memory::MemoryBranch;
using memory::MockInvocation;
using mockfn::MockFunction;

enum class RefinementPolicy { replace, compress, custom };

std::string to_string(RefinementPolicy policy);
RefinementPolicy policy_from_string(const std::string& name);

/// Called after an entry whenever memory holds more than the limit.
using CustomPolicy = std::function<void(MemoryBranch& memory, const MockInvocation& latest, bool latest_correct,
                                        std::size_t limit)>;

struct TrainerConfig {
  /// Maximum invocations kept in memory; 0 skips training altogether.
  std::size_t context_length_limit = 0;
  /// Regression only: absolute difference above which a result counts as wrong.
  double error_threshold = 0.0;
  RefinementPolicy policy = RefinementPolicy::replace;
  CustomPolicy custom;
  /// Backend for reflection and compression; the executor when null.
  std::shared_ptr<backend::ChatBackend> reflector;
  /// When set, a fresh substitution script is generated after every entry that
  /// needed a reflection. Without it training leaves the script slot empty.
  std::shared_ptr<backend::ChatBackend> script_generator;
  int script_max_attempts = 3;
};

/// Throws Error for a negative threshold or a custom policy without a callback.
void check(const TrainerConfig& config);

/// Predicted and truth values have kinds that cannot be compared.
class TypeMismatch : public Error {
 public:
  using Error::Error;
};

/// Regression: |predicted - truth| > threshold. Otherwise canonical text inequality.
bool should_reflect(contract::TaskKind kind, double error_threshold, const Json& predicted, const Json& truth);

struct ReflectionNote {
  std::string source_invocation_id;
  /// Text of the mistake-analysis section, or the whole reply when unmarked.
  std::string analysis;
  /// The whole reply; becomes the invocation's remarks.
  std::string notes;
  TimePoint created_at{};
  std::string call_id;
};

Json note_to_json(const ReflectionNote& note);

/// The reflector replied with nothing usable.
class ReflectionFailure : public Error {
 public:
  using Error::Error;
};

/// Asks `reflector` to analyze a wrong answer, inside a throwaway sub-branch of
/// `fn`'s memory that is dropped afterwards.
ReflectionNote reflect(MockFunction& fn, const MockInvocation& invocation, const Json& truth,
                       backend::ChatBackend& reflector);

/// results <- truth, remarks <- note, flagged as reflected.
void apply_reflection(MemoryBranch& memory, const std::string& invocation_id, const Json& truth,
                      const ReflectionNote& note);

using CorrectnessFn = std::function<bool(const MockInvocation&)>;

/// Bounded-history replacement. Below `limit` the new invocation is appended.
/// Otherwise the oldest invocation that `is_correct` accepts is overwritten in
/// place; failing that, a correct newcomer is discarded and an incorrect one
/// evicts the oldest entry.
void refine_replace(std::vector<MockInvocation>& history, MockInvocation latest, bool latest_correct,
                    std::size_t limit, const CorrectnessFn& is_correct);

/// A stored invocation counts as correct when it was not reflected and its
/// results match its recorded ground truth.
CorrectnessFn stored_correctness(contract::TaskKind kind, double error_threshold);

/// Replaces every invocation with a summary written by `reflector`. No-op on an
/// empty memory; memory is untouched when the call fails. Returns the call id.
std::optional<std::string> refine_compress(MemoryBranch& memory, backend::ChatBackend& reflector);

struct Example {
  Json arguments;
  Json truth;
};

struct EntryOutcome {
  std::size_t index = 0;
  std::optional<std::string> invocation_id;
  std::optional<mockfn::ServedBy> served_by;
  int attempts = 0;
  bool formally_correct_first_try = false;
  std::optional<Json> predicted;
  Json truth;
  std::optional<bool> correct;
  bool reflected = false;
  bool script_invalidated = false;
  bool script_regenerated = false;
  std::optional<std::string> script_fallback;
  std::optional<std::string> error;
  std::vector<std::string> call_ids;
};

struct TrainingReport {
  std::vector<EntryOutcome> entries;
  std::vector<ReflectionNote> reflections;
  std::vector<std::string> compression_call_ids;
  std::vector<std::string> script_generation_errors;
  std::size_t final_memory_size = 0;
  Json to_json() const;
};

Json outcome_to_json(const EntryOutcome& outcome);

/// Sequential training over `examples` into `fn`'s main memory.
TrainingReport train(MockFunction& fn, std::span<const Example> examples, const TrainerConfig& config);

}  // namespace mockingbird::trainer

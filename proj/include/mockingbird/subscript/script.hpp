#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mockingbird/core.hpp"

namespace mockingbird::subscript {

struct SourceLocation {
  int line = 1;
  int column = 1;
};

struct Diagnostic {
  SourceLocation location;
  std::string message;

  /// "line:column: message"
  std::string to_string() const;
};

/// Script source rejected at compile time; carries every diagnostic found.
class CompileError : public Error {
 public:
  explicit CompileError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  /// One diagnostic per line, as fed back to the generator.
  std::string report() const;

 private:
  std::vector<Diagnostic> diagnostics_;
};

enum class FaultKind { missing_field, type_error, arithmetic, budget_exceeded, no_return, output_contract };

std::string to_string(FaultKind kind);

/// Runtime failure of a compiled script.
class ScriptFault : public Error {
 public:
  ScriptFault(FaultKind kind, SourceLocation location, const std::string& message);
  FaultKind kind() const noexcept { return kind_; }
  SourceLocation location() const noexcept { return location_; }

 private:
  FaultKind kind_;
  SourceLocation location_;
};

/// Compiled, immutable form of a script. Execution is re-entrant.
class Program;

std::shared_ptr<const Program> compile(std::string_view source);

struct ExecutionLimits {
  std::uint64_t max_steps = 1'000'000;
};

/// Runs the program with `args` bound to the variable `args`; returns the value
/// of the executed `return` statement.
Json run(const Program& program, const Json& args, ExecutionLimits limits = {});

/// Steps consumed by the last `run` on this thread; for diagnostics and tests.
std::uint64_t last_step_count();

/// Language summary included in generation prompts.
std::string_view dialect_reference();

/// Source inside the first ``` fenced block of `reply`, or the whole reply if none.
std::string extract_source(std::string_view reply);

}  // namespace mockingbird::subscript

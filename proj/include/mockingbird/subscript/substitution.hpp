#pragma once

#include <memory>
#include <string>

#include "mockingbird/subscript/script.hpp"

namespace mockingbird::subscript {

struct SubstitutionScript {
  std::string source;
  std::shared_ptr<const Program> executable;
  bool valid = false;
  int generation_attempts = 0;
  TimePoint generated_at{};
};

/// Compiles `source`; throws CompileError. The result is valid.
SubstitutionScript make_script(std::string source, int generation_attempts, TimePoint generated_at);

/// Output of a script run after the shape check, keys already lowercased.
struct ScriptOutput {
  std::string remarks;
  Json results;
  bool ready = false;
};

/// Runs a valid script. Shape problems throw ScriptFault(output_contract).
ScriptOutput execute_script(const SubstitutionScript& script, const Json& args, ExecutionLimits limits = {});

}  // namespace mockingbird::subscript

#include "mockingbird/subscript/substitution.hpp"

#include "ast.hpp"

namespace mockingbird::subscript {

std::string Diagnostic::to_string() const {
  return std::to_string(location.line) + ":" + std::to_string(location.column) + ": " + message;
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += d.to_string();
  }
  return out;
}

}  // namespace

CompileError::CompileError(std::vector<Diagnostic> diagnostics)
    : Error("script failed to compile:\n" + join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::string CompileError::report() const { return join_diagnostics(diagnostics_); }

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::missing_field: return "missing_field";
    case FaultKind::type_error: return "type_error";
    case FaultKind::arithmetic: return "arithmetic";
    case FaultKind::budget_exceeded: return "budget_exceeded";
    case FaultKind::no_return: return "no_return";
    case FaultKind::output_contract: return "output_contract";
  }
  return "unknown";
}

ScriptFault::ScriptFault(FaultKind kind, SourceLocation location, const std::string& message)
    : Error(to_string(kind) + " at " + std::to_string(location.line) + ":" + std::to_string(location.column) + ": " +
            message),
      kind_(kind),
      location_(location) {}

std::string_view dialect_reference() {
  return R"(Script language reference
- The input document is bound to the variable `args`. Read fields with `args.name` or `args["name"]`.
  Reading a field that is absent is a runtime fault; use has(obj, "key") or get(obj, "key", fallback) for optional fields.
- Statements: `let x = expr;`  `x = expr;`  `if (cond) { ... } else if (cond) { ... } else { ... }`
  `while (cond) { ... }`  `for (item in array_or_object) { ... }`  `break;`  `continue;`  `return expr;`
- Expressions: literals (numbers, "strings", true, false, null, [arrays], {"objects": 1}),
  arithmetic + - * / % (`/` always yields a fractional number), comparison < <= > >= == !=,
  logic && || !, and the conditional `cond ? a : b`. Conditions must be booleans.
  `+` also concatenates two strings or two arrays.
- Built-in functions: has get len lower upper trim contains starts_with ends_with replace split join
  str num int floor ceil round abs sqrt pow exp log min max clamp is_null type keys push.
- There is no I/O, no clock and no randomness. Execution is limited to one million steps.
- The script must end by returning an object with exactly these keys:
  return {"Remarks": "short reasoning", "Results": <value matching the return contract>, "IsReadyToCompile": true};
  Return "IsReadyToCompile": false when the input cannot be decided by the script.

Example:
  let odor = lower(args.odor);
  let poisonous = odor == "foul" || odor == "fishy";
  return {"Remarks": "Decided by odor.", "Results": poisonous ? "Poisonous" : "Edible", "IsReadyToCompile": true};
)";
}

std::string extract_source(std::string_view reply) {
  auto open = reply.find("```");
  if (open == std::string_view::npos) return std::string(reply);
  auto body = reply.find('\n', open);
  if (body == std::string_view::npos) return std::string(reply);
  ++body;
  auto close = reply.find("```", body);
  if (close == std::string_view::npos) return std::string(reply.substr(body));
  return std::string(reply.substr(body, close - body));
}

SubstitutionScript make_script(std::string source, int generation_attempts, TimePoint generated_at) {
  SubstitutionScript script;
  script.executable = compile(source);
  script.source = std::move(source);
  script.valid = true;
  script.generation_attempts = generation_attempts;
  script.generated_at = generated_at;
  return script;
}

ScriptOutput execute_script(const SubstitutionScript& script, const Json& args, ExecutionLimits limits) {
  if (!script.valid || !script.executable) {
    throw ScriptFault(FaultKind::output_contract, {}, "script is not valid");
  }
  Json out = run(*script.executable, args, limits);
  auto fault = [](const std::string& msg) { throw ScriptFault(FaultKind::output_contract, {}, msg); };
  if (!out.is_object()) fault("script must return an object, got " + value_kind(out));
  for (const char* key : {"Remarks", "Results", "IsReadyToCompile"}) {
    if (!out.contains(key)) fault(std::string("script output is missing \"") + key + "\"");
  }
  for (const auto& [key, _] : out.items()) {
    if (key != "Remarks" && key != "Results" && key != "IsReadyToCompile") {
      fault("script output has unexpected key \"" + key + "\"");
    }
  }
  if (!out["IsReadyToCompile"].is_boolean()) fault("\"IsReadyToCompile\" must be a boolean");
  ScriptOutput result;
  const auto& remarks = out["Remarks"];
  result.remarks = remarks.is_string() ? remarks.get<std::string>() : remarks.dump();
  result.results = std::move(out["Results"]);
  result.ready = out["IsReadyToCompile"].get<bool>();
  return result;
}

}  // namespace mockingbird::subscript

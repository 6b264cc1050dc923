#pragma once

#include <string>
#include <string_view>

namespace mockingbird::prompts {

/// Bumped whenever any wording below changes; recorded in operation logs.
inline constexpr std::string_view kCatalogVersion = "mockingbird-prompts/1";

/// Role-play directive heading the system prompt of every mock function.
std::string role_play_directive(std::string_view function_name, std::string_view documentation);

/// Sent after a response that failed schema validation; `report` lists "path: reason" lines.
std::string correction_request(std::string_view report);

/// Reflection instruction issued in a sub-branch after a wrong result.
std::string reflection_request(std::string_view wrong_results, std::string_view wrong_reasoning,
                               std::string_view ground_truth);

/// Instruction appended to the context to obtain a summary of the history.
std::string compression_request();

/// Message that stands in for the invocations removed by compression.
std::string compressed_notes(std::string_view summary);
inline constexpr std::string_view kCompressedNotesPreamble =
    "Summary of what you learned from earlier invocations:";

/// Instruction asking for a substitution script.
std::string script_request(std::string_view function_name, std::string_view documentation,
                           std::string_view parameter_schema, std::string_view response_schema,
                           std::string_view dialect_reference);

/// Compiler diagnostics fed back after a script failed to compile.
std::string script_diagnostics(std::string_view diagnostics);

/// Block of reference documents placed right after the system prompt.
std::string reference_material(int level, std::string_view body);

}  // namespace mockingbird::prompts

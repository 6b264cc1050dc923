#include "mockingbird/prompts.hpp"

namespace mockingbird::prompts {

std::string role_play_directive(std::string_view function_name, std::string_view documentation) {
  std::string out;
  out += "You are role-playing the function `";
  out += function_name;
  out += "`. The function has no body: you are its implementation.\n";
  out += "Each user message carries the arguments of one invocation as a JSON document. ";
  out += "Reply with exactly one JSON document holding the return value of that invocation.\n";
  if (!documentation.empty()) {
    out += "\nDocumentation of `";
    out += function_name;
    out += "`:\n";
    out += documentation;
    out += "\n";
  }
  return out;
}

std::string correction_request(std::string_view report) {
  std::string out = "Your previous reply was rejected because it does not conform to the response schema:\n";
  out += report;
  if (!report.empty() && report.back() != '\n') out += "\n";
  out += "Reply again with a single JSON document that conforms to the response schema. "
         "Do not add any text outside the JSON document.";
  return out;
}

std::string reflection_request(std::string_view wrong_results, std::string_view wrong_reasoning,
                               std::string_view ground_truth) {
  std::string out = "The result you gave for the last invocation is wrong.\n";
  out += "Your result: ";
  out += wrong_results;
  out += "\nYour reasoning: ";
  out += wrong_reasoning;
  out += "\nThe correct result: ";
  out += ground_truth;
  out += "\n\nUnder a heading \"Mistake Analysis\", explain what in the arguments led you astray. ";
  out += "Under a heading \"Notes for Future Reference\", write specific rules, with values from the arguments, ";
  out += "that decide cases like this one correctly. ";
  out += "Begin by restating your result and the correct one. Reply in plain text, not JSON.";
  return out;
}

std::string compression_request() {
  return "The conversation above holds your earlier invocations, including corrected answers and the lessons you "
         "wrote down about them.\n"
         "Condense all of it into one self-contained summary that will replace these invocations in your context. "
         "Keep every rule, threshold and worked example that changes an answer; drop everything else.";
}

std::string compressed_notes(std::string_view summary) {
  std::string out(kCompressedNotesPreamble);
  out += "\n";
  out += summary;
  return out;
}

std::string script_request(std::string_view function_name, std::string_view documentation,
                           std::string_view parameter_schema, std::string_view response_schema,
                           std::string_view dialect_reference) {
  std::string out = "Write a substitution script that reproduces the behavior of `";
  out += function_name;
  out += "` as you have learned it from the invocations above.\n";
  if (!documentation.empty()) {
    out += "\nDocumentation:\n";
    out += documentation;
    out += "\n";
  }
  out += "\nArguments arrive in the variable `args`, a JSON object following this schema:\n";
  out += parameter_schema;
  out += "\n\nThe value placed in \"Results\" must follow the \"results\" member of this schema:\n";
  out += response_schema;
  out += "\n\nThe script must return an object with the members \"Remarks\" (string), \"Results\" and "
         "\"IsReadyToCompile\" (boolean). Set \"IsReadyToCompile\" to false when the arguments are insufficient "
         "for the script to decide.\n\n";
  out += dialect_reference;
  out += "\n\nReply with the script source only, inside a single ``` code block.";
  return out;
}

std::string script_diagnostics(std::string_view diagnostics) {
  std::string out = "The script failed to compile:\n";
  out += diagnostics;
  if (!diagnostics.empty() && diagnostics.back() != '\n') out += "\n";
  out += "Fix these errors and reply with the complete corrected script inside a single ``` code block.";
  return out;
}

std::string reference_material(int level, std::string_view body) {
  std::string out = "Reference material (level " + std::to_string(level) + "). ";
  out += "Use it when reasoning about invocations:\n\n";
  out += body;
  return out;
}

}  // namespace mockingbird::prompts

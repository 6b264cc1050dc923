#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mockingbird/contract/contract.hpp"

namespace mockingbird::contract {

inline constexpr std::string_view kSchemaDialect = "https://json-schema.org/draft/2020-12/schema";

/// A JSON Schema document (draft 2020-12). Immutable once built.
class SchemaDoc {
 public:
  SchemaDoc() = default;
  explicit SchemaDoc(Json doc) : doc_(std::move(doc)) {}

  const Json& json() const noexcept { return doc_; }
  /// Pretty-printed form embedded verbatim in prompts.
  std::string serialize() const { return doc_.dump(2); }

  friend bool operator==(const SchemaDoc&, const SchemaDoc&) = default;

 private:
  Json doc_;
};

SchemaDoc build_parameter_schema(const FunctionContract& contract);

/// Object with exactly "remarks" (reasoning) then "results" (shaped by the return spec).
SchemaDoc build_response_schema(const FunctionContract& contract);

/// Schema node for a single value spec.
Json value_schema(const ValueSpec& spec);

struct Violation {
  std::string path;
  std::string reason;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  /// One "path: reason" line per violation.
  std::string report() const;
};

/// Checks `doc` against the keyword subset this library emits:
/// type, enum, minimum, maximum, properties, required, additionalProperties, items.
ValidationResult validate(const SchemaDoc& schema, const Json& doc);

/// Parses `text` first; unparseable text yields a single root violation "not valid JSON".
ValidationResult validate_response(const SchemaDoc& schema, std::string_view text);

/// Appends an escaped reference token to a JSON pointer.
std::string pointer_append(const std::string& base, std::string_view token);

}  // namespace mockingbird::contract

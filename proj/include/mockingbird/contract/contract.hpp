#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/core.hpp"

namespace mockingbird::contract {

enum class ValueType { boolean, integer, number, string, enumeration, object, array };
enum class TaskKind { classification, regression, generic };

std::string to_string(ValueType type);
std::string to_string(TaskKind kind);
ValueType value_type_from_string(const std::string& name);
TaskKind task_kind_from_string(const std::string& name);

/// Raised when a contract breaks its own invariants.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Raised when a document does not fit the contract; `path` is a JSON pointer.
class ContractViolation : public Error {
 public:
  ContractViolation(std::string path, const std::string& reason);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct NumericRange {
  double min = 0.0;
  double max = 0.0;
};

struct ParamSpec;

struct ValueSpec {
  ValueType type = ValueType::string;
  std::string description;
  std::optional<NumericRange> range;
  /// Non-empty iff type == enumeration.
  std::vector<std::string> enum_values;
  /// Members of an object value, in declaration order.
  std::vector<ParamSpec> properties;
  /// Element spec of an array value.
  std::shared_ptr<const ValueSpec> items;
};

struct ParamSpec {
  std::string name;
  ValueSpec value;
  bool required = true;
};

/// Declared signature and documentation of a function that has no body.
struct FunctionContract {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  ValueSpec return_spec;
  TaskKind task_kind = TaskKind::generic;
};

/// Throws ContractError naming the first broken invariant.
void check(const FunctionContract& contract);

/// Declarative form:
///   {"name": ..., "description": ..., "task": "classification",
///    "params": [{"name": ..., "type": ..., "description": ..., "required": true,
///                "minimum": .., "maximum": .., "enum": [...], "properties": [...], "items": {...}}],
///    "returns": {"type": ..., ...}}
FunctionContract contract_from_json(const Json& doc);
Json contract_to_json(const FunctionContract& contract);
FunctionContract load_contract(const std::string& path);

}  // namespace mockingbird::contract

#include "mockingbird/contract/arguments.hpp"

namespace mockingbird::contract {

namespace {

Json reorder(const std::vector<ParamSpec>& members, const Json& obj) {
  Json out = Json::object();
  for (const auto& m : members) {
    if (auto it = obj.find(m.name); it != obj.end()) out[m.name] = canonicalize_value(m.value, *it);
  }
  return out;
}

}  // namespace

Json canonicalize_value(const ValueSpec& spec, const Json& value) {
  if (spec.type == ValueType::object && value.is_object()) return reorder(spec.properties, value);
  if (spec.type == ValueType::array && value.is_array() && spec.items) {
    Json out = Json::array();
    for (const auto& e : value) out.push_back(canonicalize_value(*spec.items, e));
    return out;
  }
  return value;
}

Json render_arguments(const FunctionContract& contract, const Json& args) {
  auto result = validate(build_parameter_schema(contract), args);
  if (!result.ok()) throw ContractViolation(result.violations.front().path, result.violations.front().reason);
  return reorder(contract.params, args);
}

}  // namespace mockingbird::contract

#include "mockingbird/contract/contract.hpp"

#include <fstream>
#include <set>

namespace mockingbird::contract {

namespace {

struct TypeName {
  ValueType type;
  const char* name;
};

constexpr TypeName kTypeNames[] = {
    {ValueType::boolean, "boolean"}, {ValueType::integer, "integer"},     {ValueType::number, "number"},
    {ValueType::string, "string"},   {ValueType::enumeration, "enum"},    {ValueType::object, "object"},
    {ValueType::array, "array"},
};

bool is_numeric(ValueType t) { return t == ValueType::integer || t == ValueType::number; }

void check_value(const ValueSpec& spec, const std::string& where) {
  if (spec.type == ValueType::enumeration) {
    if (spec.enum_values.empty()) throw ContractError(where + ": enum type requires at least one value");
    std::set<std::string> seen;
    for (const auto& v : spec.enum_values) {
      if (!seen.insert(v).second) throw ContractError(where + ": duplicate enum value '" + v + "'");
    }
  } else if (!spec.enum_values.empty()) {
    throw ContractError(where + ": enum values given for non-enum type " + to_string(spec.type));
  }
  if (spec.range) {
    if (!is_numeric(spec.type)) throw ContractError(where + ": range given for non-numeric type");
    if (spec.range->min > spec.range->max) throw ContractError(where + ": range minimum exceeds maximum");
  }
  if (spec.type == ValueType::object) {
    std::set<std::string> names;
    for (const auto& p : spec.properties) {
      if (p.name.empty()) throw ContractError(where + ": empty property name");
      if (!names.insert(p.name).second) throw ContractError(where + ": duplicate property '" + p.name + "'");
      check_value(p.value, where + "." + p.name);
    }
  } else if (!spec.properties.empty()) {
    throw ContractError(where + ": properties given for non-object type");
  }
  if (spec.type == ValueType::array) {
    if (!spec.items) throw ContractError(where + ": array type requires an item spec");
    check_value(*spec.items, where + "[]");
  } else if (spec.items) {
    throw ContractError(where + ": item spec given for non-array type");
  }
}

ValueSpec value_from_json(const Json& doc, const std::string& where);

ParamSpec param_from_json(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ContractError(where + ": parameter must be an object");
  ParamSpec p;
  p.name = doc.value("name", std::string{});
  p.required = doc.value("required", true);
  p.value = value_from_json(doc, where + "." + p.name);
  return p;
}

ValueSpec value_from_json(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ContractError(where + ": value spec must be an object");
  if (!doc.contains("type") || !doc["type"].is_string()) throw ContractError(where + ": missing \"type\"");
  ValueSpec v;
  try {
    v.type = value_type_from_string(doc["type"].get<std::string>());
  } catch (const ContractError& e) {
    throw ContractError(where + ": " + e.what());
  }
  v.description = doc.value("description", std::string{});
  bool has_min = doc.contains("minimum");
  bool has_max = doc.contains("maximum");
  if (has_min != has_max) throw ContractError(where + ": range needs both minimum and maximum");
  if (has_min) v.range = NumericRange{doc["minimum"].get<double>(), doc["maximum"].get<double>()};
  if (doc.contains("enum")) v.enum_values = doc["enum"].get<std::vector<std::string>>();
  if (doc.contains("properties")) {
    for (const auto& p : doc["properties"]) v.properties.push_back(param_from_json(p, where));
  }
  if (doc.contains("items")) v.items = std::make_shared<const ValueSpec>(value_from_json(doc["items"], where + "[]"));
  return v;
}

Json value_to_json(const ValueSpec& v);

Json param_to_json(const ParamSpec& p) {
  Json out;
  out["name"] = p.name;
  auto value = value_to_json(p.value);
  for (auto& [k, val] : value.items()) out[k] = val;
  out["required"] = p.required;
  return out;
}

Json value_to_json(const ValueSpec& v) {
  Json out;
  out["type"] = to_string(v.type);
  if (!v.description.empty()) out["description"] = v.description;
  if (v.range) {
    out["minimum"] = v.range->min;
    out["maximum"] = v.range->max;
  }
  if (!v.enum_values.empty()) out["enum"] = v.enum_values;
  if (v.type == ValueType::object) {
    out["properties"] = Json::array();
    for (const auto& p : v.properties) out["properties"].push_back(param_to_json(p));
  }
  if (v.items) out["items"] = value_to_json(*v.items);
  return out;
}

}  // namespace

ContractViolation::ContractViolation(std::string path, const std::string& reason)
    : Error("contract violation at " + (path.empty() ? std::string("/") : path) + ": " + reason),
      path_(std::move(path)) {}

std::string to_string(ValueType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification: return "classification";
    case TaskKind::regression: return "regression";
    case TaskKind::generic: return "generic";
  }
  return "generic";
}

ValueType value_type_from_string(const std::string& name) {
  for (const auto& [t, n] : kTypeNames) {
    if (name == n) return t;
  }
  if (name == "enumeration") return ValueType::enumeration;
  throw ContractError("unknown value type '" + name + "'");
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "classification") return TaskKind::classification;
  if (name == "regression") return TaskKind::regression;
  if (name == "generic") return TaskKind::generic;
  throw ContractError("unknown task kind '" + name + "'");
}

void check(const FunctionContract& contract) {
  if (contract.name.empty()) throw ContractError("function name is empty");
  std::set<std::string> names;
  bool all_described = true;
  for (const auto& p : contract.params) {
    if (p.name.empty()) throw ContractError("parameter with empty name");
    if (!names.insert(p.name).second) throw ContractError("duplicate parameter '" + p.name + "'");
    if (p.value.description.empty()) all_described = false;
    check_value(p.value, p.name);
  }
  if (contract.description.empty() && !all_described) {
    throw ContractError("function '" + contract.name +
                        "' has no description and at least one parameter is undocumented");
  }
  check_value(contract.return_spec, "return");
}

FunctionContract contract_from_json(const Json& doc) {
  if (!doc.is_object()) throw ContractError("contract document must be an object");
  FunctionContract c;
  try {
    c.name = doc.at("name").get<std::string>();
    c.description = doc.value("description", std::string{});
    c.task_kind = task_kind_from_string(doc.value("task", std::string("generic")));
    if (doc.contains("params")) {
      for (const auto& p : doc["params"]) c.params.push_back(param_from_json(p, "params"));
    }
    if (!doc.contains("returns")) throw ContractError("missing \"returns\"");
    c.return_spec = value_from_json(doc["returns"], "returns");
  } catch (const Json::exception& e) {
    throw ContractError(std::string("malformed contract document: ") + e.what());
  }
  check(c);
  return c;
}

Json contract_to_json(const FunctionContract& contract) {
  Json out;
  out["name"] = contract.name;
  out["description"] = contract.description;
  out["task"] = to_string(contract.task_kind);
  out["params"] = Json::array();
  for (const auto& p : contract.params) out["params"].push_back(param_to_json(p));
  out["returns"] = value_to_json(contract.return_spec);
  return out;
}

FunctionContract load_contract(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open contract file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ContractError("contract file " + path + " is not valid JSON: " + e.what());
  }
  return contract_from_json(doc);
}

}  // namespace mockingbird::contract

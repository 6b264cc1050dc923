#include "mockingbird/contract/schema.hpp"

#include <cmath>

namespace mockingbird::contract {

namespace {

constexpr const char* kRemarksDescription =
    "Your reasoning for this invocation. Write it before deciding the value of \"results\".";
constexpr const char* kResultsDescription = "The return value of the function.";

Json object_schema(const std::vector<ParamSpec>& members) {
  Json node;
  node["type"] = "object";
  Json props = Json::object();
  Json required = Json::array();
  for (const auto& m : members) {
    props[m.name] = value_schema(m.value);
    if (m.required) required.push_back(m.name);
  }
  node["properties"] = std::move(props);
  node["required"] = std::move(required);
  node["additionalProperties"] = false;
  return node;
}

std::string kind_of(const Json& doc) {
  switch (doc.type()) {
    case Json::value_t::object: return "object";
    case Json::value_t::array: return "array";
    case Json::value_t::string: return "string";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned: return "integer";
    case Json::value_t::number_float: return "number";
    case Json::value_t::null: return "null";
    default: return "unknown";
  }
}

bool matches_type(const std::string& type, const Json& doc) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "boolean") return doc.is_boolean();
  if (type == "number") return doc.is_number();
  if (type == "null") return doc.is_null();
  if (type == "integer") {
    if (doc.is_number_integer()) return true;
    if (doc.is_number_float()) {
      double v = doc.get<double>();
      return std::isfinite(v) && std::floor(v) == v;
    }
    return false;
  }
  return true;
}

std::string number_text(const Json& n) { return n.dump(); }

void walk(const Json& node, const Json& doc, const std::string& path, std::vector<Violation>& out) {
  if (!node.is_object()) return;

  if (auto it = node.find("type"); it != node.end() && it->is_string()) {
    const auto type = it->get<std::string>();
    if (!matches_type(type, doc)) {
      out.push_back({path, "expected " + type + ", got " + kind_of(doc)});
      return;
    }
  }

  if (auto it = node.find("enum"); it != node.end() && it->is_array()) {
    bool found = false;
    for (const auto& allowed : *it) {
      if (allowed == doc) {
        found = true;
        break;
      }
    }
    if (!found) out.push_back({path, "value " + doc.dump() + " is not one of " + it->dump()});
  }

  if (doc.is_number()) {
    double v = doc.get<double>();
    if (auto it = node.find("minimum"); it != node.end() && it->is_number() && v < it->get<double>()) {
      out.push_back({path, "value " + doc.dump() + " is below minimum " + number_text(*it)});
    }
    if (auto it = node.find("maximum"); it != node.end() && it->is_number() && v > it->get<double>()) {
      out.push_back({path, "value " + doc.dump() + " is above maximum " + number_text(*it)});
    }
  }

  if (doc.is_object()) {
    const Json* props = nullptr;
    if (auto it = node.find("properties"); it != node.end() && it->is_object()) props = &*it;

    if (auto it = node.find("required"); it != node.end() && it->is_array()) {
      for (const auto& name : *it) {
        if (name.is_string() && !doc.contains(name.get<std::string>())) {
          out.push_back({pointer_append(path, name.get<std::string>()), "required property is missing"});
        }
      }
    }
    for (const auto& [key, value] : doc.items()) {
      if (props && props->contains(key)) {
        walk((*props)[key], value, pointer_append(path, key), out);
        continue;
      }
      if (auto it = node.find("additionalProperties"); it != node.end()) {
        if (it->is_boolean() && !it->get<bool>()) {
          out.push_back({pointer_append(path, key), "property is not declared by the schema"});
        } else if (it->is_object()) {
          walk(*it, value, pointer_append(path, key), out);
        }
      }
    }
  }

  if (doc.is_array()) {
    if (auto it = node.find("items"); it != node.end() && it->is_object()) {
      for (std::size_t i = 0; i < doc.size(); ++i) walk(*it, doc[i], pointer_append(path, std::to_string(i)), out);
    }
  }
}

}  // namespace

Json value_schema(const ValueSpec& spec) {
  Json node;
  switch (spec.type) {
    case ValueType::object: node = object_schema(spec.properties); break;
    case ValueType::array:
      node["type"] = "array";
      node["items"] = spec.items ? value_schema(*spec.items) : Json::object();
      break;
    case ValueType::enumeration:
      node["type"] = "string";
      node["enum"] = spec.enum_values;
      break;
    default: node["type"] = to_string(spec.type); break;
  }
  if (!spec.description.empty()) node["description"] = spec.description;
  if (spec.range) {
    node["minimum"] = spec.range->min;
    node["maximum"] = spec.range->max;
  }
  return node;
}

SchemaDoc build_parameter_schema(const FunctionContract& contract) {
  Json doc;
  doc["$schema"] = kSchemaDialect;
  doc["title"] = contract.name + ".parameters";
  if (!contract.description.empty()) doc["description"] = contract.description;
  auto params = object_schema(contract.params);
  for (auto& [k, v] : params.items()) doc[k] = v;
  return SchemaDoc(std::move(doc));
}

SchemaDoc build_response_schema(const FunctionContract& contract) {
  Json remarks;
  remarks["type"] = "string";
  remarks["description"] = kRemarksDescription;

  Json results = value_schema(contract.return_spec);
  if (!results.contains("description")) results["description"] = kResultsDescription;

  Json doc;
  doc["$schema"] = kSchemaDialect;
  doc["title"] = contract.name + ".response";
  doc["type"] = "object";
  doc["properties"] = Json::object();
  doc["properties"]["remarks"] = std::move(remarks);
  doc["properties"]["results"] = std::move(results);
  doc["required"] = Json::array({"remarks", "results"});
  doc["additionalProperties"] = false;
  return SchemaDoc(std::move(doc));
}

std::string ValidationResult::report() const {
  std::string out;
  for (const auto& v : violations) {
    out += (v.path.empty() ? std::string("/") : v.path) + ": " + v.reason + "\n";
  }
  return out;
}

ValidationResult validate(const SchemaDoc& schema, const Json& doc) {
  ValidationResult result;
  walk(schema.json(), doc, "", result.violations);
  return result;
}

ValidationResult validate_response(const SchemaDoc& schema, std::string_view text) {
  Json doc = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return ValidationResult{{Violation{"", "not valid JSON"}}};
  return validate(schema, doc);
}

std::string pointer_append(const std::string& base, std::string_view token) {
  std::string out = base;
  out.push_back('/');
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace mockingbird::contract

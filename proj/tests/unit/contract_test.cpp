#include <gtest/gtest.h>

#include "mockingbird/contract/arguments.hpp"
#include "support.hpp"

using namespace mockingbird;
using namespace mockingbird::contract;

namespace {

bool accepts(const SchemaDoc& schema, const Json& doc) { return validate(schema, doc).ok(); }

// Both validators must reach the same verdict on each sample.
void expect_oracle_agrees(const SchemaDoc& schema, const std::vector<Json>& samples,
                          const std::vector<bool>& expected) {
  std::vector<std::string> texts;
  for (const auto& s : samples) texts.push_back(s.dump());
  auto reference = mbtest::reference_verdicts(schema.json(), texts);
  ASSERT_TRUE(reference.has_value()) << "python jsonschema oracle unavailable";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ((*reference)[i], expected[i]) << "oracle on " << texts[i];
    EXPECT_EQ(accepts(schema, samples[i]), expected[i]) << "validator on " << texts[i];
  }
}

}  // namespace

TEST(Contract, FromJsonRoundTrip) {
  auto doc = Json::parse(R"({
    "name": "F", "description": "d", "task": "regression",
    "params": [
      {"name": "a", "type": "integer", "minimum": 0, "maximum": 9},
      {"name": "b", "type": "object", "required": false,
       "properties": [{"name": "c", "type": "enum", "enum": ["x", "y"]}]},
      {"name": "l", "type": "array", "items": {"type": "string"}}
    ],
    "returns": {"type": "number"}})");
  auto c = contract_from_json(doc);
  EXPECT_EQ(c.task_kind, TaskKind::regression);
  ASSERT_EQ(c.params.size(), 3u);
  EXPECT_FALSE(c.params[1].required);
  EXPECT_EQ(c.params[1].value.properties[0].value.enum_values, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(contract_from_json(contract_to_json(c)).params[2].value.items->type, ValueType::string);
  EXPECT_EQ(contract_to_json(contract_from_json(contract_to_json(c))), contract_to_json(c));
}

TEST(Contract, CheckRejectsBrokenInvariants) {
  auto c = mbtest::iris_contract();
  c.params.push_back(c.params.front());
  EXPECT_THROW(check(c), ContractError);

  c = mbtest::iris_contract();
  c.return_spec.enum_values.clear();
  EXPECT_THROW(check(c), ContractError);

  c = mbtest::iris_contract();
  c.params[0].value.range = NumericRange{5, 1};
  EXPECT_THROW(check(c), ContractError);

  c = mbtest::iris_contract();
  c.name.clear();
  EXPECT_THROW(check(c), ContractError);

  EXPECT_THROW(contract_from_json(Json::parse(R"({"name":"F","params":[],"returns":{"type":"decimal"}})")),
               ContractError);
}

TEST(Schema, ZeroParamsGiveEmptyObjectSchema) {
  FunctionContract c;
  c.name = "Nothing";
  c.return_spec.type = ValueType::boolean;
  auto s = build_parameter_schema(c).json();
  EXPECT_EQ(s["type"], "object");
  EXPECT_TRUE(s["properties"].empty());
  EXPECT_TRUE(s["required"].is_array());
  EXPECT_TRUE(s["required"].empty());
}

TEST(Schema, EnumParamAgreesWithReferenceValidator) {
  auto schema = build_parameter_schema(mbtest::survival_contract());
  EXPECT_EQ(schema.json()["properties"]["sex"]["enum"], Json::array({"male", "female"}));
  expect_oracle_agrees(schema,
                       {Json{{"sex", "male"}, {"pclass", 1}}, Json{{"sex", "other"}, {"pclass", 1}},
                        Json{{"sex", "female"}, {"pclass", 3}, {"age", 30}}, Json{{"pclass", 3}}},
                       {true, false, true, false});
}

TEST(Schema, RangedParamAgreesWithReferenceValidator) {
  auto schema = build_parameter_schema(mbtest::survival_contract());
  const auto& age = schema.json()["properties"]["age"];
  EXPECT_EQ(age["minimum"], 0);
  EXPECT_EQ(age["maximum"], 120);
  auto with_age = [](Json age_value) { return Json{{"sex", "male"}, {"pclass", 2}, {"age", age_value}}; };
  expect_oracle_agrees(schema, {with_age(0), with_age(120), with_age(120.5), with_age(-1), with_age("30")},
                       {true, true, false, false, false});
}

TEST(Schema, BooleanResponseSchema) {
  auto s = build_response_schema(mbtest::survival_contract()).json();
  EXPECT_EQ(s["required"], Json::array({"remarks", "results"}));
  EXPECT_EQ(s["properties"]["remarks"]["type"], "string");
  EXPECT_EQ(s["properties"]["results"]["type"], "boolean");
  auto keys = s["properties"].items().begin();
  EXPECT_EQ(keys.key(), "remarks");
}

TEST(Schema, EnumResponseAgreesWithReferenceValidator) {
  FunctionContract c;
  c.name = "HorseOutcome";
  c.return_spec.type = ValueType::enumeration;
  c.return_spec.enum_values = {"Lived", "Died", "Euthanized"};
  auto schema = build_response_schema(c);
  EXPECT_EQ(schema.json()["properties"]["results"]["enum"], Json::array({"Lived", "Died", "Euthanized"}));
  expect_oracle_agrees(schema,
                       {Json{{"remarks", "r"}, {"results", "Died"}}, Json{{"remarks", "r"}, {"results", "Dead"}},
                        Json{{"remarks", "r"}, {"results", 1}}, Json{{"results", "Lived"}}},
                       {true, false, false, false});
}

TEST(Schema, NestedObjectResponseAgreesWithReferenceValidator) {
  auto c = contract_from_json(Json::parse(R"({
    "name": "Iris", "params": [],
    "returns": {"type": "object", "properties": [
      {"name": "species", "type": "enum", "enum": ["Setosa", "Virginica"]},
      {"name": "confidence", "type": "number", "minimum": 0, "maximum": 1}]}})"));
  auto schema = build_response_schema(c);
  const auto& results = schema.json()["properties"]["results"];
  EXPECT_EQ(results["properties"]["species"]["enum"], Json::array({"Setosa", "Virginica"}));
  EXPECT_EQ(results["properties"]["confidence"]["type"], "number");
  auto doc = [](Json results_value) { return Json{{"remarks", "r"}, {"results", results_value}}; };
  expect_oracle_agrees(schema,
                       {doc(Json{{"species", "Setosa"}, {"confidence", 0.9}}),
                        doc(Json{{"species", "Setosa"}, {"confidence", 1.5}}), doc(Json{{"species", "Setosa"}}),
                        doc(Json{{"species", "Setosa"}, {"confidence", 0.2}, {"extra", 1}})},
                       {true, false, false, false});
}

TEST(Validate, ResponseExamples) {
  auto schema = build_response_schema(mbtest::survival_contract());
  EXPECT_TRUE(validate_response(schema, R"({"remarks":"r","results":true})").ok());

  auto missing = validate_response(schema, R"({"results":true})");
  ASSERT_EQ(missing.violations.size(), 1u);
  EXPECT_EQ(missing.violations[0].path, "/remarks");

  auto wrong_type = validate_response(schema, R"({"remarks":"r","results":"yes"})");
  ASSERT_EQ(wrong_type.violations.size(), 1u);
  EXPECT_EQ(wrong_type.violations[0].path, "/results");
  auto reference = mbtest::reference_verdicts(schema.json(), {R"({"remarks":"r","results":"yes"})"});
  ASSERT_TRUE(reference.has_value());
  EXPECT_FALSE(reference->front());

  auto garbage = validate_response(schema, "I think the passenger lived.");
  ASSERT_EQ(garbage.violations.size(), 1u);
  EXPECT_EQ(garbage.violations[0].path, "");
  EXPECT_NE(garbage.report().find("not valid JSON"), std::string::npos);
}

TEST(Validate, IntegralFloatCountsAsInteger) {
  auto schema = build_parameter_schema(mbtest::survival_contract());
  EXPECT_TRUE(accepts(schema, Json{{"sex", "male"}, {"pclass", 2.0}}));
  EXPECT_FALSE(accepts(schema, Json{{"sex", "male"}, {"pclass", 2.5}}));
}

TEST(Validate, PointerEscapes) {
  EXPECT_EQ(pointer_append("/a", "b/c~d"), "/a/b~1c~0d");
}

TEST(Arguments, DeclarationOrder) {
  auto c = mbtest::survival_contract();
  auto out = render_arguments(c, Json{{"pclass", 1}, {"age", 22.0}, {"sex", "male"}});
  EXPECT_EQ(out.dump(), R"({"sex":"male","age":22.0,"pclass":1})");
}

TEST(Arguments, AbsentOptionalStaysAbsent) {
  auto out = render_arguments(mbtest::survival_contract(), Json{{"pclass", 1}, {"sex", "female"}});
  EXPECT_FALSE(out.contains("age"));
  EXPECT_EQ(out.dump(), R"({"sex":"female","pclass":1})");
}

TEST(Arguments, ExtraKeyRejectedWithPath) {
  auto c = mbtest::survival_contract();
  Json args{{"sex", "male"}, {"pclass", 1}, {"cabin", "C85"}};
  try {
    render_arguments(c, args);
    FAIL() << "extra key accepted";
  } catch (const ContractViolation& v) {
    EXPECT_EQ(v.path(), "/cabin");
  }
  auto reference = mbtest::reference_verdicts(build_parameter_schema(c).json(), {args.dump()});
  ASSERT_TRUE(reference.has_value());
  EXPECT_FALSE(reference->front());
}

TEST(Arguments, NestedKeysReordered) {
  auto c = contract_from_json(Json::parse(R"({
    "name": "F", "description": "Nested object.", "params": [{"name": "o", "type": "object", "properties": [
      {"name": "z", "type": "integer"}, {"name": "a", "type": "integer"}]}],
    "returns": {"type": "boolean"}})"));
  auto out = render_arguments(c, Json::parse(R"({"o":{"a":1,"z":2}})"));
  EXPECT_EQ(out.dump(), R"({"o":{"z":2,"a":1}})");
}

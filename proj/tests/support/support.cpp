#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace mbtest {

using namespace mockingbird;
using contract::FunctionContract;
using contract::ParamSpec;
using contract::ValueSpec;
using contract::ValueType;

namespace {

ParamSpec number_param(const std::string& name, bool required = true) {
  ParamSpec p;
  p.name = name;
  p.value.type = ValueType::number;
  p.required = required;
  return p;
}

ParamSpec text_param(const std::string& name) {
  ParamSpec p;
  p.name = name;
  p.value.type = ValueType::string;
  return p;
}

ValueSpec enum_of(std::vector<std::string> values) {
  ValueSpec v;
  v.type = ValueType::enumeration;
  v.enum_values = std::move(values);
  return v;
}

}  // namespace

FunctionContract iris_contract() {
  FunctionContract c;
  c.name = "ClassifyIris";
  c.description = "Identify the species of an iris flower.";
  for (const char* name : {"sepalLength", "sepalWidth", "petalLength", "petalWidth"}) {
    c.params.push_back(number_param(name, false));
  }
  c.return_spec = enum_of({"Setosa", "Versicolor", "Virginica"});
  c.task_kind = contract::TaskKind::classification;
  return c;
}

FunctionContract mushroom_contract() {
  FunctionContract c;
  c.name = "ClassifyMushroom";
  c.description = "Decide whether a mushroom is edible.";
  for (const char* name : {"capShape", "capSurface", "capColor", "bruises", "odor"}) c.params.push_back(text_param(name));
  c.return_spec = enum_of({"Poisonous", "Edible"});
  c.task_kind = contract::TaskKind::classification;
  return c;
}

FunctionContract survival_contract() {
  FunctionContract c;
  c.name = "PredictSurvival";
  c.description = "Predict whether a passenger survived.";
  ParamSpec sex;
  sex.name = "sex";
  sex.value = enum_of({"male", "female"});
  c.params.push_back(sex);
  ParamSpec age = number_param("age", false);
  age.value.range = contract::NumericRange{0, 120};
  c.params.push_back(age);
  ParamSpec pclass;
  pclass.name = "pclass";
  pclass.value.type = ValueType::integer;
  c.params.push_back(pclass);
  c.return_spec.type = ValueType::boolean;
  c.task_kind = contract::TaskKind::classification;
  return c;
}

FunctionContract price_contract() {
  FunctionContract c;
  c.name = "EstimatePrice";
  c.description = "Estimate the price of a used car.";
  c.params.push_back(number_param("mileage"));
  c.params.push_back(text_param("model"));
  c.return_spec.type = ValueType::number;
  c.task_kind = contract::TaskKind::regression;
  return c;
}

std::string reply(const Json& results, const std::string& remarks) {
  return Json{{"remarks", remarks}, {"results", results}}.dump();
}

backend::ScriptedReply on(backend::UsageCategory category, std::string content) {
  return backend::ScriptedReply::reply(std::move(content), backend::match_category(category));
}

std::shared_ptr<backend::StubBackend> stub(std::vector<backend::ScriptedReply> script) {
  return std::make_shared<backend::StubBackend>(std::move(script));
}

std::shared_ptr<backend::StubBackend> idle_stub() {
  return stub({backend::ScriptedReply::fail(backend::ErrorKind::server)});
}

memory::MockInvocation invocation(const std::string& id, const Json& results, std::optional<Json> truth,
                                  bool reflected) {
  memory::MockInvocation inv;
  inv.id = id;
  inv.arguments = Json{{"n", id}};
  inv.remarks = "r-" + id;
  inv.results = results;
  inv.ground_truth = std::move(truth);
  inv.reflected = reflected;
  return inv;
}

std::vector<std::string> ids_of(const memory::MemoryBranch& branch) {
  std::vector<std::string> out;
  for (const auto& inv : branch.invocations()) out.push_back(inv.id);
  return out;
}

const char* const kIrisScript = R"(let species = "Unknown";
let remarks = "Not enough inputs.";
let ready = true;
if (has(args, "petalLength")) {
  let petal = args.petalLength;
  if (petal < 2.5) {
    species = "Setosa";
    remarks = "Classified as Setosa by petal length.";
  } else if (petal < 5.0) {
    species = "Versicolor";
    remarks = "Classified as Versicolor by petal length.";
  } else {
    species = "Virginica";
    remarks = "Classified as Virginica by petal length.";
  }
} else {
  remarks = "No petal length given.";
  ready = false;
}
return {"Remarks": remarks, "Results": species, "IsReadyToCompile": ready};
)";

const char* const kMushroomScript = R"(let odor = lower(args.odor);
let results = (odor == "foul" || odor == "fishy") ? "Poisonous" : "Edible";
let remarks = "Decided by odor.";
return {"Remarks": remarks, "Results": results, "IsReadyToCompile": true};
)";

// ---------------------------------------------------------------------------

bool SchemaFuzzer::coin(double p) { return std::bernoulli_distribution(p)(rng_); }

int SchemaFuzzer::pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

ValueSpec SchemaFuzzer::value(int depth) {
  ValueSpec v;
  int roll = pick(0, depth > 0 ? 6 : 4);
  switch (roll) {
    case 0: v.type = ValueType::boolean; break;
    case 1:
      v.type = ValueType::integer;
      if (coin(0.5)) v.range = contract::NumericRange{double(pick(-5, 0)), double(pick(1, 10))};
      break;
    case 2:
      v.type = ValueType::number;
      if (coin(0.5)) v.range = contract::NumericRange{-1.5, 2.5};
      break;
    case 3: v.type = ValueType::string; break;
    case 4: {
      v.type = ValueType::enumeration;
      int n = pick(1, 4);
      for (int i = 0; i < n; ++i) v.enum_values.push_back("v" + std::to_string(i));
      break;
    }
    case 5:
      v.type = ValueType::object;
      v.properties = members(depth - 1, 3);
      break;
    default: {
      v.type = ValueType::array;
      v.items = std::make_shared<const ValueSpec>(value(depth - 1));
      break;
    }
  }
  return v;
}

std::vector<ParamSpec> SchemaFuzzer::members(int depth, int max_count) {
  std::vector<ParamSpec> out;
  int n = pick(0, max_count);
  for (int i = 0; i < n; ++i) {
    ParamSpec p;
    p.name = "m" + std::to_string(counter_++);
    p.required = coin(0.7);
    p.value = value(depth);
    out.push_back(std::move(p));
  }
  return out;
}

FunctionContract SchemaFuzzer::contract(int index) {
  FunctionContract c;
  c.name = "Fuzz" + std::to_string(index);
  c.description = "Randomly generated contract.";
  c.params = members(2, 4);
  c.return_spec = value(2);
  return c;
}

Json SchemaFuzzer::instance(const ValueSpec& spec) {
  switch (spec.type) {
    case ValueType::boolean: return coin(0.5);
    case ValueType::integer: {
      if (spec.range) return pick(int(spec.range->min), int(spec.range->max));
      return pick(-100, 100);
    }
    case ValueType::number: {
      if (spec.range) {
        if (coin(0.2)) return coin(0.5) ? spec.range->min : spec.range->max;
        return std::uniform_real_distribution<double>(spec.range->min, spec.range->max)(rng_);
      }
      return std::uniform_real_distribution<double>(-1e3, 1e3)(rng_);
    }
    case ValueType::string: return "s" + std::to_string(pick(0, 99));
    case ValueType::enumeration: return spec.enum_values[std::size_t(pick(0, int(spec.enum_values.size()) - 1))];
    case ValueType::object: {
      Json out = Json::object();
      for (const auto& p : spec.properties) {
        if (p.required || coin(0.5)) out[p.name] = instance(p.value);
      }
      return out;
    }
    case ValueType::array: {
      Json out = Json::array();
      int n = pick(0, 3);
      for (int i = 0; i < n; ++i) out.push_back(instance(*spec.items));
      return out;
    }
  }
  return nullptr;
}

Json SchemaFuzzer::wrong_kind(const Json& value) {
  switch (pick(0, 7)) {
    case 0: return nullptr;
    case 1: return value.is_boolean() ? Json("true") : Json(true);
    case 2: return value.is_string() ? Json(7) : Json("7");
    case 3: return value.is_number_integer() ? Json(2.5) : Json(3);
    case 4: return 4.0;
    case 5: return Json::array({value});
    case 6: return Json{{"x", value}};
    default: return value.is_number() ? Json(value.get<double>() + 1000.0) : Json("v99");
  }
}

Json SchemaFuzzer::mutate(Json doc) {
  if (doc.is_object() && !doc.empty() && coin(0.6)) {
    auto it = doc.begin();
    std::advance(it, pick(0, int(doc.size()) - 1));
    const std::string key = it.key();
    switch (pick(0, 2)) {
      case 0: doc.erase(key); break;
      case 1: doc[key] = mutate(doc[key]); break;
      default: doc[key] = wrong_kind(doc[key]); break;
    }
    return doc;
  }
  if (doc.is_object() && coin(0.3)) {
    doc["extra" + std::to_string(pick(0, 3))] = 1;
    return doc;
  }
  if (doc.is_array() && !doc.empty() && coin(0.6)) {
    auto i = std::size_t(pick(0, int(doc.size()) - 1));
    doc[i] = coin(0.5) ? mutate(doc[i]) : wrong_kind(doc[i]);
    return doc;
  }
  if (doc.is_number() && coin(0.5)) return doc.get<double>() + (coin(0.5) ? 0.5 : -7.0);
  return wrong_kind(doc);
}

std::string SchemaFuzzer::response_text(const FunctionContract& contract) {
  Json doc{{"remarks", "r" + std::to_string(pick(0, 9))}, {"results", instance(contract.return_spec)}};
  int roll = pick(0, 99);
  if (roll < 40) return doc.dump();
  if (roll < 95) return mutate(doc).dump();
  switch (pick(0, 3)) {
    case 0: return "not json";
    case 1: return doc.dump().substr(0, doc.dump().size() / 2);
    case 2: return "[]";
    default: return "\"text\"";
  }
}

// ---------------------------------------------------------------------------

std::optional<std::vector<std::vector<bool>>> reference_verdicts(
    const std::vector<std::pair<Json, std::vector<std::string>>>& groups) {
  namespace fs = std::filesystem;
  static int sequence = 0;
  auto dir = fs::temp_directory_path();
  auto stem = "mb-oracle-" + std::to_string(::getpid()) + "-" + std::to_string(sequence++);
  auto in_path = dir / (stem + ".in.jsonl");
  auto out_path = dir / (stem + ".out");
  {
    std::ofstream in(in_path);
    for (const auto& [schema, texts] : groups) in << Json{{"schema", schema}, {"texts", texts}}.dump() << '\n';
  }
  std::string command = std::string(MB_PYTHON) + " " + MB_ORACLE_SCRIPT + " " + in_path.string() + " " +
                        out_path.string() + " 2>&1";
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return std::nullopt;
  char buf[256];
  std::string noise;
  while (std::fgets(buf, sizeof buf, pipe)) noise += buf;
  int status = ::pclose(pipe);
  fs::remove(in_path);
  if (status != 0) {
    fs::remove(out_path);
    return std::nullopt;
  }
  std::vector<std::vector<bool>> out;
  std::ifstream result(out_path);
  std::string line;
  while (std::getline(result, line)) {
    std::vector<bool> verdicts;
    for (char c : line) verdicts.push_back(c == '1');
    out.push_back(std::move(verdicts));
  }
  fs::remove(out_path);
  if (out.size() != groups.size()) return std::nullopt;
  return out;
}

std::optional<std::vector<bool>> reference_verdicts(const Json& schema, const std::vector<std::string>& texts) {
  auto all = reference_verdicts({{schema, texts}});
  if (!all) return std::nullopt;
  return all->front();
}

}  // namespace mbtest

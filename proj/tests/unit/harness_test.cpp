#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "mockingbird/harness/run.hpp"
#include "mockingbird/prompts.hpp"
#include "support.hpp"

using namespace mockingbird;
using namespace mockingbird::harness;
using backend::UsageCategory;

namespace {

const char* kTenRows =
    "sex,age,pclass,survived\n"
    "female,29,1,true\nmale,,3,false\nfemale,2,1,true\nmale,30,1,false\nfemale,25,1,true\n"
    "male,48,1,true\nfemale,63,1,true\nmale,39,1,false\nfemale,53,1,true\nmale,71,1,false\n";

DatasetSpec passenger_spec() {
  DatasetSpec spec;
  spec.features = {{"sex", "sex"}, {"age", "age"}, {"pclass", "pclass"}};
  spec.label = "survived";
  return spec;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mb-harness-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

RunConfig passenger_run(std::size_t context, const std::string& answer) {
  auto csv = scratch("passengers.csv");
  std::ofstream(csv) << kTenRows;
  RunConfig config;
  config.contract = mbtest::survival_contract();
  config.dataset = passenger_spec();
  config.dataset.path = csv;
  config.context_length = context;
  config.executor.input_price_per_million = 1.0;
  config.executor.output_price_per_million = 2.0;
  config.stub_replies.push_back({answer, UsageCategory::invocation, std::nullopt, std::nullopt, 100});
  config.stub_replies.push_back({"note", UsageCategory::reflection, std::nullopt, std::nullopt, 100});
  return config;
}

}  // namespace

TEST(Csv, QuotedFieldsAndCrlf) {
  auto t = parse_csv("\xEF\xBB\xBFname,text\r\n\"Braund, Mr. Owen\",\"He said \"\"hi\"\"\"\r\n\r\nb,\"multi\nline\"\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"name", "text"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "Braund, Mr. Owen");
  EXPECT_EQ(t.rows[0][1], "He said \"hi\"");
  EXPECT_EQ(t.rows[1][1], "multi\nline");
}

TEST(Csv, WidthMismatchRejected) {
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), CsvError);
  EXPECT_THROW(parse_csv("a,b\n\"open\n"), CsvError);
  EXPECT_THROW(read_csv("/nonexistent/file.csv"), Error);
}

TEST(Dataset, SeededSplitIsStable) {
  auto table = parse_csv(kTenRows);
  auto spec = passenger_spec();
  auto a = build_dataset(table, spec, mbtest::survival_contract());
  auto b = build_dataset(table, spec, mbtest::survival_contract());
  EXPECT_EQ(a.train.size(), 8u);
  EXPECT_EQ(a.eval.size(), 2u);
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].arguments, b.train[i].arguments);
  auto order = split_order(10, 42);
  EXPECT_EQ(order, split_order(10, 42));
  EXPECT_NE(order, split_order(10, 43));
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Dataset, MissingCellOmitsKey) {
  auto table = parse_csv(kTenRows);
  auto spec = passenger_spec();
  spec.train_fraction = 0.5;
  auto data = build_dataset(table, spec, mbtest::survival_contract());
  std::size_t without_age = 0;
  for (const auto& set : {data.train, data.eval}) {
    for (const auto& ex : set) {
      if (!ex.arguments.contains("age")) {
        ++without_age;
        EXPECT_EQ(ex.arguments["sex"], "male");
      }
    }
  }
  EXPECT_EQ(without_age, 1u);
}

TEST(Dataset, TypedCells) {
  auto data = build_dataset(parse_csv(kTenRows), passenger_spec(), mbtest::survival_contract());
  for (const auto& ex : data.train) {
    EXPECT_TRUE(ex.truth.is_boolean());
    EXPECT_TRUE(ex.arguments["pclass"].is_number_integer());
  }
  contract::ValueSpec integer;
  integer.type = contract::ValueType::integer;
  EXPECT_EQ(parse_cell(integer, "3.0"), 3);
  EXPECT_THROW(parse_cell(integer, "3.5"), DatasetError);
  contract::ValueSpec number;
  number.type = contract::ValueType::number;
  EXPECT_THROW(parse_cell(number, "12abc"), DatasetError);
}

TEST(Dataset, ConfigurationErrors) {
  auto spec = passenger_spec();
  spec.features.push_back({"survived", "age"});
  EXPECT_THROW(check(spec), DatasetError);
  spec = passenger_spec();
  spec.train_fraction = 1.0;
  EXPECT_THROW(check(spec), DatasetError);
  spec = passenger_spec();
  spec.features.push_back({"cabin", "age"});
  EXPECT_THROW(build_dataset(parse_csv(kTenRows), spec, mbtest::survival_contract()), DatasetError);
  auto bad = parse_csv("sex,age,pclass,survived\nfemale,old,1,true\n");
  try {
    build_dataset(bad, passenger_spec(), mbtest::survival_contract());
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column age"), std::string::npos);
  }
}

TEST(Metrics, Accuracy) {
  std::vector<Prediction> p{{Json(1), Json(1)}, {Json(0), Json(1)}, {Json(1), Json(1)}};
  auto m = compute_metrics(p, {});
  EXPECT_NEAR(*m.accuracy, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(m.n_evaluated, 3u);
}

TEST(Metrics, RmseAndMedae) {
  std::vector<Prediction> p{{Json(2.0), Json(0.0)}, {Json(2.0), Json(0.0)}};
  auto m = compute_metrics(p, {});
  EXPECT_DOUBLE_EQ(*m.rmse, 2.0);
  EXPECT_DOUBLE_EQ(*m.medae, 2.0);
  std::vector<Prediction> odd{{Json(1.0), Json(0.0)}, {Json(5.0), Json(0.0)}, {Json(3.0), Json(1.0)},
                              {Json(4.0), Json(0.0)}};
  // Absolute errors 1, 5, 2, 4: median (2 + 4) / 2.
  EXPECT_DOUBLE_EQ(*compute_metrics(odd, {}).medae, 3.0);
}

TEST(Metrics, FormalRatio) {
  std::vector<FormalRecord> r{{true, true}, {true, true}, {true, false}, {true, true}, {false, true}};
  EXPECT_DOUBLE_EQ(*compute_metrics({}, r).formal_correctness_ratio, 0.75);
}

TEST(Metrics, EmptyAndFailures) {
  auto empty = compute_metrics({}, {});
  EXPECT_EQ(empty.n_evaluated, 0u);
  EXPECT_FALSE(empty.accuracy);
  EXPECT_FALSE(empty.rmse);
  EXPECT_FALSE(empty.formal_correctness_ratio);
  EXPECT_TRUE(empty.to_json()["accuracy"].is_null());

  std::vector<Prediction> p{{std::nullopt, Json(1.0)}, {Json(1.0), Json(1.0)}};
  auto m = compute_metrics(p, {});
  EXPECT_EQ(m.n_failed, 1u);
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(*m.rmse, 0.0);
  EXPECT_EQ(MetricsReport::from_json(m.to_json()).to_json(), m.to_json());
}

TEST(Rag, RejectsEmptyMaterial) {
  EXPECT_THROW(RagMaterial("x", 1, {}), Error);
  EXPECT_THROW(RagMaterial("x", 1, {"  "}), Error);
  EXPECT_THROW(RagMaterial("x", 4, {"doc"}), Error);
}

TEST(Rag, InjectedRightAfterSystemPrompt) {
  auto memory = memory::MemoryBranch::create("main", memory::ChatMessage::system("sys"));
  memory->append(mbtest::invocation("a", true));
  RagMaterial table("stats", 1, {"| Group | Saved |\n|---|---|\n| Women | 97% |"});
  EXPECT_TRUE(inject_rag(*memory, table));
  EXPECT_FALSE(inject_rag(*memory, table));
  auto ctx = memory->render_context();
  ASSERT_EQ(ctx.size(), 4u);
  EXPECT_EQ(ctx[1].role, memory::Role::system);
  EXPECT_EQ(ctx[1].content, prompts::reference_material(1, table.documents()[0]));
  EXPECT_EQ(ctx[2].role, memory::Role::user);
}

TEST(Rag, FromJsonWithFileDocument) {
  auto doc_path = scratch("table.md");
  std::ofstream(doc_path) << "| a | b |";
  auto material = rag_from_json(Json::parse(R"({"id": "t", "level": 2, "documents": ["inline", {"path": "table.md"}]})"),
                                doc_path.parent_path());
  EXPECT_EQ(material.documents(), (std::vector<std::string>{"inline", "| a | b |"}));
  EXPECT_EQ(material.level(), 2);
}

TEST(OpLog, RecordRoundTrip) {
  auto backend = mbtest::stub({backend::ScriptedReply::reply(mbtest::reply(true))});
  auto log = std::make_shared<OperationLog>();
  RecordingBackend recording(backend, log, Runtime::deterministic(), "executor");
  recording.set_phase("train");
  backend::ChatRequest req;
  req.messages = {memory::ChatMessage::system("s"), memory::ChatMessage::user("u")};
  auto r = recording.complete(req);
  EXPECT_TRUE(is_object_id(r.call_id));
  log->annotate(r.call_id, true, true);
  auto rec = log->records().at(0);
  EXPECT_EQ(rec.parsed["results"], true);
  EXPECT_EQ(rec.correct, true);
  EXPECT_EQ(rec.phase, "train");
  auto json = record_to_json(rec);
  EXPECT_EQ(record_to_json(record_from_json(json)), json);
  EXPECT_EQ(request_to_json(record_from_json(json).request), request_to_json(req));

  // A failed call is still recorded.
  EXPECT_THROW(recording.complete(req), backend::BackendError);
  ASSERT_EQ(log->size(), 2u);
  EXPECT_EQ(log->records()[1].error_kind, backend::ErrorKind::script_exhausted);

  auto path = scratch("ops.jsonl");
  log->write_jsonl(path);
  auto back = OperationLog::read_jsonl(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(record_to_json(back[1]), record_to_json(log->records()[1]));
}

TEST(RunConfig, ParsesDocument) {
  auto doc = Json::parse(R"({
    "contract": {"name": "F", "description": "d", "params": [{"name": "x", "type": "number"}],
                 "returns": {"type": "number"}, "task": "regression"},
    "dataset": {"path": "d.csv", "features": ["x"], "label": "y"},
    "executor": {"model": "m", "input_price_per_million": 0.5},
    "trainer": {"context_length": 5, "error_threshold": 1.5, "policy": "compress"},
    "script": {"enabled": true, "max_attempts": 2},
    "stub": {"replies": [{"content": "c", "category": "reflection", "times": 3}]}})");
  auto c = run_config_from_json(doc, "/base");
  EXPECT_EQ(c.dataset.path, std::filesystem::path("/base/d.csv"));
  EXPECT_EQ(c.context_length, 5u);
  EXPECT_EQ(c.policy, trainer::RefinementPolicy::compress);
  EXPECT_TRUE(c.script);
  EXPECT_EQ(c.script_max_attempts, 2);
  EXPECT_EQ(c.executor.model_id, "m");
  EXPECT_EQ(c.reflector_profile().model_id, "m");
  ASSERT_EQ(c.stub_replies.size(), 1u);
  EXPECT_EQ(c.stub_replies[0].times, 3);

  auto broken = doc;
  broken["trainer"]["policy"] = "shrink";
  EXPECT_THROW(run_config_from_json(broken), ConfigError);
  broken = doc;
  broken["backend"] = "carrier-pigeon";
  EXPECT_THROW(run_config_from_json(broken), ConfigError);
  broken = doc;
  broken.erase("dataset");
  EXPECT_THROW(run_config_from_json(broken), ConfigError);
}

TEST(Run, ContextZeroIsEvalOnly) {
  auto config = passenger_run(0, mbtest::reply(true));
  auto result = execute_run(config);
  EXPECT_TRUE(result.training.entries.empty());
  for (const auto& rec : result.log->records()) EXPECT_EQ(rec.phase, "eval");
  EXPECT_EQ(result.log->size(), 2u);
  ASSERT_TRUE(result.metrics);
  EXPECT_EQ(result.metrics->n_evaluated, 2u);
}

TEST(Run, EvalDoesNotMutateMemory) {
  auto config = passenger_run(3, mbtest::reply(true));
  auto result = execute_run(config);
  EXPECT_EQ(result.memory["invocations"].size(), 3u);
  EXPECT_EQ(result.training.final_memory_size, 3u);
  std::size_t eval_calls = 0;
  for (const auto& rec : result.log->records()) eval_calls += rec.phase == "eval";
  EXPECT_EQ(eval_calls, 2u);
}

TEST(Run, DeterministicAcrossRuns) {
  auto config = passenger_run(4, mbtest::reply(false));
  auto a = execute_run(config);
  auto b = execute_run(config);
  auto da = scratch("run-a");
  auto db = scratch("run-b");
  write_artifacts(a, da);
  write_artifacts(b, db);
  for (const char* name : {"operations.jsonl", "metrics.json", "cost.json", "training.json", "memory.json"}) {
    std::ifstream fa(da / name), fb(db / name);
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(sa.empty()) << name;
    EXPECT_EQ(sa, sb) << name;
  }
}

TEST(Run, ParallelEvalMatchesSequentialMetrics) {
  auto config = passenger_run(2, mbtest::reply(true));
  config.dataset.train_fraction = 0.2;
  auto sequential = execute_run(config);
  config.eval_parallelism = 4;
  auto parallel = execute_run(config);
  EXPECT_EQ(sequential.metrics->to_json(), parallel.metrics->to_json());
  EXPECT_EQ(sequential.log->size(), parallel.log->size());
}

TEST(Run, FatalBackendErrorPropagates) {
  auto config = passenger_run(0, mbtest::reply(true));
  config.stub_replies[0].times = 1;
  EXPECT_THROW(execute_run(config), backend::BackendError);
}

TEST(Run, CostPricedPerRole) {
  auto config = passenger_run(3, mbtest::reply(false));
  backend::BackendProfile reflector = config.executor;
  reflector.model_id = "reflector";
  reflector.input_price_per_million = 100.0;
  reflector.output_price_per_million = 100.0;
  config.reflector = reflector;
  auto result = execute_run(config);
  const auto& refl = result.cost.at(UsageCategory::reflection);
  ASSERT_GT(refl.total_tokens(), 0u);
  EXPECT_NEAR(refl.cost, refl.total_tokens() * 100.0 / 1e6, 1e-12);
  const auto& inv = result.cost.at(UsageCategory::invocation);
  EXPECT_NEAR(inv.cost, (inv.prompt_tokens * 1.0 + inv.completion_tokens * 2.0) / 1e6, 1e-12);
}

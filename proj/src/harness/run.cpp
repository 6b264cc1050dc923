#include "mockingbird/harness/run.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "mockingbird/backend/openai.hpp"

namespace mockingbird::harness {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto doc = Json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return doc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

bool is_fatal(const backend::BackendError& e) {
  switch (e.kind()) {
    case backend::ErrorKind::auth:
    case backend::ErrorKind::precondition:
    case backend::ErrorKind::script_exhausted:
    case backend::ErrorKind::unmatched_request:
      return true;
    default:
      return false;
  }
}

StubReplySpec stub_reply_from_json(const Json& doc) {
  StubReplySpec spec;
  spec.content = doc.value("content", std::string{});
  if (doc.contains("category")) spec.category = backend::usage_category_from_string(doc["category"].get<std::string>());
  if (doc.contains("contains")) spec.contains = doc["contains"].get<std::string>();
  if (doc.contains("fail")) spec.failure = backend::error_kind_from_string(doc["fail"].get<std::string>());
  spec.times = doc.value("times", 1);
  if (spec.times < 1) throw ConfigError("stub reply \"times\" must be at least 1");
  return spec;
}

}  // namespace

RunConfig run_config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  try {
    RunConfig c;
    if (doc.contains("contract_path")) {
      c.contract = contract::load_contract(resolve(base_dir, doc["contract_path"].get<std::string>()).string());
    } else {
      c.contract = contract::contract_from_json(doc.at("contract"));
    }
    c.dataset = dataset_spec_from_json(doc.at("dataset"), base_dir);
    c.backend = doc.value("backend", c.backend);
    if (c.backend != "stub" && c.backend != "openai") throw ConfigError("backend must be \"stub\" or \"openai\"");
    if (doc.contains("executor")) c.executor = backend::profile_from_json(doc["executor"]);
    if (doc.contains("reflector")) c.reflector = backend::profile_from_json(doc["reflector"]);
    if (doc.contains("generator")) c.generator = backend::profile_from_json(doc["generator"]);
    if (doc.contains("stub")) {
      for (const auto& r : doc["stub"].at("replies")) c.stub_replies.push_back(stub_reply_from_json(r));
    }
    if (doc.contains("trainer")) {
      const auto& t = doc["trainer"];
      c.context_length = t.value("context_length", c.context_length);
      c.error_threshold = t.value("error_threshold", c.error_threshold);
      c.policy = trainer::policy_from_string(t.value("policy", std::string("replace")));
      if (c.policy == trainer::RefinementPolicy::custom) {
        throw ConfigError("the custom policy is only available through the library interface");
      }
    }
    c.max_regeneration_attempts = doc.value("max_regeneration_attempts", c.max_regeneration_attempts);
    if (doc.contains("script")) {
      c.script = doc["script"].value("enabled", false);
      c.script_max_attempts = doc["script"].value("max_attempts", c.script_max_attempts);
    }
    if (doc.contains("rag_path")) {
      c.rag = load_rag(resolve(base_dir, doc["rag_path"].get<std::string>()));
    } else if (doc.contains("rag")) {
      c.rag = rag_from_json(doc["rag"], base_dir);
    }
    c.output_dir = resolve(base_dir, doc.value("output_dir", std::string("out")));
    c.seed = doc.value("seed", c.seed);
    c.deterministic = doc.value("deterministic", c.deterministic);
    c.eval_parallelism = doc.value("eval_parallelism", c.eval_parallelism);
    if (c.eval_parallelism < 1) throw ConfigError("eval_parallelism must be at least 1");
    if (doc.contains("eval_limit") && !doc["eval_limit"].is_null()) c.eval_limit = doc["eval_limit"].get<std::size_t>();
    if (c.error_threshold < 0) throw ConfigError("error_threshold must be non-negative");
    if (c.max_regeneration_attempts < 1) throw ConfigError("max_regeneration_attempts must be at least 1");
    if (c.script_max_attempts < 1) throw ConfigError("script max_attempts must be at least 1");
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid run configuration: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path), path.parent_path());
}

std::shared_ptr<backend::ChatBackend> make_stub_backend(const RunConfig& config) {
  std::vector<backend::ScriptedReply> script;
  for (const auto& spec : config.stub_replies) {
    auto matcher = backend::match_any();
    if (spec.category) matcher = backend::match_category(*spec.category);
    if (spec.contains) matcher = backend::match_both(matcher, backend::match_substring(*spec.contains));
    for (int i = 0; i < spec.times; ++i) {
      script.push_back(spec.failure ? backend::ScriptedReply::fail(*spec.failure, matcher)
                                    : backend::ScriptedReply::reply(spec.content, matcher));
    }
  }
  if (script.empty()) throw ConfigError("stub backend needs at least one scripted reply");
  return std::make_shared<backend::StubBackend>(std::move(script), config.executor);
}

std::shared_ptr<backend::StubBackend> replay_backend(const std::vector<OperationLogRecord>& records,
                                                     const backend::BackendProfile& profile) {
  std::vector<backend::ScriptedReply> script;
  for (const auto& r : records) {
    auto matcher = backend::match_both(backend::match_category(r.kind), backend::match_messages(r.request.messages));
    if (r.error_kind) {
      script.push_back(backend::ScriptedReply::fail(*r.error_kind, matcher));
    } else {
      auto reply = backend::ScriptedReply::reply(r.response, matcher);
      reply.usage = r.usage;
      script.push_back(std::move(reply));
    }
  }
  if (script.empty()) throw Error("operation log is empty; nothing to replay");
  return std::make_shared<backend::StubBackend>(std::move(script), profile);
}

backend::CostBreakdown cost_from_records(const std::vector<OperationLogRecord>& records, const RunConfig& config) {
  std::vector<backend::TokenUsage> executor, reflector, generator;
  for (const auto& r : records) {
    auto usage = r.usage;
    usage.category = r.kind;
    if (r.role == "reflector") {
      reflector.push_back(usage);
    } else if (r.role == "generator") {
      generator.push_back(usage);
    } else {
      executor.push_back(usage);
    }
  }
  auto total = backend::cost_report(executor, config.executor);
  total += backend::cost_report(reflector, config.reflector_profile());
  total += backend::cost_report(generator, config.generator_profile());
  return total;
}

RunResult execute_run(const RunConfig& config, const RunOptions& options) {
  Runtime runtime = config.deterministic ? Runtime::deterministic(config.seed) : Runtime::system(config.seed);
  RunResult result;
  result.log = std::make_shared<OperationLog>();

  std::shared_ptr<backend::ChatBackend> exec_inner, refl_inner, gen_inner;
  if (options.backend_override) {
    exec_inner = refl_inner = gen_inner = options.backend_override;
  } else if (config.backend == "stub") {
    exec_inner = refl_inner = gen_inner = make_stub_backend(config);
  } else {
    exec_inner = std::make_shared<backend::OpenAiBackend>(config.executor);
    refl_inner = std::make_shared<backend::OpenAiBackend>(config.reflector_profile());
    gen_inner = std::make_shared<backend::OpenAiBackend>(config.generator_profile());
  }
  auto executor = std::make_shared<RecordingBackend>(exec_inner, result.log, runtime, "executor");
  auto reflector = std::make_shared<RecordingBackend>(refl_inner, result.log, runtime, "reflector");
  auto generator = std::make_shared<RecordingBackend>(gen_inner, result.log, runtime, "generator");

  mockfn::MockFunctionOptions fn_options;
  fn_options.max_regeneration_attempts = config.max_regeneration_attempts;
  mockfn::MockFunction fn(config.contract, executor, runtime, fn_options);
  if (options.memory_in) fn.set_memory(memory::MemoryBranch::from_json(read_json_file(*options.memory_in)));
  if (config.rag && !inject_rag(*fn.memory(), *config.rag)) {
    result.notices.push_back("reference material \"" + config.rag->id() + "\" was already present");
  }

  auto data = load_dataset(config.dataset, config.contract);
  const auto kind = config.contract.task_kind;

  if (options.mode != RunMode::eval_only) {
    executor->set_phase("train");
    reflector->set_phase("train");
    trainer::TrainerConfig tc;
    tc.context_length_limit = config.context_length;
    tc.error_threshold = config.error_threshold;
    tc.policy = config.policy;
    tc.reflector = reflector;
    if (config.script) {
      generator->set_phase("train");
      tc.script_generator = generator;
      tc.script_max_attempts = config.script_max_attempts;
    }
    result.training = trainer::train(fn, data.train, tc);
    for (const auto& e : result.training.entries) {
      for (const auto& id : e.call_ids) result.log->annotate(id, e.truth, e.correct);
      if (e.error) result.notices.push_back("train entry " + std::to_string(e.index) + ": " + *e.error);
    }
  }

  if (options.mode != RunMode::train_only) {
    if (config.script && !fn.has_valid_script()) {
      generator->set_phase("eval");
      try {
        mockfn::generate_script(fn, *generator, config.script_max_attempts);
      } catch (const mockfn::ScriptGenerationFailure& e) {
        result.notices.push_back(std::string("script generation failed: ") + e.what());
      }
    }

    executor->set_phase("eval");
    std::size_t n = data.eval.size();
    if (config.eval_limit) n = std::min(n, *config.eval_limit);
    std::vector<Prediction> predictions(n);
    std::vector<std::optional<FormalRecord>> formal(n);
    std::vector<std::vector<std::string>> call_ids(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
      while (!stop) {
        std::size_t i = next++;
        if (i >= n) return;
        const auto& ex = data.eval[i];
        predictions[i].truth = ex.truth;
        auto branch = memory::create_branch(fn.memory(), "eval-" + std::to_string(i));
        try {
          auto o = fn.invoke_in(*branch, ex.arguments);
          predictions[i].predicted = o.invocation.results;
          formal[i] = FormalRecord{o.served_by == mockfn::ServedBy::llm, o.formally_correct_first_try};
          call_ids[i] = o.call_ids;
        } catch (const mockfn::FormalFailure& e) {
          formal[i] = FormalRecord{true, false};
          call_ids[i] = e.call_ids();
          errors[i] = e.what();
        } catch (const backend::BackendError& e) {
          if (is_fatal(e)) {
            std::lock_guard lock(fatal_mutex);
            if (!fatal) fatal = std::current_exception();
            stop = true;
          }
          errors[i] = e.what();
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
        memory::drop_branch(*branch);
      }
    };
    std::size_t threads = std::min(config.eval_parallelism, std::max<std::size_t>(n, 1));
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    std::vector<FormalRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
      if (formal[i]) records.push_back(*formal[i]);
      if (!errors[i].empty()) result.notices.push_back("eval entry " + std::to_string(i) + ": " + errors[i]);
      std::optional<bool> correct;
      if (predictions[i].predicted) {
        try {
          correct = !trainer::should_reflect(kind, config.error_threshold, *predictions[i].predicted,
                                             predictions[i].truth);
        } catch (const trainer::TypeMismatch&) {
          correct = false;
        }
      }
      for (const auto& id : call_ids[i]) result.log->annotate(id, predictions[i].truth, correct);
    }
    result.metrics = compute_metrics(predictions, records);
  }

  if (auto s = fn.script()) result.script_source = s->source;
  result.memory = fn.memory()->to_json();
  result.cost = cost_from_records(result.log->records(), config);
  return result;
}

void write_artifacts(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  result.log->write_jsonl(dir / "operations.jsonl");
  if (result.metrics) write_text(dir / "metrics.json", result.metrics->to_json().dump(2) + "\n");
  write_text(dir / "cost.json", result.cost.to_json().dump(2) + "\n");
  write_text(dir / "training.json", result.training.to_json().dump(2) + "\n");
  write_text(dir / "memory.json", result.memory.dump(2) + "\n");
  if (result.script_source) write_text(dir / "script.txt", *result.script_source);
}

}  // namespace mockingbird::harness

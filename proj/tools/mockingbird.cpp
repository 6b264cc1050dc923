// Command-line driver: run, train, eval, report and replay.

#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "mockingbird/harness/run.hpp"

namespace mb = mockingbird;
namespace hn = mockingbird::harness;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::size_t> context_length;
  std::optional<std::string> policy;
  std::optional<std::string> script;
  std::optional<std::string> rag;
  std::optional<std::string> out;
  std::optional<std::string> memory;
  std::optional<std::string> log;
};

void add_run_flags(CLI::App* cmd, Overrides& o, bool with_memory) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--context-length", o.context_length, "Invocations kept in memory; 0 skips training");
  cmd->add_option("--policy", o.policy, "Refinement policy")->check(CLI::IsMember({"replace", "compress"}));
  cmd->add_option("--script", o.script, "Substitution script mode")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--rag", o.rag, "Reference material (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory for artifacts");
  if (with_memory) cmd->add_option("--memory", o.memory, "Memory snapshot to start from")->check(CLI::ExistingFile);
}

hn::RunConfig load(const Overrides& o) {
  auto config = hn::load_run_config(o.config);
  if (o.context_length) config.context_length = *o.context_length;
  if (o.policy) config.policy = mb::trainer::policy_from_string(*o.policy);
  if (o.script) config.script = *o.script == "on";
  if (o.rag) config.rag = hn::load_rag(*o.rag);
  if (o.out) config.output_dir = *o.out;
  return config;
}

void print_summary(const hn::RunResult& result, const std::filesystem::path& dir) {
  for (const auto& n : result.notices) std::cerr << "note: " << n << "\n";
  if (result.metrics) std::cout << result.metrics->to_json().dump(2) << "\n";
  std::cout << "training entries: " << result.training.entries.size()
            << ", reflections: " << result.training.reflections.size()
            << ", backend calls: " << result.log->size() << "\n";
  std::cout << "artifacts: " << dir.string() << "\n";
}

int run_mode(const Overrides& o, hn::RunMode mode) {
  auto config = load(o);
  hn::RunOptions options;
  options.mode = mode;
  if (o.memory) options.memory_in = *o.memory;
  auto result = hn::execute_run(config, options);
  hn::write_artifacts(result, config.output_dir);
  print_summary(result, config.output_dir);
  return 0;
}

int report(const Overrides& o) {
  auto config = hn::load_run_config(o.config);
  auto records = hn::OperationLog::read_jsonl(*o.log);
  auto cost = hn::cost_from_records(records, config);
  std::size_t failed = 0;
  std::map<std::string, std::size_t> by_kind;
  for (const auto& r : records) {
    ++by_kind[mb::backend::to_string(r.kind)];
    if (r.error) ++failed;
  }
  mb::Json doc;
  doc["records"] = records.size();
  doc["failed_calls"] = failed;
  doc["records_by_kind"] = by_kind;
  doc["cost"] = cost.to_json();
  doc["total_cost_rounded"] = mb::backend::round_currency(cost.total.cost);
  std::cout << doc.dump(2) << "\n";
  if (o.out) {
    std::filesystem::create_directories(*o.out);
    std::ofstream(std::filesystem::path(*o.out) / "cost.json") << cost.to_json().dump(2) << "\n";
  }
  return 0;
}

int replay(const Overrides& o) {
  auto config = load(o);
  auto records = hn::OperationLog::read_jsonl(*o.log);
  std::set<std::string> phases;
  for (const auto& r : records) phases.insert(r.phase);
  hn::RunOptions options;
  if (!phases.contains("train")) {
    options.mode = hn::RunMode::eval_only;
  } else if (!phases.contains("eval")) {
    options.mode = hn::RunMode::train_only;
  }
  if (o.memory) options.memory_in = *o.memory;
  options.backend_override = hn::replay_backend(records, config.executor);
  auto result = hn::execute_run(config, options);
  hn::write_artifacts(result, config.output_dir);
  print_summary(result, config.output_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock functions role-played by an LLM: training, evaluation and reporting"};
  app.require_subcommand(1);

  Overrides run_o, train_o, eval_o, report_o, replay_o;
  auto* run_cmd = app.add_subcommand("run", "Train on the training split, then evaluate");
  add_run_flags(run_cmd, run_o, true);
  auto* train_cmd = app.add_subcommand("train", "Train only and save the memory");
  add_run_flags(train_cmd, train_o, true);
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a frozen memory");
  add_run_flags(eval_cmd, eval_o, true);

  auto* report_cmd = app.add_subcommand("report", "Token and cost report for an operation log");
  report_cmd->add_option("--config", report_o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--log", report_o.log, "Operation log (JSON lines)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report_o.out, "Directory for cost.json");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a configuration with responses taken from a log");
  add_run_flags(replay_cmd, replay_o, true);
  replay_cmd->add_option("--log", replay_o.log, "Operation log (JSON lines)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_mode(run_o, hn::RunMode::full);
    if (*train_cmd) return run_mode(train_o, hn::RunMode::train_only);
    if (*eval_cmd) return run_mode(eval_o, hn::RunMode::eval_only);
    if (*report_cmd) return report(report_o);
    if (*replay_cmd) return replay(replay_o);
  } catch (const hn::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <cmath>

#include "mockingbird/prompts.hpp"
#include "mockingbird/trainer/trainer.hpp"

namespace mockingbird::trainer {

std::string to_string(RefinementPolicy policy) {
  switch (policy) {
    case RefinementPolicy::replace: return "replace";
    case RefinementPolicy::compress: return "compress";
    case RefinementPolicy::custom: return "custom";
  }
  return "replace";
}

RefinementPolicy policy_from_string(const std::string& name) {
  if (name == "replace") return RefinementPolicy::replace;
  if (name == "compress") return RefinementPolicy::compress;
  if (name == "custom") return RefinementPolicy::custom;
  throw Error("unknown refinement policy \"" + name + "\"");
}

void check(const TrainerConfig& config) {
  if (!(config.error_threshold >= 0)) throw Error("error_threshold must be non-negative");
  if (config.policy == RefinementPolicy::custom && !config.custom) {
    throw Error("custom refinement policy selected without a callback");
  }
  if (config.script_max_attempts < 1) throw Error("script_max_attempts must be at least 1");
}

namespace {

enum class Family { null, boolean, number, string, array, object };

Family family(const Json& v) {
  if (v.is_null()) return Family::null;
  if (v.is_boolean()) return Family::boolean;
  if (v.is_number()) return Family::number;
  if (v.is_string()) return Family::string;
  if (v.is_array()) return Family::array;
  return Family::object;
}

}  // namespace

bool should_reflect(contract::TaskKind kind, double error_threshold, const Json& predicted, const Json& truth) {
  if (kind == contract::TaskKind::regression) {
    if (!predicted.is_number() || !truth.is_number()) {
      throw TypeMismatch("regression needs numeric values, got " + canonical(predicted) + " and " + canonical(truth));
    }
    return std::fabs(predicted.get<double>() - truth.get<double>()) > error_threshold;
  }
  if (family(predicted) != family(truth)) {
    throw TypeMismatch("cannot compare " + canonical(predicted) + " with " + canonical(truth));
  }
  return canonical(predicted) != canonical(truth);
}

CorrectnessFn stored_correctness(contract::TaskKind kind, double error_threshold) {
  return [kind, error_threshold](const MockInvocation& inv) {
    if (inv.reflected || !inv.ground_truth) return false;
    try {
      return !should_reflect(kind, error_threshold, inv.results, *inv.ground_truth);
    } catch (const TypeMismatch&) {
      return false;
    }
  };
}

void refine_replace(std::vector<MockInvocation>& history, MockInvocation latest, bool latest_correct,
                    std::size_t limit, const CorrectnessFn& is_correct) {
  if (limit == 0) return;
  if (history.size() < limit) {
    history.push_back(std::move(latest));
    return;
  }
  for (auto& inv : history) {
    if (is_correct(inv)) {
      inv = std::move(latest);
      return;
    }
  }
  if (latest_correct) return;
  history.erase(history.begin());
  history.push_back(std::move(latest));
}

std::optional<std::string> refine_compress(MemoryBranch& memory, backend::ChatBackend& reflector) {
  if (memory.size() == 0) return std::nullopt;
  auto messages = memory.render_context();
  messages.push_back(memory::ChatMessage::user(prompts::compression_request()));
  auto request = backend::make_request(reflector.profile(), std::move(messages), backend::UsageCategory::compression);
  auto response = reflector.complete(request);
  auto summary = response.content;
  auto b = summary.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) throw Error("compression produced an empty summary");
  summary = summary.substr(b, summary.find_last_not_of(" \t\r\n") - b + 1);
  memory.clear_invocations();
  memory.set_compressed_summary(std::move(summary));
  return response.call_id;
}

}  // namespace mockingbird::trainer

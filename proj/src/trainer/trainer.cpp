#include "mockingbird/trainer/trainer.hpp"

#include "mockingbird/prompts.hpp"

namespace mockingbird::trainer {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string analysis_section(const std::string& reply) {
  auto start = reply.find("Mistake Analysis");
  if (start == std::string::npos) return reply;
  auto body = reply.find('\n', start);
  if (body == std::string::npos) return reply;
  auto end = reply.find("Notes for Future Reference", body);
  if (end != std::string::npos) {
    auto line_start = reply.rfind('\n', end);
    end = line_start == std::string::npos || line_start < body ? end : line_start;
  }
  auto section = trim(reply.substr(body, end == std::string::npos ? std::string::npos : end - body));
  return section.empty() ? reply : section;
}

struct DropOnExit {
  MemoryBranch& branch;
  ~DropOnExit() { memory::drop_branch(branch); }
};

void record_truth(MemoryBranch& memory, const std::string& id, const Json& truth) {
  memory.edit_invocations([&](std::vector<MockInvocation>& list) {
    for (auto& inv : list) {
      if (inv.id == id) inv.ground_truth = truth;
    }
  });
}

void fill(EntryOutcome& out, const mockfn::InvocationOutcome& o) {
  out.invocation_id = o.invocation.id;
  out.served_by = o.served_by;
  out.attempts = o.attempts;
  out.formally_correct_first_try = o.formally_correct_first_try;
  out.predicted = o.invocation.results;
  if (o.script_fallback) out.script_fallback = o.script_fallback;
  out.call_ids.insert(out.call_ids.end(), o.call_ids.begin(), o.call_ids.end());
}

}  // namespace

Json note_to_json(const ReflectionNote& note) {
  return Json{{"source_invocation_id", note.source_invocation_id},
              {"analysis", note.analysis},
              {"notes", note.notes},
              {"created_at", format_timestamp(note.created_at)},
              {"call_id", note.call_id}};
}

ReflectionNote reflect(MockFunction& fn, const MockInvocation& invocation, const Json& truth,
                       backend::ChatBackend& reflector) {
  auto sub = memory::create_branch(fn.memory(), "reflect-" + invocation.id);
  DropOnExit guard{*sub};
  auto messages = sub->render_context();
  if (!sub->find(invocation.id)) {
    messages.push_back(invocation.request_message());
    messages.push_back(invocation.response_message());
  }
  messages.push_back(memory::ChatMessage::user(
      prompts::reflection_request(canonical(invocation.results), invocation.remarks, canonical(truth))));
  auto request = backend::make_request(reflector.profile(), std::move(messages), backend::UsageCategory::reflection);
  auto response = reflector.complete(request);
  auto text = trim(response.content);
  if (text.empty()) throw ReflectionFailure("reflector returned an empty note for " + invocation.id);

  ReflectionNote note;
  note.source_invocation_id = invocation.id;
  note.analysis = analysis_section(text);
  note.notes = text;
  note.created_at = fn.runtime().clock->now();
  note.call_id = response.call_id;
  return note;
}

void apply_reflection(MemoryBranch& memory, const std::string& invocation_id, const Json& truth,
                      const ReflectionNote& note) {
  memory.update_invocation(invocation_id, truth, note.notes);
  memory.mark_reflected(invocation_id, truth);
}

Json outcome_to_json(const EntryOutcome& o) {
  Json out;
  out["index"] = o.index;
  out["invocation_id"] = o.invocation_id ? Json(*o.invocation_id) : Json();
  out["served_by"] = o.served_by ? Json(mockfn::to_string(*o.served_by)) : Json();
  out["attempts"] = o.attempts;
  out["formally_correct_first_try"] = o.formally_correct_first_try;
  out["predicted"] = o.predicted ? *o.predicted : Json();
  out["truth"] = o.truth;
  out["correct"] = o.correct ? Json(*o.correct) : Json();
  out["reflected"] = o.reflected;
  out["script_invalidated"] = o.script_invalidated;
  out["script_regenerated"] = o.script_regenerated;
  out["script_fallback"] = o.script_fallback ? Json(*o.script_fallback) : Json();
  out["error"] = o.error ? Json(*o.error) : Json();
  out["call_ids"] = o.call_ids;
  return out;
}

Json TrainingReport::to_json() const {
  Json out;
  out["entries"] = Json::array();
  for (const auto& e : entries) out["entries"].push_back(outcome_to_json(e));
  out["reflections"] = Json::array();
  for (const auto& n : reflections) out["reflections"].push_back(note_to_json(n));
  out["compression_call_ids"] = compression_call_ids;
  out["script_generation_errors"] = script_generation_errors;
  out["final_memory_size"] = final_memory_size;
  return out;
}

TrainingReport train(MockFunction& fn, std::span<const Example> examples, const TrainerConfig& config) {
  check(config);
  TrainingReport report;
  auto& memory = *fn.memory();
  if (config.context_length_limit == 0) {
    report.final_memory_size = memory.size();
    return report;
  }
  backend::ChatBackend& reflector = config.reflector ? *config.reflector : fn.executor();
  const auto kind = fn.contract().task_kind;
  const auto limit = config.context_length_limit;
  const auto is_correct = stored_correctness(kind, config.error_threshold);

  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& example = examples[i];
    EntryOutcome out;
    out.index = i;
    out.truth = example.truth;
    try {
      auto o = fn.invoke(example.arguments);
      if (o.served_by == mockfn::ServedBy::script) {
        if (!should_reflect(kind, config.error_threshold, o.invocation.results, example.truth)) {
          fill(out, o);
          out.correct = true;
          report.entries.push_back(std::move(out));
          continue;
        }
        fn.invalidate();
        out.script_invalidated = true;
        o = fn.invoke_live(memory, example.arguments);
      }
      fill(out, o);
      const auto& id = o.invocation.id;
      record_truth(memory, id, example.truth);
      bool wrong = should_reflect(kind, config.error_threshold, o.invocation.results, example.truth);
      out.correct = !wrong;

      if (wrong) {
        fn.invalidate();
        try {
          auto stored = memory.find(id);
          auto note = reflect(fn, stored ? *stored : o.invocation, example.truth, reflector);
          apply_reflection(memory, id, example.truth, note);
          out.reflected = true;
          report.reflections.push_back(std::move(note));
        } catch (const std::exception& e) {
          out.error = std::string("reflection failed: ") + e.what();
        }
      }

      switch (config.policy) {
        case RefinementPolicy::replace:
          if (memory.size() > limit) {
            memory.edit_invocations([&](std::vector<MockInvocation>& history) {
              auto latest = std::move(history.back());
              history.pop_back();
              refine_replace(history, std::move(latest), !wrong, limit, is_correct);
            });
          }
          break;
        case RefinementPolicy::compress:
          if (memory.size() >= limit) {
            try {
              if (auto call = refine_compress(memory, reflector)) report.compression_call_ids.push_back(*call);
            } catch (const std::exception& e) {
              out.error = std::string("compression failed: ") + e.what();
            }
          }
          break;
        case RefinementPolicy::custom:
          if (memory.size() > limit) {
            auto list = memory.invocations();
            config.custom(memory, list.back(), !wrong, limit);
          }
          break;
      }

      if ((wrong || out.script_invalidated) && config.script_generator) {
        try {
          mockfn::generate_script(fn, *config.script_generator, config.script_max_attempts);
          out.script_regenerated = true;
        } catch (const std::exception& e) {
          report.script_generation_errors.push_back("entry " + std::to_string(i) + ": " + e.what());
        }
      }
    } catch (const mockfn::FormalFailure& e) {
      out.call_ids.insert(out.call_ids.end(), e.call_ids().begin(), e.call_ids().end());
      out.attempts = e.attempts();
      out.served_by = mockfn::ServedBy::llm;
      out.error = e.what();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    report.entries.push_back(std::move(out));
  }
  report.final_memory_size = memory.size();
  return report;
}

}  // namespace mockingbird::trainer

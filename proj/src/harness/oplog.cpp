#include "mockingbird/harness/oplog.hpp"

#include <fstream>

#include "mockingbird/mockfn/mock_function.hpp"

namespace mockingbird::harness {

namespace {

Json parsed_fields(backend::UsageCategory kind, const std::string& response) {
  if (kind != backend::UsageCategory::invocation) return Json();
  auto doc = mockfn::parse_reply(response);
  if (!doc || !doc->is_object() || !doc->contains("remarks") || !doc->contains("results")) return Json();
  return Json{{"remarks", (*doc)["remarks"]}, {"results", (*doc)["results"]}};
}

}  // namespace

Json record_to_json(const OperationLogRecord& r) {
  Json out;
  out["id"] = r.id;
  out["timestamp"] = format_timestamp(r.timestamp);
  out["kind"] = backend::to_string(r.kind);
  out["role"] = r.role;
  out["phase"] = r.phase;
  out["request"] = backend::request_to_json(r.request);
  out["response"] = r.response;
  out["parsed"] = r.parsed;
  out["ground_truth"] = r.ground_truth ? *r.ground_truth : Json();
  out["correct"] = r.correct ? Json(*r.correct) : Json();
  out["usage"] = Json{{"prompt_tokens", r.usage.prompt_tokens}, {"completion_tokens", r.usage.completion_tokens}};
  out["error"] = r.error ? Json{{"kind", backend::to_string(*r.error_kind)}, {"message", *r.error}} : Json();
  return out;
}

OperationLogRecord record_from_json(const Json& doc) {
  OperationLogRecord r;
  r.id = doc.at("id").get<std::string>();
  r.timestamp = parse_timestamp(doc.at("timestamp").get<std::string>());
  r.kind = backend::usage_category_from_string(doc.at("kind").get<std::string>());
  r.role = doc.value("role", std::string{});
  r.phase = doc.value("phase", std::string{});
  r.request = backend::request_from_json(doc.at("request"));
  r.response = doc.value("response", std::string{});
  r.parsed = doc.value("parsed", Json());
  if (doc.contains("ground_truth") && !doc["ground_truth"].is_null()) r.ground_truth = doc["ground_truth"];
  if (doc.contains("correct") && doc["correct"].is_boolean()) r.correct = doc["correct"].get<bool>();
  const auto& usage = doc.at("usage");
  r.usage.prompt_tokens = usage.at("prompt_tokens").get<std::size_t>();
  r.usage.completion_tokens = usage.at("completion_tokens").get<std::size_t>();
  r.usage.category = r.kind;
  if (doc.contains("error") && doc["error"].is_object()) {
    r.error_kind = backend::error_kind_from_string(doc["error"].at("kind").get<std::string>());
    r.error = doc["error"].value("message", std::string{});
  }
  return r;
}

void OperationLog::append(OperationLogRecord record) {
  std::lock_guard lock(mutex_);
  records_.push_back(std::move(record));
}

void OperationLog::annotate(const std::string& call_id, const Json& truth, std::optional<bool> correct) {
  std::lock_guard lock(mutex_);
  for (auto& r : records_) {
    if (r.id == call_id) {
      r.ground_truth = truth;
      r.correct = correct;
      return;
    }
  }
}

std::vector<OperationLogRecord> OperationLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t OperationLog::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

void OperationLog::write_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records()) out << record_to_json(r).dump() << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<OperationLogRecord> OperationLog::read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<OperationLogRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto doc = Json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw Error(path.string() + ":" + std::to_string(number) + ": not valid JSON");
    out.push_back(record_from_json(doc));
  }
  return out;
}

RecordingBackend::RecordingBackend(std::shared_ptr<backend::ChatBackend> inner, std::shared_ptr<OperationLog> log,
                                   Runtime runtime, std::string role)
    : inner_(std::move(inner)), log_(std::move(log)), runtime_(std::move(runtime)), role_(std::move(role)) {
  if (!inner_ || !log_) throw Error("recording backend needs an inner backend and a log");
}

void RecordingBackend::set_phase(std::string phase) {
  std::lock_guard lock(mutex_);
  phase_ = std::move(phase);
}

backend::ChatResponse RecordingBackend::complete(const backend::ChatRequest& request) {
  OperationLogRecord record;
  record.id = runtime_.ids->next();
  record.timestamp = runtime_.clock->now();
  record.kind = request.category;
  record.role = role_;
  {
    std::lock_guard lock(mutex_);
    record.phase = phase_;
  }
  record.request = request;
  record.usage.category = request.category;
  try {
    auto response = inner_->complete(request);
    response.call_id = record.id;
    record.response = response.content;
    record.parsed = parsed_fields(request.category, response.content);
    record.usage = response.usage;
    record.usage.category = request.category;
    log_->append(std::move(record));
    return response;
  } catch (const backend::BackendError& e) {
    record.error_kind = e.kind();
    record.error = e.what();
    log_->append(std::move(record));
    throw;
  } catch (const std::exception& e) {
    record.error_kind = backend::ErrorKind::transport;
    record.error = e.what();
    log_->append(std::move(record));
    throw;
  }
}

}  // namespace mockingbird::harness

#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/backend/backend.hpp"

namespace mockingbird::harness {

struct OperationLogRecord {
  std::string id;
  TimePoint timestamp{};
  backend::UsageCategory kind = backend::UsageCategory::invocation;
  /// "executor", "reflector" or "generator".
  std::string role;
  /// "train" or "eval".
  std::string phase;
  backend::ChatRequest request;
  std::string response;
  /// Parsed {"remarks","results"} when the response carries them, otherwise null.
  Json parsed;
  std::optional<Json> ground_truth;
  std::optional<bool> correct;
  backend::TokenUsage usage;
  std::optional<backend::ErrorKind> error_kind;
  std::optional<std::string> error;
};

Json record_to_json(const OperationLogRecord& record);
OperationLogRecord record_from_json(const Json& doc);

/// Ordered, thread-safe collection of records for one run.
class OperationLog {
 public:
  void append(OperationLogRecord record);
  /// Attaches the ground truth and verdict to the record with `call_id`.
  void annotate(const std::string& call_id, const Json& truth, std::optional<bool> correct);
  std::vector<OperationLogRecord> records() const;
  std::size_t size() const;

  /// One compact JSON document per line.
  void write_jsonl(const std::filesystem::path& path) const;
  static std::vector<OperationLogRecord> read_jsonl(const std::filesystem::path& path);

 private:
  mutable std::mutex mutex_;
  std::vector<OperationLogRecord> records_;
};

/// Decorator that logs every call, successful or not, and stamps the response
/// with the record id.
class RecordingBackend final : public backend::ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<backend::ChatBackend> inner, std::shared_ptr<OperationLog> log, Runtime runtime,
                   std::string role);

  backend::ChatResponse complete(const backend::ChatRequest& request) override;
  const backend::BackendProfile& profile() const override { return inner_->profile(); }

  void set_phase(std::string phase);

 private:
  std::shared_ptr<backend::ChatBackend> inner_;
  std::shared_ptr<OperationLog> log_;
  Runtime runtime_;
  std::string role_;
  mutable std::mutex mutex_;
  std::string phase_;
};

}  // namespace mockingbird::harness

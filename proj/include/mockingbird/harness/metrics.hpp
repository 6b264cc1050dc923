#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mockingbird/core.hpp"

namespace mockingbird::harness {

struct Prediction {
  /// Absent when the invocation failed.
  std::optional<Json> predicted;
  Json truth;
};

/// One evaluated invocation as seen by the formal-correctness ratio.
struct FormalRecord {
  bool served_by_llm = true;
  bool first_try_valid = false;
};

struct MetricsReport {
  std::size_t n_evaluated = 0;
  std::size_t n_failed = 0;
  std::optional<double> accuracy;
  std::optional<double> rmse;
  std::optional<double> medae;
  std::optional<double> formal_correctness_ratio;

  /// Absent metrics serialize as null.
  Json to_json() const;
  static MetricsReport from_json(const Json& doc);
};

/// accuracy: canonical-text matches over all predictions (failures count as misses).
/// rmse, medae: over pairs where both sides are numbers.
/// ratio: first-try-valid over records served by the LLM.
MetricsReport compute_metrics(std::span<const Prediction> predictions, std::span<const FormalRecord> records);

}  // namespace mockingbird::harness

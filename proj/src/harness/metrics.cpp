#include "mockingbird/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mockingbird::harness {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

std::optional<double> read_optional(const Json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<double>();
}

}  // namespace

Json MetricsReport::to_json() const {
  return Json{{"n_evaluated", n_evaluated},
              {"n_failed", n_failed},
              {"accuracy", optional_number(accuracy)},
              {"rmse", optional_number(rmse)},
              {"medae", optional_number(medae)},
              {"formal_correctness_ratio", optional_number(formal_correctness_ratio)}};
}

MetricsReport MetricsReport::from_json(const Json& doc) {
  MetricsReport r;
  r.n_evaluated = doc.at("n_evaluated").get<std::size_t>();
  r.n_failed = doc.value("n_failed", std::size_t{0});
  r.accuracy = read_optional(doc, "accuracy");
  r.rmse = read_optional(doc, "rmse");
  r.medae = read_optional(doc, "medae");
  r.formal_correctness_ratio = read_optional(doc, "formal_correctness_ratio");
  return r;
}

MetricsReport compute_metrics(std::span<const Prediction> predictions, std::span<const FormalRecord> records) {
  MetricsReport report;
  report.n_evaluated = predictions.size();
  std::size_t matches = 0;
  std::vector<double> abs_errors;
  for (const auto& p : predictions) {
    if (!p.predicted) {
      ++report.n_failed;
      continue;
    }
    if (canonical(*p.predicted) == canonical(p.truth)) ++matches;
    if (p.predicted->is_number() && p.truth.is_number()) {
      abs_errors.push_back(std::fabs(p.predicted->get<double>() - p.truth.get<double>()));
    }
  }
  if (!predictions.empty()) report.accuracy = static_cast<double>(matches) / static_cast<double>(predictions.size());
  if (!abs_errors.empty()) {
    // Sorted so that floating-point summation does not depend on input order.
    std::sort(abs_errors.begin(), abs_errors.end());
    double sum_sq = 0.0;
    for (double e : abs_errors) sum_sq += e * e;
    report.rmse = std::sqrt(sum_sq / static_cast<double>(abs_errors.size()));
    auto n = abs_errors.size();
    report.medae = n % 2 == 1 ? abs_errors[n / 2] : (abs_errors[n / 2 - 1] + abs_errors[n / 2]) / 2.0;
  }
  std::size_t llm = 0;
  std::size_t first_try = 0;
  for (const auto& r : records) {
    if (!r.served_by_llm) continue;
    ++llm;
    if (r.first_try_valid) ++first_try;
  }
  if (llm > 0) report.formal_correctness_ratio = static_cast<double>(first_try) / static_cast<double>(llm);
  return report;
}

}  // namespace mockingbird::harness

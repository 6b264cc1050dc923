#include "mockingbird/backend/accounting.hpp"

#include <cmath>

namespace mockingbird::backend {

namespace {
std::size_t index_of(UsageCategory c) { return static_cast<std::size_t>(c); }
}  // namespace

CategoryCost& CategoryCost::operator+=(const CategoryCost& other) {
  prompt_tokens += other.prompt_tokens;
  completion_tokens += other.completion_tokens;
  cost += other.cost;
  return *this;
}

const CategoryCost& CostBreakdown::at(UsageCategory category) const { return categories[index_of(category)]; }

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& other) {
  for (std::size_t i = 0; i < categories.size(); ++i) categories[i] += other.categories[i];
  total += other.total;
  return *this;
}

Json CostBreakdown::to_json() const {
  auto entry = [](const CategoryCost& c) {
    Json j;
    j["prompt_tokens"] = c.prompt_tokens;
    j["completion_tokens"] = c.completion_tokens;
    j["total_tokens"] = c.total_tokens();
    j["cost"] = c.cost;
    return j;
  };
  Json out;
  out["categories"] = Json::object();
  for (auto c : kCategories) out["categories"][to_string(c)] = entry(at(c));
  out["total"] = entry(total);
  return out;
}

CostBreakdown cost_report(std::span<const TokenUsage> usages, const BackendProfile& profile) {
  CostBreakdown out;
  for (const auto& u : usages) {
    auto& slot = out.categories[index_of(u.category)];
    slot.prompt_tokens += u.prompt_tokens;
    slot.completion_tokens += u.completion_tokens;
  }
  for (auto& slot : out.categories) {
    slot.cost = static_cast<double>(slot.prompt_tokens) * profile.input_price_per_million / 1e6 +
                static_cast<double>(slot.completion_tokens) * profile.output_price_per_million / 1e6;
    out.total += slot;
  }
  return out;
}

double round_currency(double amount) { return std::round(amount * 100.0) / 100.0; }

void UsageLedger::record(const TokenUsage& usage) {
  std::lock_guard lock(mutex_);
  usages_.push_back(usage);
}

std::vector<TokenUsage> UsageLedger::usages() const {
  std::lock_guard lock(mutex_);
  return usages_;
}

}  // namespace mockingbird::backend

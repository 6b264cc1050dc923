#pragma once

#include <array>
#include <mutex>
#include <span>
#include <vector>

#include "mockingbird/backend/backend.hpp"

namespace mockingbird::backend {

struct CategoryCost {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  double cost = 0.0;

  std::size_t total_tokens() const noexcept { return prompt_tokens + completion_tokens; }
  CategoryCost& operator+=(const CategoryCost& other);
};

/// Token usage and money cost per usage category, plus the grand total.
struct CostBreakdown {
  static constexpr std::array<UsageCategory, 4> kCategories{UsageCategory::invocation, UsageCategory::reflection,
                                                            UsageCategory::compression,
                                                            UsageCategory::script_generation};

  std::array<CategoryCost, 4> categories{};
  CategoryCost total;

  const CategoryCost& at(UsageCategory category) const;
  CostBreakdown& operator+=(const CostBreakdown& other);
  Json to_json() const;
};

/// cost = prompt * input_price / 1e6 + completion * output_price / 1e6, summed per category.
CostBreakdown cost_report(std::span<const TokenUsage> usages, const BackendProfile& profile);

/// Rounds to cents, as reported in cost tables.
double round_currency(double amount);

/// Thread-safe list of usages observed during a run.
class UsageLedger {
 public:
  void record(const TokenUsage& usage);
  std::vector<TokenUsage> usages() const;

 private:
  mutable std::mutex mutex_;
  std::vector<TokenUsage> usages_;
};

}  // namespace mockingbird::backend

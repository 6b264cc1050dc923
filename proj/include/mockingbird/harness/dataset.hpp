#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mockingbird/contract/contract.hpp"
#include "mockingbird/harness/csv.hpp"
#include "mockingbird/trainer/trainer.hpp"

namespace mockingbird::harness {

class DatasetError : public Error {
 public:
  using Error::Error;
};

struct FeatureMapping {
  std::string column;
  std::string param;
};

struct DatasetSpec {
  std::filesystem::path path;
  std::vector<FeatureMapping> features;
  std::string label;
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
};

/// {"path", "features": {column: param} or [column...], "label", "train_fraction", "seed"}.
/// Relative paths resolve against `base_dir`.
DatasetSpec dataset_spec_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
Json dataset_spec_to_json(const DatasetSpec& spec);

/// Throws DatasetError when the label is also a feature or the fraction is outside (0, 1).
void check(const DatasetSpec& spec);

struct Dataset {
  std::vector<trainer::Example> train;
  std::vector<trainer::Example> eval;
};

/// Converts one CSV cell to the JSON value `spec` describes. Throws DatasetError.
Json parse_cell(const contract::ValueSpec& spec, const std::string& cell);

/// Seeded shuffle, then the first round(n * fraction) rows train and the rest evaluate.
std::vector<std::size_t> split_order(std::size_t n, std::uint64_t seed);

Dataset build_dataset(const CsvTable& table, const DatasetSpec& spec, const contract::FunctionContract& contract);
Dataset load_dataset(const DatasetSpec& spec, const contract::FunctionContract& contract);

}  // namespace mockingbird::harness

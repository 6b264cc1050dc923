#include "mockingbird/harness/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

namespace mockingbird::harness {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

DatasetSpec dataset_spec_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  DatasetSpec spec;
  std::filesystem::path path = doc.at("path").get<std::string>();
  spec.path = path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  const auto& features = doc.at("features");
  if (features.is_object()) {
    for (const auto& [column, param] : features.items()) spec.features.push_back({column, param.get<std::string>()});
  } else {
    for (const auto& column : features) spec.features.push_back({column.get<std::string>(), column.get<std::string>()});
  }
  spec.label = doc.at("label").get<std::string>();
  spec.train_fraction = doc.value("train_fraction", spec.train_fraction);
  spec.seed = doc.value("seed", spec.seed);
  check(spec);
  return spec;
}

Json dataset_spec_to_json(const DatasetSpec& spec) {
  Json features = Json::object();
  for (const auto& f : spec.features) features[f.column] = f.param;
  return Json{{"path", spec.path.string()},
              {"features", features},
              {"label", spec.label},
              {"train_fraction", spec.train_fraction},
              {"seed", spec.seed}};
}

void check(const DatasetSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw DatasetError("train_fraction must lie strictly between 0 and 1");
  }
  if (spec.label.empty()) throw DatasetError("label column is not set");
  for (const auto& f : spec.features) {
    if (f.column == spec.label) throw DatasetError("label column \"" + spec.label + "\" is also listed as a feature");
  }
}

Json parse_cell(const contract::ValueSpec& spec, const std::string& raw) {
  using contract::ValueType;
  std::string cell = trim(raw);
  auto bad = [&](const char* what) -> DatasetError {
    return DatasetError("cannot parse \"" + raw + "\" as " + what);
  };
  switch (spec.type) {
    case ValueType::boolean: {
      auto v = lower(cell);
      if (v == "true" || v == "yes" || v == "1") return true;
      if (v == "false" || v == "no" || v == "0") return false;
      throw bad("a boolean");
    }
    case ValueType::integer: {
      try {
        std::size_t used = 0;
        long long v = std::stoll(cell, &used);
        if (used == cell.size()) return static_cast<std::int64_t>(v);
        double d = std::stod(cell, &used);
        if (used == cell.size() && std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e18) {
          return static_cast<std::int64_t>(d);
        }
      } catch (const std::exception&) {
      }
      throw bad("an integer");
    }
    case ValueType::number: {
      try {
        std::size_t used = 0;
        double d = std::stod(cell, &used);
        if (used == cell.size() && std::isfinite(d)) return d;
      } catch (const std::exception&) {
      }
      throw bad("a number");
    }
    case ValueType::enumeration:
      if (std::find(spec.enum_values.begin(), spec.enum_values.end(), cell) == spec.enum_values.end()) {
        throw bad("one of the enumerated values");
      }
      return cell;
    case ValueType::string:
      return raw;
    case ValueType::object:
    case ValueType::array: {
      auto doc = Json::parse(cell, nullptr, false);
      if (doc.is_discarded()) throw bad("a JSON document");
      return doc;
    }
  }
  throw bad("a value");
}

std::vector<std::size_t> split_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with plain modulo so the order is identical on every standard library.
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

Dataset build_dataset(const CsvTable& table, const DatasetSpec& spec, const contract::FunctionContract& contract) {
  check(spec);
  auto column_index = [&](const std::string& name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw DatasetError("unknown column \"" + name + "\"");
    return static_cast<std::size_t>(it - table.header.begin());
  };

  struct Binding {
    std::size_t column;
    const contract::ParamSpec* param;
  };
  std::vector<Binding> bindings;
  for (const auto& f : spec.features) {
    auto p = std::find_if(contract.params.begin(), contract.params.end(),
                          [&](const contract::ParamSpec& ps) { return ps.name == f.param; });
    if (p == contract.params.end()) {
      throw DatasetError("feature \"" + f.column + "\" maps to unknown parameter \"" + f.param + "\"");
    }
    bindings.push_back({column_index(f.column), &*p});
  }
  std::size_t label_column = column_index(spec.label);

  std::vector<trainer::Example> examples;
  examples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto where = [&](const std::string& column) { return "row " + std::to_string(r + 2) + ", column " + column; };
    trainer::Example ex;
    ex.arguments = Json::object();
    for (const auto& b : bindings) {
      const auto& cell = row[b.column];
      if (trim(cell).empty()) continue;
      try {
        ex.arguments[b.param->name] = parse_cell(b.param->value, cell);
      } catch (const DatasetError& e) {
        throw DatasetError(where(table.header[b.column]) + ": " + e.what());
      }
    }
    if (trim(row[label_column]).empty()) throw DatasetError(where(spec.label) + ": label is empty");
    try {
      ex.truth = parse_cell(contract.return_spec, row[label_column]);
    } catch (const DatasetError& e) {
      throw DatasetError(where(spec.label) + ": " + e.what());
    }
    examples.push_back(std::move(ex));
  }

  auto order = split_order(examples.size(), spec.seed);
  auto n_train = static_cast<std::size_t>(std::lround(static_cast<double>(examples.size()) * spec.train_fraction));
  Dataset out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.train : out.eval).push_back(examples[order[i]]);
  }
  return out;
}

Dataset load_dataset(const DatasetSpec& spec, const contract::FunctionContract& contract) {
  return build_dataset(read_csv(spec.path), spec, contract);
}

}  // namespace mockingbird::harness

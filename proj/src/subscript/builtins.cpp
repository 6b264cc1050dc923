#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>

#include "ast.hpp"

namespace mockingbird::subscript {

void type_fault(SourceLocation where, const std::string& message) {
  throw ScriptFault(FaultKind::type_error, where, message);
}

std::string value_kind(const Json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

namespace {

const std::string& want_string(const Json& v, SourceLocation at, const char* fn) {
  if (!v.is_string()) type_fault(at, std::string(fn) + " expects a string, got " + value_kind(v));
  return v.get_ref<const std::string&>();
}

double want_number(const Json& v, SourceLocation at, const char* fn) {
  if (!v.is_number()) type_fault(at, std::string(fn) + " expects a number, got " + value_kind(v));
  return v.get<double>();
}

Json finite(double x, SourceLocation at, const char* fn) {
  if (!std::isfinite(x)) throw ScriptFault(FaultKind::arithmetic, at, std::string(fn) + " produced a non-finite result");
  return x;
}

Json to_integer(double x, SourceLocation at, const char* fn) {
  constexpr double lo = -9223372036854775808.0;
  if (!std::isfinite(x) || x < lo || x >= -lo) {
    throw ScriptFault(FaultKind::arithmetic, at, std::string(fn) + " result does not fit an integer");
  }
  return static_cast<std::int64_t>(x);
}

std::optional<double> parse_decimal(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return std::nullopt;
  std::size_t e = s.find_last_not_of(" \t\r\n");
  std::string core = s.substr(b, e - b + 1);
  try {
    std::size_t used = 0;
    double x = std::stod(core, &used);
    if (used != core.size() || !std::isfinite(x)) return std::nullopt;
    return x;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Json fn_has(std::vector<Json>& a, SourceLocation at) {
  if (!a[0].is_object()) type_fault(at, "has expects an object, got " + value_kind(a[0]));
  return a[0].contains(want_string(a[1], at, "has"));
}

Json fn_get(std::vector<Json>& a, SourceLocation at) {
  Json fallback = a.size() > 2 ? a[2] : Json();
  if (a[0].is_object()) {
    auto it = a[0].find(want_string(a[1], at, "get"));
    return it == a[0].end() ? fallback : *it;
  }
  if (a[0].is_array()) {
    if (!a[1].is_number_integer()) type_fault(at, "get on an array expects an integer index");
    auto i = a[1].get<std::int64_t>();
    if (i < 0 || i >= static_cast<std::int64_t>(a[0].size())) return fallback;
    return a[0][static_cast<std::size_t>(i)];
  }
  type_fault(at, "get expects an object or array, got " + value_kind(a[0]));
}

Json fn_len(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_string()) return static_cast<std::int64_t>(a[0].get_ref<const std::string&>().size());
  if (a[0].is_array() || a[0].is_object()) return static_cast<std::int64_t>(a[0].size());
  type_fault(at, "len expects a string, array or object, got " + value_kind(a[0]));
}

Json fn_lower(std::vector<Json>& a, SourceLocation at) {
  std::string s = want_string(a[0], at, "lower");
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Json fn_upper(std::vector<Json>& a, SourceLocation at) {
  std::string s = want_string(a[0], at, "upper");
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

Json fn_trim(std::vector<Json>& a, SourceLocation at) {
  const auto& s = want_string(a[0], at, "trim");
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Json fn_contains(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_array()) return std::find(a[0].begin(), a[0].end(), a[1]) != a[0].end();
  const auto& s = want_string(a[0], at, "contains");
  return s.find(want_string(a[1], at, "contains")) != std::string::npos;
}

Json fn_starts_with(std::vector<Json>& a, SourceLocation at) {
  return want_string(a[0], at, "starts_with").starts_with(want_string(a[1], at, "starts_with"));
}

Json fn_ends_with(std::vector<Json>& a, SourceLocation at) {
  return want_string(a[0], at, "ends_with").ends_with(want_string(a[1], at, "ends_with"));
}

Json fn_replace(std::vector<Json>& a, SourceLocation at) {
  std::string s = want_string(a[0], at, "replace");
  const auto& from = want_string(a[1], at, "replace");
  const auto& to = want_string(a[2], at, "replace");
  if (from.empty()) type_fault(at, "replace expects a non-empty search string");
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto hit = s.find(from, pos);
    if (hit == std::string::npos) break;
    out.append(s, pos, hit - pos);
    out += to;
    pos = hit + from.size();
  }
  out.append(s, pos);
  return out;
}

Json fn_split(std::vector<Json>& a, SourceLocation at) {
  const auto& s = want_string(a[0], at, "split");
  const auto& sep = want_string(a[1], at, "split");
  if (sep.empty()) type_fault(at, "split expects a non-empty separator");
  Json out = Json::array();
  std::size_t pos = 0;
  while (true) {
    auto hit = s.find(sep, pos);
    if (hit == std::string::npos) break;
    out.push_back(s.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
  out.push_back(s.substr(pos));
  return out;
}

Json fn_join(std::vector<Json>& a, SourceLocation at) {
  if (!a[0].is_array()) type_fault(at, "join expects an array, got " + value_kind(a[0]));
  const auto& sep = want_string(a[1], at, "join");
  std::string out;
  bool first = true;
  for (const auto& item : a[0]) {
    if (!first) out += sep;
    first = false;
    out += want_string(item, at, "join");
  }
  return out;
}

Json fn_str(std::vector<Json>& a, SourceLocation) {
  if (a[0].is_string()) return a[0];
  return a[0].dump();
}

Json fn_num(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_number()) return a[0].get<double>();
  if (a[0].is_string()) {
    if (auto x = parse_decimal(a[0].get_ref<const std::string&>())) return *x;
    type_fault(at, "num cannot parse \"" + a[0].get<std::string>() + "\"");
  }
  type_fault(at, "num expects a number or string, got " + value_kind(a[0]));
}

Json fn_int(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_number_integer()) return a[0];
  if (a[0].is_number()) return to_integer(std::trunc(a[0].get<double>()), at, "int");
  if (a[0].is_string()) {
    if (auto x = parse_decimal(a[0].get_ref<const std::string&>())) return to_integer(std::trunc(*x), at, "int");
    type_fault(at, "int cannot parse \"" + a[0].get<std::string>() + "\"");
  }
  type_fault(at, "int expects a number or string, got " + value_kind(a[0]));
}

Json fn_floor(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_number_integer()) return a[0];
  return to_integer(std::floor(want_number(a[0], at, "floor")), at, "floor");
}

Json fn_ceil(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_number_integer()) return a[0];
  return to_integer(std::ceil(want_number(a[0], at, "ceil")), at, "ceil");
}

Json fn_round(std::vector<Json>& a, SourceLocation at) {
  double x = want_number(a[0], at, "round");
  if (a.size() == 1) {
    if (a[0].is_number_integer()) return a[0];
    return to_integer(std::round(x), at, "round");
  }
  if (!a[1].is_number_integer()) type_fault(at, "round expects an integer digit count");
  auto digits = a[1].get<std::int64_t>();
  if (digits < 0 || digits > 15) type_fault(at, "round digit count must be between 0 and 15");
  double scale = std::pow(10.0, static_cast<double>(digits));
  return finite(std::round(x * scale) / scale, at, "round");
}

Json fn_abs(std::vector<Json>& a, SourceLocation at) {
  if (a[0].is_number_integer()) {
    auto i = a[0].get<std::int64_t>();
    if (i == std::numeric_limits<std::int64_t>::min()) throw ScriptFault(FaultKind::arithmetic, at, "abs overflow");
    return i < 0 ? -i : i;
  }
  return std::fabs(want_number(a[0], at, "abs"));
}

Json fn_sqrt(std::vector<Json>& a, SourceLocation at) {
  double x = want_number(a[0], at, "sqrt");
  if (x < 0) throw ScriptFault(FaultKind::arithmetic, at, "sqrt of a negative number");
  return std::sqrt(x);
}

Json fn_pow(std::vector<Json>& a, SourceLocation at) {
  return finite(std::pow(want_number(a[0], at, "pow"), want_number(a[1], at, "pow")), at, "pow");
}

Json fn_exp(std::vector<Json>& a, SourceLocation at) { return finite(std::exp(want_number(a[0], at, "exp")), at, "exp"); }

Json fn_log(std::vector<Json>& a, SourceLocation at) {
  double x = want_number(a[0], at, "log");
  if (x <= 0) throw ScriptFault(FaultKind::arithmetic, at, "log of a non-positive number");
  return std::log(x);
}

Json extremum(std::vector<Json>& a, SourceLocation at, const char* fn, bool want_max) {
  const std::vector<Json>* items = &a;
  std::vector<Json> unpacked;
  if (a.size() == 1 && a[0].is_array()) {
    unpacked.assign(a[0].begin(), a[0].end());
    items = &unpacked;
  }
  if (items->empty()) type_fault(at, std::string(fn) + " of an empty array");
  const Json* best = nullptr;
  for (const auto& v : *items) {
    double x = want_number(v, at, fn);
    if (!best || (want_max ? x > best->get<double>() : x < best->get<double>())) best = &v;
  }
  return *best;
}

Json fn_min(std::vector<Json>& a, SourceLocation at) { return extremum(a, at, "min", false); }
Json fn_max(std::vector<Json>& a, SourceLocation at) { return extremum(a, at, "max", true); }

Json fn_clamp(std::vector<Json>& a, SourceLocation at) {
  double x = want_number(a[0], at, "clamp");
  double lo = want_number(a[1], at, "clamp");
  double hi = want_number(a[2], at, "clamp");
  if (lo > hi) type_fault(at, "clamp lower bound exceeds upper bound");
  if (x < lo) return a[1];
  if (x > hi) return a[2];
  return a[0];
}

Json fn_is_null(std::vector<Json>& a, SourceLocation) { return a[0].is_null(); }

Json fn_type(std::vector<Json>& a, SourceLocation) { return value_kind(a[0]); }

Json fn_keys(std::vector<Json>& a, SourceLocation at) {
  if (!a[0].is_object()) type_fault(at, "keys expects an object, got " + value_kind(a[0]));
  Json out = Json::array();
  for (const auto& [k, _] : a[0].items()) out.push_back(k);
  return out;
}

Json fn_push(std::vector<Json>& a, SourceLocation at) {
  if (!a[0].is_array()) type_fault(at, "push expects an array, got " + value_kind(a[0]));
  Json out = std::move(a[0]);
  out.push_back(std::move(a[1]));
  return out;
}

constexpr Builtin kBuiltins[] = {
    {"abs", 1, 1, fn_abs},           {"ceil", 1, 1, fn_ceil},
    {"clamp", 3, 3, fn_clamp},       {"contains", 2, 2, fn_contains},
    {"ends_with", 2, 2, fn_ends_with}, {"exp", 1, 1, fn_exp},
    {"floor", 1, 1, fn_floor},       {"get", 2, 3, fn_get},
    {"has", 2, 2, fn_has},           {"int", 1, 1, fn_int},
    {"is_null", 1, 1, fn_is_null},   {"join", 2, 2, fn_join},
    {"keys", 1, 1, fn_keys},         {"len", 1, 1, fn_len},
    {"log", 1, 1, fn_log},           {"lower", 1, 1, fn_lower},
    {"max", 1, -1, fn_max},          {"min", 1, -1, fn_min},
    {"num", 1, 1, fn_num},           {"pow", 2, 2, fn_pow},
    {"push", 2, 2, fn_push},         {"replace", 3, 3, fn_replace},
    {"round", 1, 2, fn_round},       {"split", 2, 2, fn_split},
    {"sqrt", 1, 1, fn_sqrt},         {"starts_with", 2, 2, fn_starts_with},
    {"str", 1, 1, fn_str},           {"trim", 1, 1, fn_trim},
    {"type", 1, 1, fn_type},         {"upper", 1, 1, fn_upper},
};

}  // namespace

const Builtin* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name) return &b;
  }
  return nullptr;
}

}  // namespace mockingbird::subscript

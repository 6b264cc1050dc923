#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace mockingbird {

/// Documents keep insertion order so that rendered prompts follow declaration order.
using Json = nlohmann::ordered_json;

using TimePoint = std::chrono::system_clock::time_point;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time source. Deterministic runs install a logical clock so logs are byte-reproducible.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() override { return std::chrono::system_clock::now(); }
};

/// Starts at a fixed instant and advances by a fixed step on every read.
class LogicalClock final : public Clock {
 public:
  explicit LogicalClock(TimePoint start, std::chrono::milliseconds step = std::chrono::milliseconds(1000));
  TimePoint now() override;

 private:
  std::mutex mutex_;
  TimePoint current_;
  std::chrono::milliseconds step_;
};

/// 12-byte identifiers in the MongoDB ObjectId layout: 4 bytes of seconds,
/// 5 bytes of seeded randomness, 3 bytes of counter. Rendered as 24 hex chars.
class IdGenerator {
 public:
  IdGenerator(std::uint64_t seed, std::shared_ptr<Clock> clock);
  std::string next();

 private:
  std::mutex mutex_;
  std::mt19937_64 rng_;
  std::shared_ptr<Clock> clock_;
  std::uint64_t process_bytes_;
  std::uint32_t counter_;
};

bool is_object_id(std::string_view text);

/// ISO-8601 UTC with millisecond precision, e.g. "2024-11-25T08:00:00.000Z".
std::string format_timestamp(TimePoint t);
TimePoint parse_timestamp(std::string_view text);

/// Compact serialization used for prompts, comparisons and logs.
std::string canonical(const Json& value);

/// Shared services a run hands to the components that mint ids and timestamps.
struct Runtime {
  std::shared_ptr<Clock> clock;
  std::shared_ptr<IdGenerator> ids;

  static Runtime system(std::uint64_t seed);
  /// Fixed clock and seed; everything derived from it is reproducible.
  static Runtime deterministic(std::uint64_t seed = 42);
};

}  // namespace mockingbird

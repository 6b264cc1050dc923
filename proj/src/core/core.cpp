#include "mockingbird/core.hpp"

#include <array>
#include <cctype>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace mockingbird {

LogicalClock::LogicalClock(TimePoint start, std::chrono::milliseconds step) : current_(start), step_(step) {}

TimePoint LogicalClock::now() {
  std::lock_guard lock(mutex_);
  auto t = current_;
  current_ += step_;
  return t;
}

IdGenerator::IdGenerator(std::uint64_t seed, std::shared_ptr<Clock> clock)
    : rng_(seed), clock_(std::move(clock)) {
  process_bytes_ = rng_() & 0xFFFFFFFFFFULL;
  counter_ = static_cast<std::uint32_t>(rng_() & 0xFFFFFF);
}

std::string IdGenerator::next() {
  std::lock_guard lock(mutex_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(clock_->now().time_since_epoch()).count();
  std::array<std::uint8_t, 12> bytes{};
  auto ts = static_cast<std::uint32_t>(seconds);
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<std::uint8_t>(ts >> (24 - 8 * i));
  for (int i = 0; i < 5; ++i) bytes[4 + i] = static_cast<std::uint8_t>(process_bytes_ >> (32 - 8 * i));
  counter_ = (counter_ + 1) & 0xFFFFFF;
  for (int i = 0; i < 3; ++i) bytes[9 + i] = static_cast<std::uint8_t>(counter_ >> (16 - 8 * i));

  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(24);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

bool is_object_id(std::string_view text) {
  if (text.size() != 24) return false;
  for (char c : text) {
    if (!std::isxdigit(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string format_timestamp(TimePoint t) {
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto frac = ms % 1000;
  if (frac < 0) {
    frac += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << frac << 'Z';
  return os.str();
}

TimePoint parse_timestamp(std::string_view text) {
  std::tm tm{};
  std::istringstream is{std::string(text)};
  is >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (is.fail()) throw Error("invalid timestamp: " + std::string(text));
  long long frac = 0;
  if (is.peek() == '.') {
    is.get();
    std::string digits;
    while (std::isdigit(is.peek())) digits.push_back(static_cast<char>(is.get()));
    digits = (digits + "000").substr(0, 3);
    frac = std::stoll(digits);
  }
  auto secs = timegm(&tm);
  return TimePoint(std::chrono::milliseconds(static_cast<long long>(secs) * 1000 + frac));
}

std::string canonical(const Json& value) { return value.dump(); }

Runtime Runtime::system(std::uint64_t seed) {
  auto clock = std::make_shared<SystemClock>();
  return Runtime{clock, std::make_shared<IdGenerator>(seed, clock)};
}

Runtime Runtime::deterministic(std::uint64_t seed) {
  // 2024-11-25T00:00:00Z
  auto clock = std::make_shared<LogicalClock>(TimePoint(std::chrono::seconds(1732492800)));
  return Runtime{clock, std::make_shared<IdGenerator>(seed, clock)};
}

}  // namespace mockingbird

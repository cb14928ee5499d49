#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace duet {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;  // epoch milliseconds, UTC
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() override;
};

// Deterministic clock for replays and tests: returns start, start+step, ...
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 1'700'000'000'000, std::int64_t step_ms = 1)
      : next_(start_ms), step_(step_ms) {}

  std::int64_t now_ms() override { return next_.fetch_add(step_); }
  void set(std::int64_t ms) { next_.store(ms); }

 private:
  std::atomic<std::int64_t> next_;
  std::int64_t step_;
};

using IdGenerator = std::function<std::string()>;

// 128 random bits, hex encoded.
IdGenerator random_id_generator();
// "<prefix>0001", "<prefix>0002", ...
IdGenerator sequential_id_generator(std::string prefix = "s-");

}  // namespace duet

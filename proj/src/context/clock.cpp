#include "duet/context/clock.hpp"

#include <chrono>
#include <cstdio>
#include <mutex>
#include <random>

namespace duet {

std::int64_t SystemClock::now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

IdGenerator random_id_generator() {
  auto state = std::make_shared<std::pair<std::mutex, std::mt19937_64>>();
  std::random_device rd;
  std::seed_seq seed{rd(), rd(), rd(), rd()};
  state->second.seed(seed);
  return [state] {
    std::lock_guard lock(state->first);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(state->second()),
                  static_cast<unsigned long long>(state->second()));
    return std::string(buf);
  };
}

IdGenerator sequential_id_generator(std::string prefix) {
  auto counter = std::make_shared<std::atomic<unsigned>>(0);
  return [counter, prefix = std::move(prefix)] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04u", counter->fetch_add(1) + 1);
    return prefix + buf;
  };
}

}  // namespace duet

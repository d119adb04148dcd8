#pragma once

#include <chrono>
#include <ctime>
#include <mutex>
#include <string>
#include <thread>

namespace mtbias {

/// Time source used by retry backoff, rate limiting and record timestamps.
class Clock {
 public:
  using duration = std::chrono::nanoseconds;
  using time_point = std::chrono::time_point<std::chrono::system_clock, duration>;

  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() const override {
    return std::chrono::time_point_cast<duration>(std::chrono::system_clock::now());
  }
  void sleep_for(duration d) override { std::this_thread::sleep_for(d); }
};

/// Manually driven clock: sleep_for advances time instantly.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(time_point start = time_point{}) : now_(start) {}

  time_point now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void sleep_for(duration d) override {
    std::lock_guard lock(mu_);
    if (d > duration::zero()) now_ += d;
    slept_ += d > duration::zero() ? d : duration::zero();
  }
  void advance(duration d) { sleep_for(d); }

  duration total_slept() const {
    std::lock_guard lock(mu_);
    return slept_;
  }

 private:
  mutable std::mutex mu_;
  time_point now_;
  duration slept_{};
};

/// ISO-8601 UTC with second precision, e.g. 2021-04-12T09:30:00Z.
inline std::string format_utc(Clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::time_point_cast<std::chrono::system_clock::duration>(tp));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mtbias

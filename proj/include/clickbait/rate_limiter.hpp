#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>

#include "clickbait/errors.hpp"

namespace clickbait {

using Millis = std::chrono::milliseconds;

struct RateDecision {
  bool allowed = true;
  std::int64_t retry_after_seconds = 0;  // only meaningful when denied
};

// Fixed-window counter per client key. The window opens at the first
// request after the previous one expired. Callers pass `now` explicitly;
// nothing here reads a clock.
class FixedWindowLimiter {
 public:
  explicit FixedWindowLimiter(std::uint32_t capacity = 2, Millis window = std::chrono::seconds(60))
      : capacity_(capacity), window_(window) {
    if (capacity_ < 1) throw InvalidInput("rate capacity must be at least 1");
    if (window_ <= Millis::zero()) throw InvalidInput("rate window must be positive");
  }

  RateDecision check(const std::string& key, Millis now) {
    std::lock_guard lock(mu_);
    if (windows_.size() >= kSweepThreshold) sweep(now);

    auto [it, fresh] = windows_.try_emplace(key, Window{now, 0});
    Window& w = it->second;
    if (!fresh && now - w.start >= window_) w = Window{now, 0};
    if (w.count < capacity_) {
      ++w.count;
      return {true, 0};
    }
    const auto remaining = w.start + window_ - now;
    const std::int64_t secs = (remaining.count() + 999) / 1000;
    return {false, secs < 1 ? 1 : secs};
  }

  std::uint32_t capacity() const noexcept { return capacity_; }
  Millis window() const noexcept { return window_; }

  std::size_t tracked_keys() const {
    std::lock_guard lock(mu_);
    return windows_.size();
  }

 private:
  struct Window {
    Millis start;
    std::uint32_t count;
  };

  static constexpr std::size_t kSweepThreshold = 4096;

  void sweep(Millis now) {
    for (auto it = windows_.begin(); it != windows_.end();) {
      if (now - it->second.start >= window_) it = windows_.erase(it);
      else ++it;
    }
  }

  std::uint32_t capacity_;
  Millis window_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Window> windows_;
};

}  // namespace clickbait

#include <gtest/gtest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "clickbait/rate_limiter.hpp"

using namespace clickbait;
using std::chrono::seconds;

TEST(FixedWindow, SpecSequence) {
  FixedWindowLimiter lim(2, seconds(60));
  EXPECT_TRUE(lim.check("ip", seconds(0)).allowed);
  EXPECT_TRUE(lim.check("ip", seconds(10)).allowed);
  const RateDecision d = lim.check("ip", seconds(30));
  EXPECT_FALSE(d.allowed);
  EXPECT_EQ(d.retry_after_seconds, 30);
  EXPECT_TRUE(lim.check("ip", seconds(61)).allowed);
}

TEST(FixedWindow, KeysAreIndependent) {
  FixedWindowLimiter lim(2, seconds(60));
  lim.check("a", seconds(0));
  lim.check("a", seconds(0));
  EXPECT_FALSE(lim.check("a", seconds(1)).allowed);
  EXPECT_TRUE(lim.check("b", seconds(1)).allowed);
}

TEST(FixedWindow, WindowBoundaryIsExclusive) {
  FixedWindowLimiter lim(1, seconds(60));
  EXPECT_TRUE(lim.check("k", Millis(0)).allowed);
  EXPECT_FALSE(lim.check("k", Millis(59'999)).allowed);
  EXPECT_TRUE(lim.check("k", Millis(60'000)).allowed);
}

TEST(FixedWindow, DeniedRequestsDoNotExtendWindow) {
  FixedWindowLimiter lim(1, seconds(60));
  lim.check("k", seconds(0));
  for (int t = 1; t < 60; t += 7) EXPECT_FALSE(lim.check("k", seconds(t)).allowed);
  EXPECT_TRUE(lim.check("k", seconds(60)).allowed);
}

TEST(FixedWindow, RetryAfterRoundsUpAndIsAtLeastOne) {
  FixedWindowLimiter lim(1, seconds(60));
  lim.check("k", Millis(0));
  EXPECT_EQ(lim.check("k", Millis(500)).retry_after_seconds, 60);
  EXPECT_EQ(lim.check("k", Millis(59'999)).retry_after_seconds, 1);
}

TEST(FixedWindow, RejectsBadConfig) {
  EXPECT_THROW(FixedWindowLimiter(0, seconds(1)), InvalidInput);
  EXPECT_THROW(FixedWindowLimiter(1, Millis(0)), InvalidInput);
}

TEST(FixedWindow, ExpiredKeysAreSwept) {
  FixedWindowLimiter lim(1, seconds(1));
  for (int i = 0; i < 5000; ++i) lim.check("k" + std::to_string(i), Millis(0));
  lim.check("late", seconds(5));
  EXPECT_LT(lim.tracked_keys(), 5000u);
}

TEST(FixedWindowConcurrency, ExactlyCapacityAdmitted) {
  for (int round = 0; round < 20; ++round) {
    FixedWindowLimiter lim(2, seconds(60));
    std::atomic<int> allowed{0};
    std::atomic<bool> go{false};
    std::vector<std::thread> threads;
    for (int i = 0; i < 100; ++i) {
      threads.emplace_back([&] {
        while (!go.load()) std::this_thread::yield();
        if (lim.check("same", seconds(0)).allowed) ++allowed;
      });
    }
    go = true;
    for (auto& t : threads) t.join();
    ASSERT_EQ(allowed.load(), 2);
  }
}

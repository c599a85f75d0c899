#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

#include "synch/locks.hpp"
#include "synch/runtime.hpp"

using namespace synch;

template <class Lock>
class LockTest : public ::testing::Test {};

using LockTypes = ::testing::Types<ClhLock, McsLock>;
TYPED_TEST_SUITE(LockTest, LockTypes);

TYPED_TEST(LockTest, TicketsCountAcquisitions) {
  TypeParam lock(1);
  EXPECT_EQ(lock.acquire(0), 0u);
  lock.release(0);
  EXPECT_EQ(lock.acquire(0), 1u);
  lock.release(0);
}

TYPED_TEST(LockTest, ReacquireFromAnotherThread) {
  TypeParam lock(2);
  lock.acquire(0);
  lock.release(0);
  std::thread other([&] {
    EXPECT_EQ(lock.acquire(1), 1u);
    lock.release(1);
  });
  other.join();
}

TYPED_TEST(LockTest, PlainCounterIsExact) {
  constexpr int kThreads = 8, kPerThread = 10000;
  TypeParam lock(kThreads);
  std::uint64_t counter = 0;  // plain on purpose
  AtomicWord owner;
  const auto violations = spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    int bad = 0;
    for (int i = 0; i < kPerThread; ++i) {
      LockGuard guard(lock, tid);
      bad += !owner.compare_and_swap(0, static_cast<std::uint64_t>(tid) + 1);
      ++counter;
      bad += !owner.compare_and_swap(static_cast<std::uint64_t>(tid) + 1, 0);
    }
    return bad;
  });
  EXPECT_EQ(counter, static_cast<std::uint64_t>(kThreads) * kPerThread);
  EXPECT_EQ(std::accumulate(violations.begin(), violations.end(), 0), 0);
}

TYPED_TEST(LockTest, GrantOrderEqualsTicketOrder) {
  constexpr int kThreads = 8, kPerThread = 1250;  // 10^4 acquisitions
  TypeParam lock(kThreads);
  std::uint64_t grants = 0;
  const auto inversions = spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    int bad = 0;
    for (int i = 0; i < kPerThread; ++i) {
      const std::uint64_t ticket = lock.acquire(tid);
      bad += ticket != grants++;
      lock.release(tid);
    }
    return bad;
  });
  EXPECT_EQ(grants, static_cast<std::uint64_t>(kThreads) * kPerThread);
  EXPECT_EQ(std::accumulate(inversions.begin(), inversions.end(), 0), 0);
}

TYPED_TEST(LockTest, ReleaseByNonOwnerIsDetected) {
  TypeParam lock(2);
  EXPECT_THROW(lock.release(0), LockMisuse);
  lock.acquire(0);
  EXPECT_THROW(lock.release(1), LockMisuse);
  lock.release(0);
}

namespace {

// Records the first lock-spin report of a given thread and when spinning ended.
class SpinWatch final : public YieldHook {
 public:
  void on_yield(YieldPoint point, int tid, const void* cell, std::uint64_t aux) override {
    if (point != YieldPoint::kLockSpin) return;
    std::lock_guard g(mutex_);
    spins.push_back({tid, cell, aux});
    waiting.store(true);
  }
  struct Spin {
    int tid;
    const void* cell;
    std::uint64_t aux;
  };
  std::mutex mutex_;
  std::vector<Spin> spins;
  std::atomic<bool> waiting{false};
};

}  // namespace

TYPED_TEST(LockTest, ReleaseEndsSuccessorSpin) {
  TypeParam lock(2);
  SpinWatch watch;
  ScopedYieldHook installed(watch);
  lock.acquire(0);
  std::atomic<std::uint64_t> acquired_at{0};
  std::thread waiter([&] {
    lock.acquire(1);
    acquired_at.store(now());
    lock.release(1);
  });
  while (!watch.waiting.load()) std::this_thread::yield();
  const std::uint64_t released_at = now();
  lock.release(0);
  waiter.join();
  EXPECT_GE(acquired_at.load(), released_at);
}

TEST(ClhLock, WaitersSpinOnPredecessorRecord) {
  constexpr int kThreads = 4;
  ClhLock lock(kThreads);
  SpinWatch watch;
  {
    ScopedYieldHook installed(watch);
    spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
      for (int i = 0; i < 500; ++i) {
        lock.acquire(tid);
        std::this_thread::yield();  // let others queue up behind us
        lock.release(tid);
      }
    });
  }
  ASSERT_FALSE(watch.spins.empty());
  for (const auto& s : watch.spins) {
    ASSERT_EQ(s.cell, lock.spin_cell(s.aux));
  }
}

TEST(ClhLock, SpinTargetIsNotOwnRecord) {
  ClhLock lock(2);
  SpinWatch watch;
  ScopedYieldHook installed(watch);
  lock.acquire(0);
  const std::uint64_t holder_record = lock.current_record(0);
  const std::uint64_t waiter_record = lock.current_record(1);
  std::thread waiter([&] {
    lock.acquire(1);
    lock.release(1);
  });
  while (!watch.waiting.load()) std::this_thread::yield();
  lock.release(0);
  waiter.join();
  std::lock_guard g(watch.mutex_);
  EXPECT_EQ(watch.spins.front().aux, holder_record);
  EXPECT_NE(watch.spins.front().aux, waiter_record);
}

TEST(ClhLock, RecordsCirculate) {
  ClhLock lock(2);
  EXPECT_EQ(lock.current_record(0), 0u);
  lock.acquire(0);
  lock.release(0);
  EXPECT_EQ(lock.current_record(0), 2u);  // adopted the initial sentinel record
  lock.acquire(1);
  lock.release(1);
  EXPECT_EQ(lock.current_record(1), 0u);
}

TEST(McsLock, WaitersSpinOnOwnNode) {
  constexpr int kThreads = 4;
  McsLock lock(kThreads);
  SpinWatch watch;
  {
    ScopedYieldHook installed(watch);
    spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
      for (int i = 0; i < 500; ++i) {
        lock.acquire(tid);
        std::this_thread::yield();
        lock.release(tid);
      }
    });
  }
  ASSERT_FALSE(watch.spins.empty());
  for (const auto& s : watch.spins) ASSERT_EQ(s.cell, lock.spin_cell(s.tid));
}

TYPED_TEST(LockTest, EveryThreadFinishesWithinBudget) {
  constexpr int kThreads = 16, kPerThread = 2000;
  TypeParam lock(kThreads);
  const auto start = std::chrono::steady_clock::now();
  spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    for (int i = 0; i < kPerThread; ++i) {
      lock.acquire(tid);
      lock.release(tid);
    }
  });
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(60));
}

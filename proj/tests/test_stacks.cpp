#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <string>
#include <vector>

#include "small_traces.hpp"
#include "synch/runtime.hpp"
#include "synch/stacks.hpp"

using namespace synch;

class StackTest : public ::testing::TestWithParam<StackKind> {
 protected:
  std::unique_ptr<ConcurrentStack> make(int threads, std::size_t capacity = 1024) {
    return make_stack(GetParam(), threads, 0, capacity);
  }
};

INSTANTIATE_TEST_SUITE_P(AllKinds, StackTest, ::testing::ValuesIn(kAllStackKinds),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           std::replace(name.begin(), name.end(), '-', '_');
                           return name;
                         });

TEST_P(StackTest, EmptyPopSignalsEmpty) {
  auto s = make(1, 16);
  EXPECT_FALSE(s->pop(0).has_value());
  EXPECT_EQ(s->kind(), GetParam());
}

TEST_P(StackTest, LifoSequential) {
  auto s = make(1);
  for (std::uint64_t v : {1, 2, 3}) ASSERT_EQ(s->push(v, 0), OpStatus::kOk);
  EXPECT_EQ(s->pop(0), 3u);
  EXPECT_EQ(s->pop(0), 2u);
  EXPECT_EQ(s->pop(0), 1u);
  EXPECT_FALSE(s->pop(0).has_value());
}

TEST_P(StackTest, PushThenPop) {
  auto s = make(1);
  s->push(7, 0);
  EXPECT_EQ(s->pop(0), 7u);
}

TEST_P(StackTest, InterleavedTrace) {
  auto s = make(1);
  s->push('a', 0);
  s->push('b', 0);
  EXPECT_EQ(s->pop(0), std::uint64_t{'b'});
  s->push('c', 0);
  EXPECT_EQ(s->pop(0), std::uint64_t{'c'});
  EXPECT_EQ(s->pop(0), std::uint64_t{'a'});
}

TEST_P(StackTest, AnyWordIsAValue) {
  auto s = make(1);
  for (std::uint64_t v : {std::uint64_t{0}, UINT64_MAX, std::uint64_t{1} << 63}) s->push(v, 0);
  EXPECT_EQ(s->pop(0), std::uint64_t{1} << 63);
  EXPECT_EQ(s->pop(0), UINT64_MAX);
  EXPECT_EQ(s->pop(0), 0u);
}

TEST_P(StackTest, MatchesReferenceStackStepForStep) {
  Xorshift64Star rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = make(2, 512);
    std::vector<std::uint64_t> reference;
    for (int i = 0; i < 400; ++i) {
      const int tid = static_cast<int>(rng.next_at_most(1));
      if (rng.next_at_most(2) != 0 && reference.size() < 300) {
        const std::uint64_t v = rng.next();
        ASSERT_EQ(s->push(v, tid), OpStatus::kOk);
        reference.push_back(v);
      } else {
        const auto got = s->pop(tid);
        if (reference.empty()) {
          ASSERT_FALSE(got.has_value());
        } else {
          ASSERT_EQ(got, reference.back());
          reference.pop_back();
        }
      }
    }
  }
}

TEST_P(StackTest, ExhaustionLeavesContentIntact) {
  auto s = make(1, 8);
  std::uint64_t accepted = 0;
  while (s->push(accepted, 0) == OpStatus::kOk) ++accepted;
  EXPECT_GE(accepted, 2u);
  EXPECT_EQ(s->push(12345, 0), OpStatus::kExhausted);
  for (std::uint64_t v = accepted; v-- > 0;) ASSERT_EQ(s->pop(0), v);
  EXPECT_FALSE(s->pop(0).has_value());
  EXPECT_EQ(s->push(1, 0), OpStatus::kOk);  // nodes came back
}

TEST_P(StackTest, ConcurrentPushesThenDrain) {
  constexpr int kThreads = 8;
  constexpr std::uint64_t kPerThread = 10000;
  auto s = make(kThreads, kThreads * kPerThread + 64);
  spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    for (std::uint64_t i = 0; i < kPerThread; ++i) s->push((static_cast<std::uint64_t>(tid) << 32) | i, tid);
  });
  std::vector<std::uint64_t> last(kThreads, UINT64_MAX);
  std::uint64_t count = 0;
  std::vector<char> seen(kThreads * kPerThread, 0);
  while (const auto v = s->pop(0)) {
    const auto p = static_cast<std::size_t>(*v >> 32);
    const std::uint64_t i = *v & 0xFFFFFFFF;
    ASSERT_LT(p, static_cast<std::size_t>(kThreads));
    ASSERT_LT(i, kPerThread);
    ASSERT_FALSE(seen[p * kPerThread + i]) << "duplicate";
    seen[p * kPerThread + i] = 1;
    // Each producer's values come out newest first.
    ASSERT_LT(i, last[p]);
    last[p] = i;
    ++count;
  }
  EXPECT_EQ(count, kThreads * kPerThread);
}

TEST_P(StackTest, PushRaceFromEmpty) {
  constexpr int kThreads = 8;
  auto s = make(kThreads, 64);
  Barrier start(kThreads);
  spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    start.wait();
    s->push(static_cast<std::uint64_t>(tid), tid);
  });
  std::vector<std::uint64_t> got;
  while (const auto v = s->pop(0)) got.push_back(*v);
  std::sort(got.begin(), got.end());
  std::vector<std::uint64_t> expected(kThreads);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(got, expected);
}

TEST_P(StackTest, BalancedConservation) {
  constexpr int kThreads = 8;
  constexpr std::uint64_t kPerThread = 10000;
  auto s = make(kThreads, 4 * kThreads + 64);
  std::atomic<std::uint64_t> in_sum{0}, out_sum{0}, empties{0};
  spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    for (std::uint64_t i = 0; i < kPerThread; ++i) {
      const std::uint64_t v = (static_cast<std::uint64_t>(tid) << 32) | i;
      ASSERT_EQ(s->push(v, tid), OpStatus::kOk);
      in_sum.fetch_add(v);
      if (const auto got = s->pop(tid)) {
        out_sum.fetch_add(*got);
      } else {
        empties.fetch_add(1);
      }
    }
  });
  while (const auto v = s->pop(0)) out_sum.fetch_add(*v);
  EXPECT_EQ(empties.load(), 0u);  // every thread pushes before it pops
  EXPECT_EQ(in_sum.load(), out_sum.load());
}

TEST_P(StackTest, SmallTracesAreLinearizable) {
  using namespace synch::testing;
  const ContainerFactory factory = [this](int n) {
    std::shared_ptr<ConcurrentStack> s = make(n, 64);
    ContainerHandle h{[s](std::uint64_t v, int tid) { s->push(v, tid); }, [s](int tid) { return s->pop(tid); }};
    return std::make_pair(std::shared_ptr<void>(s), h);
  };
  int sequential_failures = 0, concurrent_failures = 0;
  for (const Program& p : all_programs()) {
    sequential_failures += check_all_interleavings<StackModel>(factory, p);
    concurrent_failures += check_concurrent<StackModel>(factory, p, 2);
  }
  EXPECT_EQ(sequential_failures, 0);
  EXPECT_EQ(concurrent_failures, 0);
}

TEST(StackFactory, SimStackThreadCap) {
  EXPECT_NO_THROW(make_stack(StackKind::kSim, 64, 0, 256));
  EXPECT_THROW(make_stack(StackKind::kSim, 65, 0, 256), std::out_of_range);
}

TEST(StackFactory, RejectsTinyPool) {
  for (StackKind k : kAllStackKinds) EXPECT_THROW(make_stack(k, 4, 0, 7), std::invalid_argument);
}

TEST(StackFactory, Names) {
  EXPECT_EQ(to_string(StackKind::kLf), "lf-stack");
  EXPECT_EQ(to_string(StackKind::kSim), "sim-stack");
}

TEST(LfStack, AbaStressWithTinyPool) {
  constexpr int kThreads = 8;
  LfStack s(kThreads, 2 * kThreads);
  std::atomic<std::uint64_t> in_sum{0}, out_sum{0}, empties{0}, refused{0};
  spawn_team(ThreadTeamConfig{kThreads}, [&](int tid) {
    for (std::uint64_t i = 0; i < 20000; ++i) {
      const std::uint64_t v = (static_cast<std::uint64_t>(tid) << 32) | i;
      if (s.push(v, tid) == OpStatus::kOk) {
        in_sum.fetch_add(v);
      } else {
        refused.fetch_add(1);
      }
      if (const auto got = s.pop(tid)) {
        out_sum.fetch_add(*got);
      } else {
        empties.fetch_add(1);
      }
    }
  });
  while (const auto v = s.pop(0)) out_sum.fetch_add(*v);
  EXPECT_EQ(refused.load(), 0u);
  EXPECT_EQ(empties.load(), 0u);
  EXPECT_EQ(in_sum.load(), out_sum.load());
  EXPECT_EQ(s.pool().free_count(), s.pool().capacity());
}

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <numeric>
#include <thread>
#include <vector>

#include "synch/combining.hpp"
#include "synch/runtime.hpp"

using namespace synch;

namespace {

struct CcKind {
  template <class S>
  using type = CcSynch<S>;
};
struct DsmKind {
  template <class S>
  using type = DsmSynch<S>;
};
struct HKind {
  template <class S>
  using type = HSynch<S>;
};
struct PSimKind {
  template <class S>
  using type = PSim<S>;
};
struct OyamaKind {
  template <class S>
  using type = Oyama<S>;
};

template <class Obj>
auto value_of(const Obj& o) {
  if constexpr (requires { o.snapshot(); }) {
    return o.snapshot();
  } else {
    return o.state();
  }
}

// Four registers and a handful of non-commuting operations.
struct RegisterObject {
  struct State {
    std::uint64_t r[4];
  };
  using Result = std::uint64_t;
  static constexpr Opcode kAdd = 1, kXor = 2, kMulAdd = 3, kSwap = 4;

  bool accepts(Opcode op) const noexcept { return op <= kSwap; }
  Result apply(State& s, Opcode op, std::uint64_t arg) const noexcept {
    std::uint64_t& reg = s.r[arg & 3];
    const std::uint64_t before = reg;
    switch (op) {
      case kAdd: reg += arg >> 2; break;
      case kXor: reg ^= arg * 0x9E3779B97F4A7C15ULL; break;
      case kMulAdd: reg = reg * 3 + (arg >> 2); break;
      case kSwap: std::swap(reg, s.r[(arg >> 2) & 3]); break;
      default: break;
    }
    return before;
  }
};

}  // namespace

template <class Kind>
class CombiningTest : public ::testing::Test {
 protected:
  template <class S = CounterObject>
  using Obj = typename Kind::template type<S>;
};

using Kinds = ::testing::Types<CcKind, DsmKind, HKind, PSimKind, OyamaKind>;
TYPED_TEST_SUITE(CombiningTest, Kinds);

TYPED_TEST(CombiningTest, SequentialAdd) {
  typename TestFixture::template Obj<> obj(1);
  EXPECT_EQ(obj.apply(CounterObject::kAdd, 5, 0), 0u);
  EXPECT_EQ(value_of(obj), 5u);
  EXPECT_EQ(obj.apply(CounterObject::kAdd, 7, 0), 5u);
  EXPECT_EQ(obj.apply(CounterObject::kRead, 0, 0), 12u);
  EXPECT_EQ(value_of(obj), 12u);
}

TYPED_TEST(CombiningTest, CounterTotalsAndPreValues) {
  for (int threads : {1, 2, 4, 8}) {
    constexpr std::uint64_t kPerThread = 10000;
    typename TestFixture::template Obj<> obj(threads);
    auto returned = spawn_team(ThreadTeamConfig{threads}, [&](int tid) {
      std::vector<std::uint64_t> mine;
      mine.reserve(kPerThread);
      for (std::uint64_t i = 0; i < kPerThread; ++i) mine.push_back(obj.apply(CounterObject::kAdd, 1, tid));
      return mine;
    });
    std::vector<std::uint64_t> all;
    for (const auto& r : returned) {
      EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));  // one thread's pre-values only grow
      all.insert(all.end(), r.begin(), r.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::uint64_t> expected(all.size());
    std::iota(expected.begin(), expected.end(), 0);
    EXPECT_EQ(all.size(), threads * kPerThread);
    EXPECT_EQ(all, expected) << "threads=" << threads;
    EXPECT_EQ(value_of(obj), threads * kPerThread);
  }
}

TYPED_TEST(CombiningTest, ReadsRespectRealTimeBounds) {
  typename TestFixture::template Obj<> obj(2);
  std::atomic<std::uint64_t> started{0}, completed{0};
  const auto violations = spawn_team(ThreadTeamConfig{2}, [&](int tid) {
    int bad = 0;
    for (int i = 0; i < 5000; ++i) {
      started.fetch_add(1);
      obj.apply(CounterObject::kAdd, 1, tid);
      completed.fetch_add(1);
      const std::uint64_t low = completed.load();
      const std::uint64_t seen = obj.apply(CounterObject::kRead, 0, tid);
      const std::uint64_t high = started.load();
      bad += seen < low || seen > high;
    }
    return bad;
  });
  EXPECT_EQ(violations, (std::vector<int>{0, 0}));
}

TYPED_TEST(CombiningTest, EffectVisibleAfterBarrier) {
  typename TestFixture::template Obj<> obj(2);
  Barrier barrier(2);
  const auto misses = spawn_team(ThreadTeamConfig{2}, [&](int tid) {
    int bad = 0;
    for (std::uint64_t round = 0; round < 200; ++round) {
      if (tid == 0) obj.apply(CounterObject::kAdd, 1, tid);
      barrier.wait();
      if (tid == 1) bad += obj.apply(CounterObject::kRead, 0, tid) != round + 1;
      barrier.wait();
    }
    return bad;
  });
  EXPECT_EQ(misses[1], 0);
}

TYPED_TEST(CombiningTest, UnknownOpcodeRejectedBeforeAnnouncement) {
  typename TestFixture::template Obj<> obj(2);
  obj.apply(CounterObject::kAdd, 3, 0);
  EXPECT_THROW(obj.apply(99, 1, 0), UnknownOpcode);
  EXPECT_EQ(obj.apply(CounterObject::kAdd, 1, 1), 3u);
  EXPECT_EQ(value_of(obj), 4u);
}

TYPED_TEST(CombiningTest, SingleThreadMatchesSequentialObject) {
  Xorshift64Star rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    typename TestFixture::template Obj<RegisterObject> obj(1);
    RegisterObject seq;
    RegisterObject::State reference{};
    const int length = 1 + static_cast<int>(rng.next_at_most(200));
    for (int i = 0; i < length; ++i) {
      const auto op = static_cast<Opcode>(rng.next_at_most(RegisterObject::kSwap));
      const std::uint64_t arg = rng.next();
      ASSERT_EQ(obj.apply(op, arg, 0), seq.apply(reference, op, arg)) << "trial " << trial << " step " << i;
    }
    const RegisterObject::State got = value_of(obj);
    EXPECT_EQ(std::memcmp(&got, &reference, sizeof reference), 0);
  }
}

TYPED_TEST(CombiningTest, RejectsBadThreadCount) {
  using Obj = typename TestFixture::template Obj<>;
  EXPECT_THROW(Obj(0), std::out_of_range);
}

namespace {

class PassCounter final : public YieldHook {
 public:
  void on_yield(YieldPoint point, int, const void*, std::uint64_t aux) override {
    if (point != YieldPoint::kCombinePass) return;
    std::uint64_t seen = max_pass.load();
    while (aux > seen && !max_pass.compare_exchange_weak(seen, aux)) {
    }
    if (aux > 1) batched.fetch_add(1);
    // Linger at the start of some stints so other threads queue up.
    if (aux == 1 && stints.fetch_add(1) % 8 == 0) std::this_thread::sleep_for(std::chrono::microseconds(100));
  }
  std::atomic<std::uint64_t> stints{0};
  std::atomic<std::uint64_t> max_pass{0};
  std::atomic<std::uint64_t> batched{0};
};

template <class Obj>
void check_bound(int threads, CombiningOptions options, std::uint64_t bound) {
  PassCounter counter;
  ScopedYieldHook installed(counter);
  Obj obj(threads, CounterObject{}, 0, options);
  spawn_team(ThreadTeamConfig{threads}, [&](int tid) {
    for (int i = 0; i < 2000; ++i) obj.apply(CounterObject::kAdd, 1, tid);
  });
  EXPECT_EQ(obj.state(), static_cast<std::uint64_t>(threads) * 2000);
  EXPECT_GT(counter.batched.load(), 0u);  // combining actually happened
  EXPECT_LE(counter.max_pass.load(), bound);
}

}  // namespace

TEST(CombiningBound, DefaultIsThreeTimesThreads) {
  check_bound<CcSynch<CounterObject>>(8, {}, 24);
  check_bound<DsmSynch<CounterObject>>(8, {}, 24);
  check_bound<HSynch<CounterObject>>(8, {}, 24);
}

TEST(CombiningBound, SmallBoundIsHonoured) {
  CombiningOptions o;
  o.combining_bound = 2;
  check_bound<CcSynch<CounterObject>>(8, o, 2);
  check_bound<DsmSynch<CounterObject>>(8, o, 2);
  o.group_size = 4;
  check_bound<HSynch<CounterObject>>(8, o, 2);
}

TEST(HSynch, GroupLayouts) {
  struct Case {
    int group_size, expected_groups;
  };
  for (const Case c : {Case{8, 1}, Case{4, 2}, Case{1, 8}, Case{0, 1}, Case{3, 3}}) {
    CombiningOptions o;
    o.group_size = c.group_size;
    HSynch<CounterObject> obj(8, {}, 0, o);
    EXPECT_EQ(obj.n_groups(), c.expected_groups);
    spawn_team(ThreadTeamConfig{8}, [&](int tid) {
      for (int i = 0; i < 10000; ++i) obj.apply(CounterObject::kAdd, 1, tid);
    });
    EXPECT_EQ(obj.state(), 80000u) << "group_size=" << c.group_size;
  }
}

TEST(HSynch, OneGroupBehavesLikeCcSynch) {
  // Same single-threaded schedule on both: identical returns and state.
  CombiningOptions o;
  o.group_size = 4;
  HSynch<RegisterObject> h(4, {}, {}, o);
  CcSynch<RegisterObject> cc(4);
  Xorshift64Star rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto op = static_cast<Opcode>(rng.next_at_most(RegisterObject::kSwap));
    const std::uint64_t arg = rng.next();
    const int tid = static_cast<int>(rng.next_at_most(3));
    ASSERT_EQ(h.apply(op, arg, tid), cc.apply(op, arg, tid));
  }
  EXPECT_EQ(std::memcmp(&h.state(), &cc.state(), sizeof(RegisterObject::State)), 0);
}

namespace {

class StallAt final : public YieldHook {
 public:
  StallAt(int victim, YieldPoint point) : victim_(victim), point_(point) {}
  void on_yield(YieldPoint point, int tid, const void*, std::uint64_t) override {
    if (tid != victim_ || point != point_ || !armed_.exchange(false)) return;
    stalled.store(true);
    while (!released.load()) std::this_thread::sleep_for(std::chrono::microseconds(200));
  }
  std::atomic<bool> stalled{false};
  std::atomic<bool> released{false};

 private:
  int victim_;
  YieldPoint point_;
  std::atomic<bool> armed_{true};
};

}  // namespace

TEST(PSim, StalledAnnouncerIsHelped) {
  PSim<CounterObject> obj(4);
  StallAt hook(0, YieldPoint::kPostAnnounce);
  ScopedYieldHook installed(hook);
  std::uint64_t victim_result = 0;
  std::thread victim([&] { victim_result = obj.apply(CounterObject::kAdd, 1, 0); });
  while (!hook.stalled.load()) std::this_thread::yield();

  ThreadTeamConfig live{3};
  spawn_team(live, [&](int i) {
    for (int k = 0; k < 1000; ++k) obj.apply(CounterObject::kAdd, 1, i + 1);
  });
  EXPECT_EQ(obj.snapshot(), 3001u);  // live threads finished while the victim is stalled
  hook.released.store(true);
  victim.join();
  EXPECT_EQ(obj.snapshot(), 3001u);
  EXPECT_LT(victim_result, 3001u);
}

TEST(PSim, StallBeforeToggleIsNotApplied) {
  PSim<CounterObject> obj(2);
  StallAt hook(0, YieldPoint::kAnnounce);
  ScopedYieldHook installed(hook);
  std::thread victim([&] { obj.apply(CounterObject::kAdd, 1, 0); });
  while (!hook.stalled.load()) std::this_thread::yield();
  for (int k = 0; k < 100; ++k) obj.apply(CounterObject::kAdd, 1, 1);
  EXPECT_EQ(obj.snapshot(), 100u);
  hook.released.store(true);
  victim.join();
  EXPECT_EQ(obj.snapshot(), 101u);
}

TEST(PSim, ThreadCap) {
  EXPECT_NO_THROW(PSim<CounterObject>(64));
  EXPECT_THROW(PSim<CounterObject>(65), std::out_of_range);
}

TEST(PSim, StateBlockOverflow) {
  struct Big {
    struct State {
      std::uint64_t words[20];  // 160 bytes
    };
    using Result = std::uint64_t;
    bool accepts(Opcode) const noexcept { return true; }
    Result apply(State&, Opcode, std::uint64_t) const noexcept { return 0; }
  };
  EXPECT_THROW(PSim<Big>(2), std::length_error);
  CombiningOptions roomy;
  roomy.state_block_bytes = 256;
  EXPECT_NO_THROW(PSim<Big>(2, {}, {}, roomy));
}

TEST(PSim, SwapsAdvance) {
  PSim<CounterObject> obj(1);
  const std::uint64_t before = obj.swaps();
  obj.apply(CounterObject::kAdd, 1, 0);
  EXPECT_EQ(obj.swaps(), before + 1);
}

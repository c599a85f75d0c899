#pragma once

#include <atomic>
#include <cstdint>

namespace synch {

inline constexpr std::uint64_t kThreadSeedMix = 0x9E3779B97F4A7C15ULL;

/// xorshift64* generator. A zero state is replaced by a fixed constant.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) noexcept : state_(seed ? seed : kThreadSeedMix) {}

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform-ish value in [0, bound]; modulo bias is irrelevant at our bounds.
  std::uint64_t next_at_most(std::uint64_t bound) noexcept {
    if (bound == 0) return 0;
    const std::uint64_t r = next();
    return bound == UINT64_MAX ? r : r % (bound + 1);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t thread_seed(std::uint64_t seed, int thread_id) noexcept {
  return seed ^ (static_cast<std::uint64_t>(thread_id) * kThreadSeedMix);
}

/// Busy loop of `k` iterations the compiler cannot drop.
inline void busy_work(std::uint64_t k) noexcept {
  for (std::uint64_t i = 0; i < k; ++i) std::atomic_signal_fence(std::memory_order_seq_cst);
}

struct WorkKnob {
  std::uint64_t max_work = 0;
  std::uint64_t seed = 0;
};

/// Per-thread stream of local-work amounts, deterministic in (seed, thread id).
class LocalWork {
 public:
  LocalWork(WorkKnob knob, int thread_id) noexcept : max_work_(knob.max_work), rng_(thread_seed(knob.seed, thread_id)) {}

  std::uint64_t next_amount() noexcept { return max_work_ == 0 ? 0 : rng_.next_at_most(max_work_); }

  /// Spins for the next amount of iterations and returns it.
  std::uint64_t operator()() noexcept {
    const std::uint64_t k = next_amount();
    busy_work(k);
    return k;
  }

 private:
  std::uint64_t max_work_;
  Xorshift64Star rng_;
};

inline std::uint64_t random_work(LocalWork& work) noexcept { return work(); }

}  // namespace synch

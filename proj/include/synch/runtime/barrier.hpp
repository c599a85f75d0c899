#pragma once

#include <cstdint>
#include <stdexcept>

#include "synch/runtime/atomic_word.hpp"

namespace synch {

/// Reusable spinning barrier. More than `expected` concurrent waiters in one
/// phase is undefined behaviour.
class Barrier {
 public:
  explicit Barrier(int expected) : expected_(static_cast<std::uint64_t>(expected)) {
    if (expected < 1) throw std::invalid_argument("Barrier: expected must be positive");
  }

  /// Blocks until `expected` threads have arrived; returns the index of the
  /// phase just completed (the same value for every waiter of that phase).
  std::uint64_t wait() {
    // The phase cannot advance before this thread arrives, so this read is
    // the phase we are joining.
    const std::uint64_t phase = phase_.value.load();
    if (arrived_.value.fetch_add(1) + 1 == expected_) {
      arrived_.value.store(0);
      phase_.value.store(phase + 1);
      return phase;
    }
    SpinWait spin;
    while (phase_.value.load() == phase) spin();
    return phase;
  }

  int expected() const noexcept { return static_cast<int>(expected_); }

 private:
  const std::uint64_t expected_;
  Padded<AtomicWord> arrived_;
  Padded<AtomicWord> phase_;
};

}  // namespace synch

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

static_assert(sizeof(void*) == 8, "synch targets 64-bit platforms only");

namespace synch {

inline constexpr std::size_t kCacheLine = 64;

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#elif defined(__aarch64__) || defined(__arm__)
  asm volatile("yield" ::: "memory");
#else
  std::atomic_signal_fence(std::memory_order_seq_cst);
#endif
}

inline void full_fence() noexcept { std::atomic_thread_fence(std::memory_order_seq_cst); }

/// A 64-bit shared cell. Every operation is sequentially consistent; the few
/// call sites that relax ordering go through the *_relaxed accessors and say
/// why next to the call.
class AtomicWord {
 public:
  constexpr AtomicWord() noexcept = default;
  constexpr explicit AtomicWord(std::uint64_t v) noexcept : cell_(v) {}
  AtomicWord(const AtomicWord&) = delete;
  AtomicWord& operator=(const AtomicWord&) = delete;

  std::uint64_t load() const noexcept { return cell_.load(); }
  void store(std::uint64_t v) noexcept { cell_.store(v); }

  /// Returns the value held immediately before the addition.
  std::uint64_t fetch_add(std::uint64_t v) noexcept { return cell_.fetch_add(v); }
  std::uint64_t fetch_xor(std::uint64_t v) noexcept { return cell_.fetch_xor(v); }
  std::uint64_t exchange(std::uint64_t v) noexcept { return cell_.exchange(v); }

  bool compare_and_swap(std::uint64_t expected, std::uint64_t desired) noexcept {
    return cell_.compare_exchange_strong(expected, desired);
  }
  /// On failure `expected` receives the observed value.
  bool compare_exchange(std::uint64_t& expected, std::uint64_t desired) noexcept {
    return cell_.compare_exchange_strong(expected, desired);
  }

  std::uint64_t load_relaxed() const noexcept { return cell_.load(std::memory_order_relaxed); }
  void store_relaxed(std::uint64_t v) noexcept { cell_.store(v, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> cell_{0};
};

template <class T>
struct alignas(kCacheLine) Padded {
  T value{};
};

/// Reference into a node array: 48-bit index, 16-bit version tag.
class PackedRef {
 public:
  static constexpr unsigned kIndexBits = 48;
  static constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << kIndexBits) - 1;
  static constexpr std::uint64_t kNullIndex = kIndexMask;

  constexpr PackedRef() noexcept = default;
  constexpr PackedRef(std::uint64_t index, std::uint16_t tag) noexcept
      : bits_((std::uint64_t{tag} << kIndexBits) | (index & kIndexMask)) {}

  static constexpr PackedRef from_bits(std::uint64_t bits) noexcept {
    PackedRef r;
    r.bits_ = bits;
    return r;
  }
  static constexpr PackedRef null(std::uint16_t tag = 0) noexcept { return {kNullIndex, tag}; }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr std::uint64_t index() const noexcept { return bits_ & kIndexMask; }
  constexpr std::uint16_t tag() const noexcept { return static_cast<std::uint16_t>(bits_ >> kIndexBits); }
  constexpr bool is_null() const noexcept { return index() == kNullIndex; }

  /// Same index, tag advanced by one (wraps at 2^16).
  constexpr PackedRef bumped(std::uint64_t new_index) const noexcept {
    return {new_index, static_cast<std::uint16_t>(tag() + 1)};
  }

  friend constexpr bool operator==(PackedRef, PackedRef) noexcept = default;

 private:
  std::uint64_t bits_ = kNullIndex;
};

/// Busy-wait step: a short burst of pause instructions, then yields the CPU so
/// waiters on an oversubscribed machine do not starve the thread they wait for.
class SpinWait {
 public:
  void operator()() noexcept {
    if (++spins_ < kPauseBurst) {
      cpu_relax();
    } else {
      spins_ = 0;
      std::this_thread::yield();
    }
  }

 private:
  static constexpr unsigned kPauseBurst = 64;
  unsigned spins_ = 0;
};

/// Exponential backoff for failed compare-and-swap loops.
class Backoff {
 public:
  static constexpr std::uint32_t kDefaultCap = 1024;

  explicit Backoff(std::uint32_t cap = kDefaultCap) noexcept : cap_(std::max<std::uint32_t>(cap, 1)) {}

  void operator()() noexcept {
    for (std::uint32_t i = 0; i < current_; ++i) cpu_relax();
    if (current_ >= cap_) {
      std::this_thread::yield();
    } else {
      current_ = std::min(current_ * 2, cap_);
    }
  }
  void reset() noexcept { current_ = 1; }
  std::uint32_t current() const noexcept { return current_; }

 private:
  std::uint32_t cap_;
  std::uint32_t current_ = 1;
};

}  // namespace synch

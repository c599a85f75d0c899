#pragma once

// Named yield points. Every spin loop and every announce/complete edge in the
// library reports here. Compiled in only when SYNCH_INSTRUMENT is defined;
// otherwise yield_point() is an empty inline function.

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string_view>

namespace synch {

#if defined(SYNCH_INSTRUMENT)
inline constexpr bool kInstrumented = true;
#else
inline constexpr bool kInstrumented = false;
#endif

enum class YieldPoint : std::uint8_t {
  kAnnounce,      // request written, not yet published
  kPostAnnounce,  // request published to the object
  kSpin,          // one iteration of a wait loop on a combining object
  kCombinePass,   // combiner about to serve one request (aux = pass number in this stint)
  kPostCopy,      // wait-free construction copied the shared state
  kPreSwap,       // about to compare-and-swap the state pointer
  kPostSwap,      // state pointer swap succeeded
  kPreCas,        // lock-free structure about to attempt its linearizing CAS
  kLockSpin,      // one iteration of a queue-lock wait (cell = spun-on word)
  kLockHeld,      // lock granted (aux = grant ticket)
};

inline constexpr std::array<std::pair<YieldPoint, std::string_view>, 10> kYieldPointNames{{
    {YieldPoint::kAnnounce, "announce"},
    {YieldPoint::kPostAnnounce, "post-announce"},
    {YieldPoint::kSpin, "spin"},
    {YieldPoint::kCombinePass, "combine-pass"},
    {YieldPoint::kPostCopy, "post-copy"},
    {YieldPoint::kPreSwap, "pre-swap"},
    {YieldPoint::kPostSwap, "post-swap"},
    {YieldPoint::kPreCas, "pre-cas"},
    {YieldPoint::kLockSpin, "lock-spin"},
    {YieldPoint::kLockHeld, "lock-held"},
}};

constexpr std::string_view to_string(YieldPoint p) noexcept {
  for (const auto& [point, name] : kYieldPointNames) {
    if (point == p) return name;
  }
  return "unknown";
}

constexpr std::optional<YieldPoint> parse_yield_point(std::string_view name) noexcept {
  for (const auto& [point, n] : kYieldPointNames) {
    if (n == name) return point;
  }
  return std::nullopt;
}

class YieldHook {
 public:
  virtual ~YieldHook() = default;
  virtual void on_yield(YieldPoint point, int tid, const void* cell, std::uint64_t aux) = 0;
};

namespace detail {
inline std::atomic<YieldHook*> g_yield_hook{nullptr};
}  // namespace detail

inline void yield_point(YieldPoint point, int tid, const void* cell = nullptr, std::uint64_t aux = 0) {
  if constexpr (kInstrumented) {
    // Relaxed: the hook is installed before the threads that observe it start.
    if (auto* hook = detail::g_yield_hook.load(std::memory_order_relaxed)) {
      hook->on_yield(point, tid, cell, aux);
    }
  }
}

/// Installs a hook for the lifetime of the guard. Not reentrant.
class ScopedYieldHook {
 public:
  explicit ScopedYieldHook(YieldHook& hook) noexcept {
    previous_ = detail::g_yield_hook.exchange(&hook);
  }
  ~ScopedYieldHook() { detail::g_yield_hook.store(previous_); }
  ScopedYieldHook(const ScopedYieldHook&) = delete;
  ScopedYieldHook& operator=(const ScopedYieldHook&) = delete;

 private:
  YieldHook* previous_ = nullptr;
};

}  // namespace synch

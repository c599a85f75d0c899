#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace synch {

#if defined(SYNCH_INSTRUMENT) || !defined(NDEBUG)
inline constexpr bool kLockOwnerChecks = true;
#else
inline constexpr bool kLockOwnerChecks = false;
#endif

/// Raised (in checked builds) when a thread releases a lock it does not hold.
class LockMisuse : public std::logic_error {
 public:
  explicit LockMisuse(int tid) : std::logic_error("release by non-owner thread " + std::to_string(tid)) {}
};

template <class Lock>
class LockGuard {
 public:
  LockGuard(Lock& lock, int tid) : lock_(lock), tid_(tid), ticket_(lock.acquire(tid)) {}
  ~LockGuard() { lock_.release(tid_); }
  LockGuard(const LockGuard&) = delete;
  LockGuard& operator=(const LockGuard&) = delete;
  std::uint64_t ticket() const noexcept { return ticket_; }

 private:
  Lock& lock_;
  int tid_;
  std::uint64_t ticket_;
};

}  // namespace synch

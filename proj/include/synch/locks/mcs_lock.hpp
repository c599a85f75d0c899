#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>

#include "synch/locks/lock_error.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"

namespace synch {

/// MCS queue lock: one node per thread, each waiter spins on its own node.
class McsLock {
 public:
  explicit McsLock(int n_threads) : n_threads_(n_threads), nodes_(new QNode[static_cast<std::size_t>(n_threads)]) {
    if (n_threads < 1) throw std::invalid_argument("McsLock: n_threads must be positive");
    tail_.value.store(kNone);
    last_ticket_.value.store(UINT64_MAX);
  }

  McsLock(const McsLock&) = delete;
  McsLock& operator=(const McsLock&) = delete;

  std::uint64_t acquire(int tid) {
    QNode& me = nodes_[tid];
    me.next.store(kNone);
    me.locked.store(1);
    if constexpr (kInstrumented) me.ticket_ready.store(0);

    const std::uint64_t pred = tail_.value.exchange(static_cast<std::uint64_t>(tid));
    std::uint64_t ticket = 0;
    if (pred == kNone) {
      if constexpr (kInstrumented) ticket = publish_ticket(me, last_ticket_.value.load() + 1);
    } else {
      QNode& p = nodes_[pred];
      if constexpr (kInstrumented) {
        // Read before linking: once linked, the predecessor may release and
        // reuse its node.
        SpinWait spin;
        while (p.ticket_ready.load() == 0) spin();
        ticket = publish_ticket(me, p.ticket.load() + 1);
      }
      p.next.store(static_cast<std::uint64_t>(tid));
      SpinWait spin;
      while (me.locked.load() != 0) {
        yield_point(YieldPoint::kLockSpin, tid, &me.locked, static_cast<std::uint64_t>(tid));
        spin();
      }
    }
    if constexpr (kLockOwnerChecks) owner_.value.store(static_cast<std::uint64_t>(tid) + 1);
    yield_point(YieldPoint::kLockHeld, tid, this, ticket);
    return ticket;
  }

  void release(int tid) {
    if constexpr (kLockOwnerChecks) {
      if (owner_.value.load() != static_cast<std::uint64_t>(tid) + 1) throw LockMisuse(tid);
      owner_.value.store(0);
    }
    QNode& me = nodes_[tid];
    if (me.next.load() == kNone) {
      if constexpr (kInstrumented) last_ticket_.value.store(me.ticket.load());
      if (tail_.value.compare_and_swap(static_cast<std::uint64_t>(tid), kNone)) return;
      SpinWait spin;
      while (me.next.load() == kNone) spin();
    }
    nodes_[me.next.load()].locked.store(0);
  }

  int n_threads() const noexcept { return n_threads_; }
  const void* spin_cell(int tid) const noexcept { return &nodes_[tid].locked; }

 private:
  static constexpr std::uint64_t kNone = UINT64_MAX;

  struct alignas(kCacheLine) QNode {
    AtomicWord locked;
    AtomicWord next;
    AtomicWord ticket;
    AtomicWord ticket_ready;
  };

  static std::uint64_t publish_ticket(QNode& me, std::uint64_t ticket) {
    me.ticket.store(ticket);
    me.ticket_ready.store(1);
    return ticket;
  }

  int n_threads_;
  std::unique_ptr<QNode[]> nodes_;
  Padded<AtomicWord> tail_;
  Padded<AtomicWord> last_ticket_;
  Padded<AtomicWord> owner_;
};

}  // namespace synch

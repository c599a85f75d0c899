#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>

#include "synch/locks/lock_error.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"

namespace synch {

/// CLH queue lock. Each waiter spins on its predecessor's record; on release
/// the thread adopts that record for its next acquisition, so n_threads + 1
/// records circulate.
///
/// Under instrumentation each record also carries the FIFO grant ticket:
/// a waiter takes its predecessor's ticket plus one, which orders tickets
/// exactly as the exchanges on `tail_`.
class ClhLock {
 public:
  explicit ClhLock(int n_threads)
      : n_threads_(n_threads),
        records_(new Record[static_cast<std::size_t>(n_threads) + 1]),
        slots_(new Slot[static_cast<std::size_t>(n_threads)]) {
    if (n_threads < 1) throw std::invalid_argument("ClhLock: n_threads must be positive");
    for (int t = 0; t < n_threads; ++t) slots_[t].mine = static_cast<std::uint64_t>(t);
    Record& sentinel = records_[n_threads];
    sentinel.locked.store(0);
    sentinel.ticket.store(UINT64_MAX);
    sentinel.ticket_ready.store(1);
    tail_.value.store(static_cast<std::uint64_t>(n_threads));
  }

  ClhLock(const ClhLock&) = delete;
  ClhLock& operator=(const ClhLock&) = delete;

  /// Returns the grant ticket (always 0 without instrumentation).
  std::uint64_t acquire(int tid) { return acquire(tid, tid); }

  /// Acquires through record slot `slot` while reporting `tid` to yield hooks
  /// (for callers that use the lock on behalf of a group).
  std::uint64_t acquire(int slot_id, int tid) {
    Slot& slot = slots_[slot_id];
    Record& mine = records_[slot.mine];
    mine.locked.store(1);
    if constexpr (kInstrumented) mine.ticket_ready.store(0);

    slot.pred = tail_.value.exchange(slot.mine);
    Record& pred = records_[slot.pred];

    std::uint64_t ticket = 0;
    if constexpr (kInstrumented) {
      SpinWait spin;
      while (pred.ticket_ready.load() == 0) spin();
      ticket = pred.ticket.load() + 1;
      mine.ticket.store(ticket);
      mine.ticket_ready.store(1);
    }

    SpinWait spin;
    while (pred.locked.load() != 0) {
      yield_point(YieldPoint::kLockSpin, tid, &pred.locked, slot.pred);
      spin();
    }
    if constexpr (kLockOwnerChecks) owner_.value.store(static_cast<std::uint64_t>(slot_id) + 1);
    yield_point(YieldPoint::kLockHeld, tid, this, ticket);
    return ticket;
  }

  void release(int tid) {
    if constexpr (kLockOwnerChecks) {
      if (owner_.value.load() != static_cast<std::uint64_t>(tid) + 1) throw LockMisuse(tid);
      owner_.value.store(0);
    }
    Slot& slot = slots_[tid];
    records_[slot.mine].locked.store(0);
    slot.mine = slot.pred;
  }

  int n_threads() const noexcept { return n_threads_; }

  /// Address of the word a waiter spins on when queued behind record `index`.
  const void* spin_cell(std::uint64_t index) const noexcept { return &records_[index].locked; }
  /// Record the thread will enqueue with on its next acquisition.
  std::uint64_t current_record(int tid) const noexcept { return slots_[tid].mine; }

 private:
  struct alignas(kCacheLine) Record {
    AtomicWord locked;
    AtomicWord ticket;
    AtomicWord ticket_ready;
  };
  // Thread-private bookkeeping.
  struct alignas(kCacheLine) Slot {
    std::uint64_t mine = 0;
    std::uint64_t pred = 0;
  };

  int n_threads_;
  std::unique_ptr<Record[]> records_;
  std::unique_ptr<Slot[]> slots_;
  Padded<AtomicWord> tail_;
  Padded<AtomicWord> owner_;
};

}  // namespace synch

#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "synch/combining/seq_object.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

/// Oyama-style combining: threads push announcements on a shared stack; the
/// lock holder detaches the whole stack, serves it, and repeats until the
/// stack is empty before releasing the lock. A thread whose request is still
/// pending keeps retrying the lock, so no announcement is stranded.
template <InPlaceObject Seq>
class Oyama {
 public:
  using State = typename Seq::State;
  using Result = typename Seq::Result;

  Oyama(int n_threads, Seq seq = {}, State initial = {}, CombiningOptions = {})
      : n_threads_(checked(n_threads)),
        seq_(std::move(seq)),
        state_(initial),
        records_(new Record[static_cast<std::size_t>(n_threads)]) {
    pending_.value.store(kEmpty);
  }

  Result apply(Opcode op, std::uint64_t arg, int tid) {
    if (!seq_.accepts(op)) throw UnknownOpcode(op);
    Record& mine = records_[tid];
    mine.opcode = op;
    mine.arg = arg;
    mine.completed.store(0);
    yield_point(YieldPoint::kAnnounce, tid, &mine);

    // Push-only stack drained by exchange, so there is no ABA on `pending_`.
    std::uint64_t head = pending_.value.load();
    do {
      mine.next.store(head);
    } while (!pending_.value.compare_exchange(head, static_cast<std::uint64_t>(tid)));
    yield_point(YieldPoint::kPostAnnounce, tid, &mine);

    SpinWait spin;
    for (;;) {
      if (mine.completed.load() != 0) return mine.ret;
      if (lock_.value.load() == 0 && lock_.value.compare_and_swap(0, 1)) {
        drain(tid);
        lock_.value.store(0);
        continue;
      }
      yield_point(YieldPoint::kSpin, tid, &mine.completed);
      spin();
    }
  }

  const State& state() const noexcept { return state_; }
  int n_threads() const noexcept { return n_threads_; }

 private:
  static constexpr std::uint64_t kEmpty = UINT64_MAX;

  struct alignas(kCacheLine) Record {
    Opcode opcode = 0;
    std::uint64_t arg = 0;
    Result ret{};
    AtomicWord completed;
    AtomicWord next{kEmpty};
  };

  static int checked(int n) {
    detail::check_thread_count(n, kMaxThreads, "Oyama");
    return n;
  }

  void drain(int tid) {
    std::uint64_t passes = 0;
    for (std::uint64_t i = pending_.value.exchange(kEmpty); i != kEmpty; i = pending_.value.exchange(kEmpty)) {
      while (i != kEmpty) {
        Record& r = records_[i];
        const std::uint64_t next = r.next.load();  // before completion frees the record
        yield_point(YieldPoint::kCombinePass, tid, &r, ++passes);
        r.ret = seq_.apply(state_, r.opcode, r.arg);
        r.completed.store(1);
        i = next;
      }
    }
  }

  int n_threads_;
  Seq seq_;
  State state_;
  std::unique_ptr<Record[]> records_;
  Padded<AtomicWord> lock_;
  Padded<AtomicWord> pending_;
};

}  // namespace synch

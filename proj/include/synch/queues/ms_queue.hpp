#pragma once

#include <cstdint>
#include <optional>

#include "synch/queues/queue.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

/// Michael-Scott lock-free queue over pool nodes. `head_` and `tail_` carry
/// a counter bumped on every swing; `next` links carry the counter of their
/// node incarnation, so a recycled node never matches a stale expectation.
class MsQueue final : public ConcurrentQueue {
 public:
  MsQueue(int n_threads, std::size_t pool_capacity, std::uint32_t backoff_cap = Backoff::kDefaultCap)
      : pool_(checked(n_threads, pool_capacity)), backoff_cap_(backoff_cap) {
    const PackedRef dummy = pool_.alloc();
    head_.value.store(PackedRef(dummy.index(), 0).bits());
    tail_.value.store(PackedRef(dummy.index(), 0).bits());
  }

  OpStatus enqueue(std::uint64_t value, int tid) override {
    const auto node = pool_.try_alloc();
    if (!node) return OpStatus::kExhausted;
    pool_[*node].value.store(value);
    Backoff backoff(backoff_cap_);
    for (;;) {
      const std::uint64_t t_bits = tail_.value.load();
      const PackedRef tail = PackedRef::from_bits(t_bits);
      const PackedRef next = PackedRef::from_bits(pool_[tail].next.load());
      if (t_bits != tail_.value.load()) continue;
      if (next.is_null()) {
        yield_point(YieldPoint::kPreCas, tid, &pool_[tail].next);
        if (pool_[tail].next.compare_and_swap(next.bits(), next.bumped(node->index()).bits())) {
          tail_.value.compare_and_swap(t_bits, tail.bumped(node->index()).bits());
          return OpStatus::kOk;
        }
        backoff();
      } else {
        tail_.value.compare_and_swap(t_bits, tail.bumped(next.index()).bits());
      }
    }
  }

  std::optional<std::uint64_t> dequeue(int tid) override {
    Backoff backoff(backoff_cap_);
    for (;;) {
      const std::uint64_t h_bits = head_.value.load();
      const std::uint64_t t_bits = tail_.value.load();
      const PackedRef head = PackedRef::from_bits(h_bits);
      const PackedRef tail = PackedRef::from_bits(t_bits);
      const PackedRef next = PackedRef::from_bits(pool_[head].next.load());
      if (h_bits != head_.value.load()) continue;
      if (head.index() == tail.index()) {
        if (next.is_null()) return std::nullopt;
        tail_.value.compare_and_swap(t_bits, tail.bumped(next.index()).bits());
        continue;
      }
      if (next.is_null()) continue;  // stale read of a recycled node
      // Read before the swing: afterwards another dequeuer may free `next`.
      const std::uint64_t value = pool_[next].value.load();
      yield_point(YieldPoint::kPreCas, tid, &head_);
      if (head_.value.compare_and_swap(h_bits, head.bumped(next.index()).bits())) {
        pool_.release(head);
        return value;
      }
      backoff();
    }
  }

  QueueKind kind() const noexcept override { return QueueKind::kMs; }
  const NodePool& pool() const noexcept { return pool_; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, kMaxThreads, pool_capacity, "MsQueue");
    return pool_capacity;
  }

  NodePool pool_;
  std::uint32_t backoff_cap_;
  Padded<AtomicWord> head_;
  Padded<AtomicWord> tail_;
};

}  // namespace synch

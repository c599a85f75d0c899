#pragma once

#include <cstdint>
#include <optional>

#include "synch/locks/clh_lock.hpp"
#include "synch/queues/queue.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

/// Two-lock queue: one CLH lock guards the head, another the tail; a dummy
/// node keeps the two ends apart.
class ClhQueue final : public ConcurrentQueue {
 public:
  ClhQueue(int n_threads, std::size_t pool_capacity)
      : pool_(checked(n_threads, pool_capacity)), head_lock_(n_threads), tail_lock_(n_threads) {
    head_ = tail_ = pool_.alloc();
  }

  OpStatus enqueue(std::uint64_t value, int tid) override {
    const auto node = pool_.try_alloc();
    if (!node) return OpStatus::kExhausted;
    pool_[*node].value.store(value);
    LockGuard guard(tail_lock_, tid);
    pool_[tail_].next.store(node->bits());
    tail_ = *node;
    return OpStatus::kOk;
  }

  std::optional<std::uint64_t> dequeue(int tid) override {
    PackedRef old;
    std::uint64_t value = 0;
    {
      LockGuard guard(head_lock_, tid);
      const PackedRef next = PackedRef::from_bits(pool_[head_].next.load());
      if (next.is_null()) return std::nullopt;
      value = pool_[next].value.load();
      old = head_;
      head_ = next;
    }
    pool_.release(old);
    return value;
  }

  QueueKind kind() const noexcept override { return QueueKind::kClh; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, kMaxThreads, pool_capacity, "ClhQueue");
    return pool_capacity;
  }

  NodePool pool_;
  ClhLock head_lock_;
  ClhLock tail_lock_;
  alignas(kCacheLine) PackedRef head_;  // guarded by head_lock_
  alignas(kCacheLine) PackedRef tail_;  // guarded by tail_lock_
};

}  // namespace synch

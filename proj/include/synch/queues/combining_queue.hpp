#pragma once

#include <cstdint>
#include <optional>

#include "synch/combining/seq_object.hpp"
#include "synch/queues/queue.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

namespace detail {

/// Tail end of a linked queue. The argument is a node prepared by the caller.
struct QueueTailObject {
  using State = std::uint64_t;  // PackedRef bits of the last node
  using Result = std::uint64_t;
  static constexpr Opcode kEnqueue = 1;

  NodePool* pool = nullptr;

  bool accepts(Opcode op) const noexcept { return op == kReadOp || op == kEnqueue; }
  Result apply(State& tail, Opcode op, std::uint64_t node) const noexcept {
    if (op == kEnqueue) {
      (*pool)[PackedRef::from_bits(tail)].next.store(node);
      tail = node;
    }
    return tail;
  }
};

/// Head end of a linked queue with a dummy node; frees the old dummy.
struct QueueHeadObject {
  using State = std::uint64_t;
  using Result = Reply;
  static constexpr Opcode kDequeue = 1;

  NodePool* pool = nullptr;

  bool accepts(Opcode op) const noexcept { return op == kReadOp || op == kDequeue; }
  Result apply(State& head, Opcode op, std::uint64_t) const noexcept {
    const PackedRef dummy = PackedRef::from_bits(head);
    const PackedRef next = PackedRef::from_bits((*pool)[dummy].next.load());
    if (next.is_null()) return {};
    const std::uint64_t value = (*pool)[next].value.load();
    if (op == kDequeue) {
      head = next.bits();
      pool->release(dummy);
    }
    return {value, true};
  }
};

}  // namespace detail

/// Queue built from two combining instances over one linked list: one
/// serializes enqueues at the tail, the other dequeues at the head.
template <template <class> class Combiner>
class CombiningQueue final : public ConcurrentQueue {
 public:
  CombiningQueue(QueueKind kind, int n_threads, std::size_t pool_capacity, CombiningOptions options = {})
      : kind_(kind),
        pool_(checked(n_threads, pool_capacity)),
        dummy_(pool_.alloc()),
        tail_(n_threads, detail::QueueTailObject{&pool_}, dummy_.bits(), options),
        head_(n_threads, detail::QueueHeadObject{&pool_}, dummy_.bits(), options) {}

  OpStatus enqueue(std::uint64_t value, int tid) override {
    const auto node = pool_.try_alloc();
    if (!node) return OpStatus::kExhausted;
    pool_[*node].value.store(value);
    tail_.apply(detail::QueueTailObject::kEnqueue, node->bits(), tid);
    return OpStatus::kOk;
  }

  std::optional<std::uint64_t> dequeue(int tid) override {
    return head_.apply(detail::QueueHeadObject::kDequeue, 0, tid).as_optional();
  }

  QueueKind kind() const noexcept override { return kind_; }
  const NodePool& pool() const noexcept { return pool_; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, kMaxThreads, pool_capacity, "CombiningQueue");
    return pool_capacity;
  }

  QueueKind kind_;
  NodePool pool_;
  PackedRef dummy_;
  Combiner<detail::QueueTailObject> tail_;
  Combiner<detail::QueueHeadObject> head_;
};

}  // namespace synch

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "synch/combining/psim.hpp"
#include "synch/queues/queue.hpp"
#include "synch/runtime/node_pool.hpp"

namespace synch {

namespace detail {

/// Enqueue side of SimQueue. A helper copies every pending value into nodes
/// it allocates privately and chains them; the chain is attached to the
/// shared list by one tag-checked CAS (`link_from.next`: null -> `link_to`),
/// performed by whoever sees the published state first. Nodes of a failed
/// attempt were never visible and go straight back to the pool.
struct SimEnqueueObject {
  struct State {
    std::uint64_t tail;
    std::uint64_t link_from;
    std::uint64_t link_to;
  };
  using Result = std::uint64_t;  // 1 = enqueued, 0 = pool exhausted
  struct Local {
    std::vector<PackedRef> allocated;
  };
  static constexpr Opcode kEnqueue = 1;

  NodePool* pool = nullptr;

  bool accepts(Opcode op) const noexcept { return op == kReadOp || op == kEnqueue; }

  void help(const State& s) const noexcept {
    const PackedRef from = PackedRef::from_bits(s.link_from);
    if (from.is_null()) return;
    (*pool)[from].next.compare_and_swap(PackedRef::null(from.tag()).bits(), s.link_to);
  }

  void begin(State& s, Local& local) const noexcept {
    local.allocated.clear();
    s.link_from = PackedRef::null().bits();
    s.link_to = PackedRef::null().bits();
  }

  Result apply(State& s, Opcode op, std::uint64_t value, Local& local) const {
    if (op != kEnqueue) return s.tail;
    const auto node = pool->try_alloc();
    if (!node) return 0;
    (*pool)[*node].value.store(value);
    if (local.allocated.empty()) {
      s.link_from = s.tail;
      s.link_to = node->bits();
    } else {
      (*pool)[PackedRef::from_bits(s.tail)].next.store(node->bits());
    }
    s.tail = node->bits();
    local.allocated.push_back(*node);
    return 1;
  }

  void commit(Local& local) const noexcept { local.allocated.clear(); }
  void abort(Local& local) const noexcept {
    for (PackedRef r : local.allocated) pool->release(r);
    local.allocated.clear();
  }
};

/// Dequeue side of SimQueue. Emptiness is decided from the shared list alone.
/// Dummies passed over are released only after a successful swap.
struct SimDequeueObject {
  struct State {
    std::uint64_t head;
  };
  using Result = Reply;
  struct Local {
    std::vector<PackedRef> retired;
  };
  static constexpr Opcode kDequeue = 1;

  NodePool* pool = nullptr;

  bool accepts(Opcode op) const noexcept { return op == kReadOp || op == kDequeue; }

  void begin(State&, Local& local) const noexcept { local.retired.clear(); }

  Result apply(State& s, Opcode op, std::uint64_t, Local& local) const {
    const PackedRef dummy = PackedRef::from_bits(s.head);
    const PackedRef next = PackedRef::from_bits((*pool)[dummy].next.load());
    if (next.is_null()) return {};
    const std::uint64_t value = (*pool)[next].value.load();
    if (op == kDequeue) {
      local.retired.push_back(dummy);
      s.head = next.bits();
    }
    return {value, true};
  }

  void commit(Local& local) const noexcept {
    for (PackedRef r : local.retired) pool->release(r);
    local.retired.clear();
  }
  void abort(Local& local) const noexcept { local.retired.clear(); }
};

}  // namespace detail

/// Wait-free queue from two PSim instances (tail side and head side).
/// The pool gets n_threads^2 extra nodes for helpers' private copies.
class SimQueue final : public ConcurrentQueue {
 public:
  SimQueue(int n_threads, std::size_t pool_capacity, CombiningOptions options = {})
      : pool_(checked(n_threads, pool_capacity) + static_cast<std::size_t>(n_threads) * static_cast<std::size_t>(n_threads)),
        dummy_(pool_.alloc()),
        tail_(n_threads, detail::SimEnqueueObject{&pool_},
              {dummy_.bits(), PackedRef::null().bits(), PackedRef::null().bits()}, options),
        head_(n_threads, detail::SimDequeueObject{&pool_}, {dummy_.bits()}, options) {}

  OpStatus enqueue(std::uint64_t value, int tid) override {
    const auto done = tail_.apply(detail::SimEnqueueObject::kEnqueue, value, tid);
    // The batch holding this request may still be detached from the list.
    tail_.object().help(tail_.snapshot());
    return done != 0 ? OpStatus::kOk : OpStatus::kExhausted;
  }

  std::optional<std::uint64_t> dequeue(int tid) override {
    return head_.apply(detail::SimDequeueObject::kDequeue, 0, tid).as_optional();
  }

  QueueKind kind() const noexcept override { return QueueKind::kSim; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, PSim<detail::SimEnqueueObject>::kMaxThreads, pool_capacity, "SimQueue");
    return pool_capacity;
  }

  NodePool pool_;
  PackedRef dummy_;
  PSim<detail::SimEnqueueObject> tail_;
  PSim<detail::SimDequeueObject> head_;
};

}  // namespace synch

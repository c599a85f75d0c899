#pragma once

#include <cstdint>
#include <optional>

#include "synch/combining/seq_object.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"
#include "synch/stacks/stack.hpp"

namespace synch {

namespace detail {

/// Linked stack applied by a combiner. PUSH links a node prepared by the
/// caller; POP unlinks and frees the top node.
struct StackObject {
  using State = std::uint64_t;  // PackedRef bits of the top node
  using Result = Reply;
  static constexpr Opcode kPush = 1;
  static constexpr Opcode kPop = 2;

  NodePool* pool = nullptr;

  bool accepts(Opcode op) const noexcept { return op <= kPop; }
  Result apply(State& top, Opcode op, std::uint64_t arg) const noexcept {
    if (op == kPush) {
      (*pool)[PackedRef::from_bits(arg)].next.store(top);
      top = arg;
      return {0, true};
    }
    const PackedRef t = PackedRef::from_bits(top);
    if (t.is_null()) return {};
    const std::uint64_t value = (*pool)[t].value.load();
    if (op == kPop) {
      top = (*pool)[t].next.load();
      pool->release(t);
    }
    return {value, true};
  }
};

}  // namespace detail

/// Stack served by a single combining instance: both operations contend on
/// the same end.
template <template <class> class Combiner>
class CombiningStack final : public ConcurrentStack {
 public:
  CombiningStack(StackKind kind, int n_threads, std::size_t pool_capacity, CombiningOptions options = {})
      : kind_(kind),
        pool_(checked(n_threads, pool_capacity)),
        object_(n_threads, detail::StackObject{&pool_}, PackedRef::null().bits(), options) {}

  OpStatus push(std::uint64_t value, int tid) override {
    const auto node = pool_.try_alloc();
    if (!node) return OpStatus::kExhausted;
    pool_[*node].value.store(value);
    object_.apply(detail::StackObject::kPush, node->bits(), tid);
    return OpStatus::kOk;
  }

  std::optional<std::uint64_t> pop(int tid) override {
    return object_.apply(detail::StackObject::kPop, 0, tid).as_optional();
  }

  StackKind kind() const noexcept override { return kind_; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, kMaxThreads, pool_capacity, "CombiningStack");
    return pool_capacity;
  }

  StackKind kind_;
  NodePool pool_;
  Combiner<detail::StackObject> object_;
};

}  // namespace synch

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "synch/combining/psim.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/stacks/stack.hpp"

namespace synch {

namespace detail {

/// Stack state for PSim. Pushes copy values into privately allocated nodes;
/// popped nodes are released once the swap that removed them succeeds, and
/// private nodes of a failed attempt are returned immediately.
struct SimStackObject {
  struct State {
    std::uint64_t top;
  };
  using Result = Reply;
  struct Local {
    std::vector<PackedRef> allocated;
    std::vector<PackedRef> popped;
  };
  static constexpr Opcode kPush = 1;
  static constexpr Opcode kPop = 2;

  NodePool* pool = nullptr;

  bool accepts(Opcode op) const noexcept { return op <= kPop; }

  void begin(State&, Local& local) const noexcept {
    local.allocated.clear();
    local.popped.clear();
  }

  Result apply(State& s, Opcode op, std::uint64_t arg, Local& local) const {
    if (op == kPush) {
      const auto node = pool->try_alloc();
      if (!node) return {};
      (*pool)[*node].value.store(arg);
      (*pool)[*node].next.store(s.top);
      s.top = node->bits();
      local.allocated.push_back(*node);
      return {0, true};
    }
    const PackedRef top = PackedRef::from_bits(s.top);
    if (top.is_null()) return {};
    const std::uint64_t value = (*pool)[top].value.load();
    if (op == kPop) {
      s.top = (*pool)[top].next.load();
      local.popped.push_back(top);
    }
    return {value, true};
  }

  void commit(Local& local) const noexcept {
    for (PackedRef r : local.popped) pool->release(r);
    local.popped.clear();
    local.allocated.clear();
  }
  void abort(Local& local) const noexcept {
    for (PackedRef r : local.allocated) pool->release(r);
    local.allocated.clear();
    local.popped.clear();
  }
};

}  // namespace detail

/// Wait-free stack on one PSim instance. The pool gets n_threads^2 extra
/// nodes for helpers' private copies.
class SimStack final : public ConcurrentStack {
 public:
  SimStack(int n_threads, std::size_t pool_capacity, CombiningOptions options = {})
      : pool_(checked(n_threads, pool_capacity) + static_cast<std::size_t>(n_threads) * static_cast<std::size_t>(n_threads)),
        object_(n_threads, detail::SimStackObject{&pool_}, {PackedRef::null().bits()}, options) {}

  OpStatus push(std::uint64_t value, int tid) override {
    return object_.apply(detail::SimStackObject::kPush, value, tid).as_status();
  }

  std::optional<std::uint64_t> pop(int tid) override {
    return object_.apply(detail::SimStackObject::kPop, 0, tid).as_optional();
  }

  StackKind kind() const noexcept override { return StackKind::kSim; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, PSim<detail::SimStackObject>::kMaxThreads, pool_capacity, "SimStack");
    return pool_capacity;
  }

  NodePool pool_;
  PSim<detail::SimStackObject> object_;
};

}  // namespace synch

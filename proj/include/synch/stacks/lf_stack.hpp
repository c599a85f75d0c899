#pragma once

#include <cstdint>
#include <optional>

#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/instrument.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"
#include "synch/stacks/stack.hpp"

namespace synch {

/// Treiber stack. `top_` holds a PackedRef whose tag counts successful
/// updates, so a pop that read a since-recycled top fails its CAS.
class LfStack final : public ConcurrentStack {
 public:
  LfStack(int n_threads, std::size_t pool_capacity, std::uint32_t backoff_cap = Backoff::kDefaultCap)
      : pool_(checked(n_threads, pool_capacity)), backoff_cap_(backoff_cap) {
    top_.value.store(PackedRef::null().bits());
  }

  OpStatus push(std::uint64_t value, int tid) override {
    const auto node = pool_.try_alloc();
    if (!node) return OpStatus::kExhausted;
    pool_[*node].value.store(value);
    Backoff backoff(backoff_cap_);
    std::uint64_t observed = top_.value.load();
    for (;;) {
      pool_[*node].next.store(observed);
      yield_point(YieldPoint::kPreCas, tid, &top_);
      if (top_.value.compare_exchange(observed, PackedRef::from_bits(observed).bumped(node->index()).bits())) {
        return OpStatus::kOk;
      }
      backoff();
    }
  }

  std::optional<std::uint64_t> pop(int tid) override {
    Backoff backoff(backoff_cap_);
    std::uint64_t observed = top_.value.load();
    for (;;) {
      const PackedRef top = PackedRef::from_bits(observed);
      if (top.is_null()) return std::nullopt;
      // Both reads may see a recycled node; the tagged CAS then fails.
      const PackedRef next = PackedRef::from_bits(pool_[top].next.load());
      const std::uint64_t value = pool_[top].value.load();
      yield_point(YieldPoint::kPreCas, tid, &top_);
      if (top_.value.compare_exchange(observed, top.bumped(next.index()).bits())) {
        pool_.release(top);
        return value;
      }
      backoff();
    }
  }

  StackKind kind() const noexcept override { return StackKind::kLf; }
  const NodePool& pool() const noexcept { return pool_; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, kMaxThreads, pool_capacity, "LfStack");
    return pool_capacity;
  }

  NodePool pool_;
  std::uint32_t backoff_cap_;
  Padded<AtomicWord> top_;
};

}  // namespace synch

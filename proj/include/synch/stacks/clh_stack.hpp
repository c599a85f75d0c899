#pragma once

#include <cstdint>
#include <optional>

#include "synch/locks/clh_lock.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"
#include "synch/stacks/stack.hpp"

namespace synch {

/// Linked stack guarded by a single CLH lock.
class ClhStack final : public ConcurrentStack {
 public:
  ClhStack(int n_threads, std::size_t pool_capacity) : pool_(checked(n_threads, pool_capacity)), lock_(n_threads) {}

  OpStatus push(std::uint64_t value, int tid) override {
    const auto node = pool_.try_alloc();
    if (!node) return OpStatus::kExhausted;
    pool_[*node].value.store(value);
    LockGuard guard(lock_, tid);
    pool_[*node].next.store(top_.bits());
    top_ = *node;
    return OpStatus::kOk;
  }

  std::optional<std::uint64_t> pop(int tid) override {
    PackedRef old;
    std::uint64_t value = 0;
    {
      LockGuard guard(lock_, tid);
      if (top_.is_null()) return std::nullopt;
      old = top_;
      value = pool_[old].value.load();
      top_ = PackedRef::from_bits(pool_[old].next.load());
    }
    pool_.release(old);
    return value;
  }

  StackKind kind() const noexcept override { return StackKind::kClh; }

 private:
  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_container_params(n_threads, kMaxThreads, pool_capacity, "ClhStack");
    return pool_capacity;
  }

  NodePool pool_;
  ClhLock lock_;
  alignas(kCacheLine) PackedRef top_ = PackedRef::null();  // guarded by lock_
};

}  // namespace synch

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>

#include "synch/runtime/atomic_word.hpp"

namespace synch {

/// Link node shared by the queues, stacks and hash chains. `next` holds a
/// PackedRef; a freshly allocated node's `next` is null carrying the node's
/// allocation tag, so stale compare-and-swaps against an older incarnation fail.
struct Node {
  AtomicWord key;
  AtomicWord value;
  AtomicWord next;
};

class PoolExhausted : public std::runtime_error {
 public:
  PoolExhausted() : std::runtime_error("node pool exhausted") {}
};

/// Fixed-capacity node pool with a lock-free tagged free list. Each successful
/// pop advances the head tag; the reference handed out carries that tag.
class NodePool {
 public:
  explicit NodePool(std::size_t capacity)
      : capacity_(capacity), nodes_(new Node[capacity]), free_next_(new AtomicWord[capacity]) {
    if (capacity == 0 || capacity >= PackedRef::kNullIndex) {
      throw std::invalid_argument("NodePool: capacity out of range");
    }
    for (std::size_t i = 0; i < capacity; ++i) {
      free_next_[i].store(i + 1 < capacity ? i + 1 : PackedRef::kNullIndex);
    }
    head_.value.store(PackedRef(0, 0).bits());
  }

  NodePool(const NodePool&) = delete;
  NodePool& operator=(const NodePool&) = delete;

  std::size_t capacity() const noexcept { return capacity_; }

  std::optional<PackedRef> try_alloc() noexcept {
    std::uint64_t observed = head_.value.load();
    for (;;) {
      const PackedRef top = PackedRef::from_bits(observed);
      if (top.is_null()) return std::nullopt;
      const PackedRef replacement = top.bumped(free_next_[top.index()].load());
      if (head_.value.compare_exchange(observed, replacement.bits())) {
        const PackedRef ref(top.index(), replacement.tag());
        nodes_[ref.index()].next.store(PackedRef::null(ref.tag()).bits());
        return ref;
      }
    }
  }

  PackedRef alloc() {
    if (auto r = try_alloc()) return *r;
    throw PoolExhausted();
  }

  void release(PackedRef ref) noexcept {
    const std::uint64_t index = ref.index();
    std::uint64_t observed = head_.value.load();
    for (;;) {
      const PackedRef top = PackedRef::from_bits(observed);
      free_next_[index].store(top.index());
      if (head_.value.compare_exchange(observed, PackedRef(index, top.tag()).bits())) return;
    }
  }

  Node& operator[](PackedRef ref) noexcept { return nodes_[ref.index()]; }
  const Node& operator[](PackedRef ref) const noexcept { return nodes_[ref.index()]; }
  Node& at_index(std::uint64_t index) noexcept { return nodes_[index]; }

  /// Free-list length; only meaningful at quiescence.
  std::size_t free_count() const noexcept {
    std::size_t n = 0;
    for (auto i = PackedRef::from_bits(head_.value.load()).index(); i != PackedRef::kNullIndex;
         i = free_next_[i].load()) {
      ++n;
    }
    return n;
  }

 private:
  std::size_t capacity_;
  std::unique_ptr<Node[]> nodes_;
  std::unique_ptr<AtomicWord[]> free_next_;
  Padded<AtomicWord> head_;
};

}  // namespace synch

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "synch/combining/dsm_synch.hpp"
#include "synch/hashmap/hash_table.hpp"
#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/thread_team.hpp"

namespace synch {

namespace detail {

/// Per-thread operand block. The combining argument is the owner's id; the
/// combiner reads key and value from here.
struct alignas(kCacheLine) HashOperand {
  AtomicWord key;
  AtomicWord value;
};

struct HashReply {
  std::uint64_t value;
  std::uint32_t hit;
  std::uint32_t exhausted;
};

/// One bucket's chain as a sequential object. Nodes are released as soon as
/// they are unlinked: every access to the chain runs under the combiner.
struct BucketObject {
  using State = std::uint64_t;  // PackedRef bits of the chain head
  using Result = HashReply;
  static constexpr Opcode kSearch = kReadOp;
  static constexpr Opcode kInsert = 1;
  static constexpr Opcode kDelete = 2;

  NodePool* pool = nullptr;
  const HashOperand* operands = nullptr;
  const ConcurrentHashTable* table = nullptr;
  void (*notify)(const ConcurrentHashTable*, std::size_t, const HashEvent&) = nullptr;
  std::size_t bucket = 0;

  bool accepts(Opcode op) const noexcept { return op <= kDelete; }

  Result apply(State& head, Opcode op, std::uint64_t owner) const {
    const std::uint64_t key = operands[owner].key.load();
    PackedRef prev = PackedRef::null();
    PackedRef r = PackedRef::from_bits(head);
    while (!r.is_null() && (*pool)[r].key.load() != key) {
      prev = r;
      r = PackedRef::from_bits((*pool)[r].next.load());
    }
    const bool found = !r.is_null();
    switch (op) {
      case kSearch: {
        const std::uint64_t value = found ? (*pool)[r].value.load() : 0;
        notify(table, bucket, {HashOp::kSearch, key, value, found, false});
        return {value, found, 0};
      }
      case kInsert: {
        const std::uint64_t value = operands[owner].value.load();
        if (found) {
          (*pool)[r].value.store(value);
        } else {
          const auto node = pool->try_alloc();
          if (!node) {
            notify(table, bucket, {HashOp::kInsert, key, value, false, true});
            return {0, 0, 1};
          }
          (*pool)[*node].key.store(key);
          (*pool)[*node].value.store(value);
          (*pool)[*node].next.store(head);
          head = node->bits();
        }
        notify(table, bucket, {HashOp::kInsert, key, value, found, false});
        return {0, found, 0};
      }
      default: {
        if (found) {
          const std::uint64_t next = (*pool)[r].next.load();
          if (prev.is_null()) {
            head = next;
          } else {
            (*pool)[prev].next.store(next);
          }
          pool->release(r);
        }
        notify(table, bucket, {HashOp::kDelete, key, 0, found, false});
        return {0, found, 0};
      }
    }
  }
};

}  // namespace detail

/// Chained table with one DSM-Synch instance per bucket; the chain is the
/// bucket's sequential object.
class DsmHashTable final : public ConcurrentHashTable {
 public:
  DsmHashTable(int n_threads, std::size_t pool_capacity, std::size_t n_buckets = kDefaultBuckets,
               CombiningOptions options = {})
      : ConcurrentHashTable(n_buckets),
        pool_(checked(n_threads, pool_capacity)),
        operands_(new detail::HashOperand[static_cast<std::size_t>(n_threads)]) {
    buckets_.reserve(n_buckets);
    for (std::size_t b = 0; b < n_buckets; ++b) {
      detail::BucketObject object{&pool_, operands_.get(), this, &DsmHashTable::forward, b};
      buckets_.push_back(std::make_unique<Bucket>(n_threads, object, PackedRef::null().bits(), options));
    }
  }

  InsertResult insert(std::uint64_t key, std::uint64_t value, int tid) override {
    const auto r = submit(detail::BucketObject::kInsert, key, value, tid);
    if (r.exhausted) return InsertResult::kExhausted;
    return r.hit ? InsertResult::kUpdated : InsertResult::kInserted;
  }

  DeleteResult remove(std::uint64_t key, int tid) override {
    return submit(detail::BucketObject::kDelete, key, 0, tid).hit ? DeleteResult::kRemoved : DeleteResult::kAbsent;
  }

  std::optional<std::uint64_t> search(std::uint64_t key, int tid) override {
    const auto r = submit(detail::BucketObject::kSearch, key, 0, tid);
    if (!r.hit) return std::nullopt;
    return r.value;
  }

  HashKind kind() const noexcept override { return HashKind::kDsm; }

  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> scan() const override {
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> out(buckets_.size());
    for (std::size_t b = 0; b < buckets_.size(); ++b) {
      for (auto r = PackedRef::from_bits(buckets_[b]->state()); !r.is_null();
           r = PackedRef::from_bits(pool_[r].next.load())) {
        out[b].emplace_back(pool_[r].key.load(), pool_[r].value.load());
      }
    }
    return out;
  }

 private:
  using Bucket = DsmSynch<detail::BucketObject>;

  static std::size_t checked(int n_threads, std::size_t pool_capacity) {
    detail::check_thread_count(n_threads, kMaxThreads, "DsmHashTable");
    if (pool_capacity == 0) throw std::invalid_argument("DsmHashTable: pool_capacity must be positive");
    return pool_capacity;
  }

  static void forward(const ConcurrentHashTable* table, std::size_t bucket, const HashEvent& e) {
    static_cast<const DsmHashTable*>(table)->notify(bucket, e);
  }

  detail::HashReply submit(Opcode op, std::uint64_t key, std::uint64_t value, int tid) {
    detail::HashOperand& mine = operands_[tid];
    mine.key.store(key);
    mine.value.store(value);
    return buckets_[bucket_of(key)]->apply(op, static_cast<std::uint64_t>(tid), tid);
  }

  NodePool pool_;
  std::unique_ptr<detail::HashOperand[]> operands_;
  std::vector<std::unique_ptr<Bucket>> buckets_;
};

}  // namespace synch
